#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>
#include <vector>

#include "blochwp/tridiagonal.hpp"

using namespace blochwp;

namespace {

struct Tri {
  Eigen::VectorXd d, e;
};

Tri random_tridiagonal(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Tri t{Eigen::VectorXd(n), Eigen::VectorXd(n - 1)};
  for (int i = 0; i < n; ++i) t.d(i) = 3 * g(rng);
  for (int i = 0; i + 1 < n; ++i) t.e(i) = g(rng);
  return t;
}

Eigen::MatrixXd dense(const Tri& t) {
  const auto n = t.d.size();
  Eigen::MatrixXd m = t.d.asDiagonal();
  for (Eigen::Index i = 0; i + 1 < n; ++i) m(i + 1, i) = m(i, i + 1) = t.e(i);
  return m;
}

}  // namespace

TEST(Tridiagonal, QlEigenvaluesMatchDenseSolver) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Tri t = random_tridiagonal(60, seed);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(dense(t), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ql = tridiagonal_eigenvalues<double>(t.d, t.e);
    EXPECT_LE((ql - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Tridiagonal, BisectionMatchesQl) {
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    const Tri t = random_tridiagonal(80, seed);
    const Eigen::VectorXd all = tridiagonal_eigenvalues<double>(t.d, t.e);
    const Eigen::VectorXd low = tridiagonal_lowest_eigenvalues<double>(t.d, t.e, 10);
    EXPECT_LE((low - all.head(10)).cwiseAbs().maxCoeff(), 1e-13 * all.cwiseAbs().maxCoeff());
  }
}

TEST(Tridiagonal, BisectionOnDiagonalMatrixIsExact) {
  Eigen::VectorXd d(5);
  d << 4.0, 0.0625, 1.5625, 0.5625, 9.0;
  const Eigen::VectorXd low = tridiagonal_lowest_eigenvalues<double>(d, Eigen::VectorXd::Zero(4), 3);
  EXPECT_NEAR(low(0), 0.0625, 1e-15);
  EXPECT_NEAR(low(1), 0.5625, 1e-15);
  EXPECT_NEAR(low(2), 1.5625, 1e-15);
}

TEST(Tridiagonal, SturmCountsEigenvaluesBelow) {
  const Tri t = random_tridiagonal(30, 9);
  const Eigen::VectorXd all = tridiagonal_eigenvalues<double>(t.d, t.e);
  for (Eigen::Index k = 0; k + 1 < all.size(); ++k) {
    const double x = 0.5 * (all(k) + all(k + 1));
    EXPECT_EQ(sturm_count<double>(t.d, t.e, x, 1e-300), k + 1);
  }
}

TEST(Tridiagonal, EigensystemIsOrthonormalAndSolves) {
  const Tri t = random_tridiagonal(40, 11);
  const auto sys = tridiagonal_eigensystem<double>(t.d, t.e);
  const Eigen::MatrixXd a = dense(t);
  EXPECT_LE((sys.eigenvectors.transpose() * sys.eigenvectors - Eigen::MatrixXd::Identity(40, 40)).norm(), 1e-12);
  EXPECT_LE((a * sys.eigenvectors - sys.eigenvectors * sys.eigenvalues.asDiagonal()).norm(), 1e-11);
}

TEST(Tridiagonal, InverseIterationGivesOrthogonalResidualFreeVectors) {
  const Tri t = random_tridiagonal(100, 12);
  const Eigen::MatrixXd a = dense(t);
  const Eigen::VectorXd low = tridiagonal_lowest_eigenvalues<double>(t.d, t.e, 4);
  std::vector<Eigen::VectorXd> found;
  for (int j = 0; j < 4; ++j) {
    found.push_back(tridiagonal_inverse_iteration<double>(t.d, t.e, low(j), found));
    const Eigen::VectorXd& v = found.back();
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    EXPECT_LE((a * v - low(j) * v).norm(), 1e-12 * a.cwiseAbs().rowwise().sum().maxCoeff());
    for (int i = 0; i < j; ++i) EXPECT_LE(std::abs(found[i].dot(v)), 1e-12);
  }
}

TEST(Tridiagonal, LongDoubleInstantiation) {
  const Tri t = random_tridiagonal(20, 13);
  const Eigen::Matrix<long double, Eigen::Dynamic, 1> d = t.d.cast<long double>();
  const Eigen::Matrix<long double, Eigen::Dynamic, 1> e = t.e.cast<long double>();
  const auto ql = tridiagonal_eigenvalues<long double>(d, e);
  const auto bis = tridiagonal_lowest_eigenvalues<long double>(d, e, 3);
  EXPECT_LE(static_cast<double>((ql.head(3) - bis).cwiseAbs().maxCoeff()), 1e-15);
}
