#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

#include "blochwp/bands.hpp"
#include "blochwp/central_eq.hpp"
#include "blochwp/error.hpp"

using namespace blochwp;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

FourierPotential complex_potential() {
  return FourierPotential::from_harmonics(1.0, 0.3, {{1, 0.8, 0.5}, {2, -0.4, 0.9}});
}

}  // namespace

TEST(BuildCentralMatrix, CosineAtZoneCenter) {
  const CentralMatrix h = build_central_matrix(cosine_potential(1.0), 0.0, 1);
  Eigen::MatrixXcd expected(3, 3);
  expected << 1, 1, 0, 1, 0, 1, 0, 1, 1;
  EXPECT_EQ(h.dense(), expected);
  EXPECT_EQ(h.bandwidth(), 1);
  EXPECT_TRUE(h.is_real());
}

TEST(BuildCentralMatrix, FreeDiagonal) {
  const CentralMatrix h = build_central_matrix(FourierPotential::free(), 0.25, 2);
  Eigen::VectorXd expected(5);
  expected << 3.0625, 0.5625, 0.0625, 1.5625, 5.0625;
  EXPECT_EQ(h.diagonal(), expected);
  EXPECT_EQ(h.bandwidth(), 0);
}

TEST(BuildCentralMatrix, HermitianForComplexPotential) {
  const CentralMatrix h = build_central_matrix(complex_potential(), 0.17, 6);
  const Eigen::MatrixXcd d = h.dense();
  EXPECT_EQ(d, d.adjoint());
  EXPECT_EQ(h.bandwidth(), 2);
  EXPECT_FALSE(h.is_real());
}

TEST(BuildCentralMatrix, RowHoldsEquationForThatHarmonic) {
  // row n couples f_m through V_{n-m}
  const FourierPotential p = complex_potential();
  const CentralMatrix h = build_central_matrix(p, 0.1, 4);
  for (int n = -4; n <= 4; ++n) {
    for (int m = -4; m <= 4; ++m) {
      const std::complex<double> expected =
          (n == m ? (0.1 + n) * (0.1 + n) : 0.0) + p.coefficient(n - m);
      EXPECT_EQ(h(h.index_of(n), h.index_of(m)), expected) << n << "," << m;
    }
  }
}

TEST(BuildCentralMatrix, ApplyMatchesDense) {
  const CentralMatrix h = build_central_matrix(complex_potential(), -0.3, 5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(h.dim());
  for (auto& x : v) x = {g(rng), g(rng)};
  EXPECT_LE((h.apply(v) - h.dense() * v).norm(), 1e-13);
  EXPECT_NEAR(h.norm_inf(), h.dense().cwiseAbs().rowwise().sum().maxCoeff(), 1e-13);
}

TEST(BuildCentralMatrix, Preconditions) {
  EXPECT_EQ(code_of([] { build_central_matrix(cosine_potential(1.0), 0.5, 10); }), ErrorCode::ZoneBoundaryExcluded);
  EXPECT_EQ(code_of([] { build_central_matrix(cosine_potential(1.0), -0.5, 10); }), ErrorCode::ZoneBoundaryExcluded);
  EXPECT_EQ(code_of([] { build_central_matrix(complex_potential(), 0.0, 1); }), ErrorCode::TruncationTooSmall);
  EXPECT_NO_THROW(build_central_matrix(complex_potential(), 0.0, 2));
}

TEST(EigenLowest, FreeParticle) {
  const EigenPairSet e = eigen_lowest(build_central_matrix(FourierPotential::free(), 0.25, 50), 3);
  EXPECT_NEAR(e.eigenvalues(0), 0.0625, 1e-15);
  EXPECT_NEAR(e.eigenvalues(1), 0.5625, 1e-15);
  EXPECT_NEAR(e.eigenvalues(2), 1.5625, 1e-15);
}

TEST(EigenLowest, WeakCosineMatchesMathieuSeries) {
  // -F'' + 2 alpha cos(x) F = eps F is Mathieu's equation with a = 4 eps, q = 4 alpha;
  // a_0(q) = -q^2/2 + 7 q^4/128 - 29 q^6/2304 + ...
  for (double alpha : {0.02, 0.05}) {
    const EigenPairSet e = eigen_lowest(build_central_matrix(cosine_potential(alpha), 0.0, 50), 1);
    const double series = -2 * alpha * alpha + 3.5 * std::pow(alpha, 4);
    EXPECT_NEAR(e.eigenvalues(0), series, 20 * std::pow(alpha, 6)) << alpha;
  }
}

TEST(EigenLowest, UnitCosineMatchesMathieuCharacteristicValue) {
  // Mathieu characteristic values a_0(4) = -4.2805188183, a_0(5) = -5.8000460209
  const EigenPairSet e1 = eigen_lowest(build_central_matrix(cosine_potential(1.0), 0.0, 100), 1);
  EXPECT_NEAR(4 * e1.eigenvalues(0), -4.2805188183, 1e-9);
  const EigenPairSet e2 = eigen_lowest(build_central_matrix(cosine_potential(1.25), 0.0, 100), 1);
  EXPECT_NEAR(4 * e2.eigenvalues(0), -5.8000460209, 1e-9);
}

TEST(EigenLowest, DenseRouteMatchesEigenSolver) {
  const CentralMatrix h = build_central_matrix(complex_potential(), 0.23, 30);
  const EigenPairSet e = eigen_lowest(h, 4);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(h.dense());
  EXPECT_LE((e.eigenvalues - ref.eigenvalues().head(4)).cwiseAbs().maxCoeff(), 1e-11);
  for (int j = 0; j < 4; ++j) {
    // same eigenvector up to phase
    const double overlap = std::abs(ref.eigenvectors().col(j).dot(e.eigenvectors.col(j))) * std::sqrt(kTwoPi);
    EXPECT_NEAR(overlap, 1.0, 1e-10);
  }
}

TEST(EigenLowest, NormalizationOrthogonalityResiduals) {
  for (const FourierPotential& p : {cosine_potential(3.0), complex_potential()}) {
    for (double z : {-0.41, -0.05, 0.0, 0.33}) {
      const CentralMatrix h = build_central_matrix(p, z, 60);
      const EigenPairSet e = eigen_lowest(h, 4);
      for (int j = 0; j < 4; ++j) {
        EXPECT_NEAR(e.eigenvectors.col(j).squaredNorm(), 1.0 / kTwoPi, 1e-12);
        const Eigen::VectorXcd u = e.eigenvectors.col(j) * std::sqrt(kTwoPi);
        EXPECT_LE((h.apply(u) - e.eigenvalues(j) * u).norm(), 1e-10 * (std::abs(e.eigenvalues(j)) + h.norm_inf()));
        for (int i = 0; i < j; ++i) {
          EXPECT_LE(std::abs(e.eigenvectors.col(i).dot(e.eigenvectors.col(j))) * kTwoPi, 1e-10);
        }
        if (j > 0) {
          EXPECT_LT(e.eigenvalues(j - 1), e.eigenvalues(j));
        }
      }
    }
  }
}

TEST(EigenLowest, BlochWaveSolvesSchroedingerEquation) {
  // F(x) = sum_n f_n exp(i (n + z) x) must satisfy -F'' + V F = eps F pointwise
  const FourierPotential p = complex_potential();
  const int m = 40;
  const double z = 0.27;
  const EigenPairSet e = eigen_lowest(build_central_matrix(p, z, m), 2);
  for (int j = 0; j < 2; ++j) {
    for (double x : {-1.3, 0.0, 0.7, 2.9}) {
      std::complex<double> f = 0.0, minus_f2 = 0.0;
      for (int n = -m; n <= m; ++n) {
        const std::complex<double> w = e.eigenvectors(n + m, j) * std::polar(1.0, (n + z) * x);
        f += w;
        minus_f2 += (n + z) * (n + z) * w;
      }
      std::complex<double> v = 0.0;
      for (const auto& [n, c] : p.coefficients()) v += c * std::polar(1.0, n * x);
      EXPECT_LE(std::abs(minus_f2 + v * f - e.eigenvalues(j) * f), 1e-11) << "j=" << j << " x=" << x;
    }
  }
}

TEST(EigenLowest, VariationalBound) {
  const FourierPotential p = complex_potential();
  for (double z = -0.45; z < 0.46; z += 0.05) {
    const EigenPairSet e = eigen_lowest(build_central_matrix(p, z, 30), 1);
    EXPECT_LE(e.eigenvalues(0), z * z + p.coefficient(0).real());
  }
}

TEST(EigenLowest, RejectsDegenerateBands) {
  // free particle at z = 0: eps = 0, 1, 1
  const CentralMatrix h = build_central_matrix(FourierPotential::free(), 0.0, 10);
  EXPECT_NO_THROW(eigen_lowest(h, 2));
  EXPECT_EQ(code_of([&] { eigen_lowest(h, 3); }), ErrorCode::DegenerateBands);
  EXPECT_EQ(code_of([&] { eigen_lowest(h, 22); }), ErrorCode::InvalidArgument);
}

TEST(EigenLowest, CosineZoneCenterVectorIsEven) {
  const EigenPairSet e = solve_gauged(cosine_potential(2.0), 0.0, 100, 1);
  for (int n = 1; n <= 100; ++n) EXPECT_NEAR(std::abs(e.eigenvectors(100 - n, 0) - e.eigenvectors(100 + n, 0)), 0.0, 1e-10);
}
