#include "blochwp/central_eq.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "blochwp/error.hpp"
#include "blochwp/tridiagonal.hpp"

namespace blochwp {

CentralMatrix::CentralMatrix(double z, int truncation, Eigen::VectorXd diagonal, Eigen::MatrixXcd lower)
    : z_(z), truncation_(truncation), diagonal_(std::move(diagonal)), lower_(std::move(lower)) {}

std::complex<double> CentralMatrix::operator()(Eigen::Index row, Eigen::Index col) const {
  if (row == col) return diagonal_(row);
  const Eigen::Index k = row > col ? row - col : col - row;
  if (k > bandwidth()) return 0.0;
  return row > col ? lower_(k, col) : std::conj(lower_(k, row));
}

Eigen::MatrixXcd CentralMatrix::dense() const {
  const Eigen::Index n = dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = diagonal_(i);
  for (Eigen::Index k = 1; k <= bandwidth(); ++k) {
    for (Eigen::Index i = 0; i + k < n; ++i) {
      h(i + k, i) = lower_(k, i);
      h(i, i + k) = std::conj(lower_(k, i));
    }
  }
  return h;
}

Eigen::VectorXcd CentralMatrix::apply(const Eigen::VectorXcd& v) const {
  const Eigen::Index n = dim();
  Eigen::VectorXcd out = diagonal_.cast<std::complex<double>>().cwiseProduct(v);
  for (Eigen::Index k = 1; k <= bandwidth(); ++k) {
    for (Eigen::Index i = 0; i + k < n; ++i) {
      out(i + k) += lower_(k, i) * v(i);
      out(i) += std::conj(lower_(k, i)) * v(i + k);
    }
  }
  return out;
}

double CentralMatrix::norm_inf() const {
  const Eigen::Index n = dim();
  double norm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = std::abs(diagonal_(i));
    for (Eigen::Index k = 1; k <= bandwidth(); ++k) {
      if (i - k >= 0) row += std::abs(lower_(k, i - k));
      if (i + k < n) row += std::abs(lower_(k, i));
    }
    norm = std::max(norm, row);
  }
  return norm;
}

bool CentralMatrix::is_real() const { return lower_.imag().isZero(0.0); }

CentralMatrix build_central_matrix(const FourierPotential& potential, double z, int truncation) {
  if (!(std::abs(z) < 0.5)) {
    std::ostringstream msg;
    msg << "quasi-momentum z = " << z << " is not inside the open zone (-1/2, 1/2)";
    fail(ErrorCode::ZoneBoundaryExcluded, msg.str());
  }
  const int order = potential.order();
  if (truncation < order || truncation < 0) {
    fail(ErrorCode::TruncationTooSmall,
         "truncation M = " + std::to_string(truncation) + " is below the potential order N = " + std::to_string(order));
  }

  const Eigen::Index n = 2 * Eigen::Index(truncation) + 1;
  const double v0 = potential.coefficient(0).real();
  Eigen::VectorXd diagonal(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = z + double(i - truncation);
    diagonal(i) = k * k + v0;
  }
  // H(i + k, i) = V_{(i + k) - i} = V_k: constant along each sub-diagonal
  Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(order + 1, n);
  for (int k = 1; k <= order; ++k) lower.row(k).head(n - k).setConstant(potential.coefficient(k));
  return CentralMatrix(z, truncation, std::move(diagonal), std::move(lower));
}

namespace {

struct RealTridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
};

void check_gaps(const Eigen::VectorXd& values, const SolverOptions& options, double scale, const CentralMatrix& matrix) {
  for (Eigen::Index j = 1; j < values.size(); ++j) {
    const double gap = values(j) - values(j - 1);
    if (gap < options.degeneracy_tolerance * scale) {
      std::ostringstream msg;
      msg << "bands " << j - 1 << " and " << j << " are closer than " << options.degeneracy_tolerance * scale
          << " at z = " << matrix.z() << " (gap " << gap << ", M = " << matrix.truncation() << ")";
      fail(ErrorCode::DegenerateBands, msg.str());
    }
  }
}

// Lowest eigenpairs of the real tridiagonal, unit vectors.
void lowest_tridiagonal_pairs(const RealTridiagonal& t, int count, const SolverOptions& options, double scale,
                              const CentralMatrix& matrix, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  values = tridiagonal_lowest_eigenvalues<double>(t.diag, t.off, count);
  check_gaps(values, options, scale, matrix);
  std::vector<Eigen::VectorXd> found;
  found.reserve(static_cast<std::size_t>(count));
  vectors.resize(t.diag.size(), count);
  for (int j = 0; j < count; ++j) {
    found.push_back(tridiagonal_inverse_iteration<double>(t.diag, t.off, values(j), found));
    const Eigen::VectorXd& u = found.back();
    vectors.col(j) = u;
    // Rayleigh quotient: error quadratic in the vector residual
    double rq = t.diag.dot(u.cwiseAbs2());
    for (Eigen::Index i = 0; i + 1 < u.size(); ++i) rq += 2.0 * t.off(i) * u(i) * u(i + 1);
    values(j) = rq;
  }
}

}  // namespace

EigenPairSet eigen_lowest(const CentralMatrix& matrix, int count, const SolverOptions& options) {
  const Eigen::Index n = matrix.dim();
  require(count >= 1 && count <= n, ErrorCode::InvalidArgument,
          "requested " + std::to_string(count) + " eigenpairs from a matrix of dimension " + std::to_string(n));

  EigenPairSet out;
  out.z = matrix.z();
  out.truncation = matrix.truncation();
  out.matrix_norm = matrix.norm_inf();

  Eigen::VectorXd values;
  Eigen::MatrixXd tri_vectors;
  Eigen::MatrixXcd unit;

  if (matrix.bandwidth() == 0) {
    // diagonal: unit vectors, exactly
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return matrix.diagonal()(a) < matrix.diagonal()(b); });
    values.resize(count);
    unit = Eigen::MatrixXcd::Zero(n, count);
    for (int j = 0; j < count; ++j) {
      values(j) = matrix.diagonal()(order[static_cast<std::size_t>(j)]);
      unit(order[static_cast<std::size_t>(j)], j) = 1.0;
    }
    check_gaps(values, options, out.matrix_norm, matrix);
  } else if (matrix.bandwidth() == 1) {
    // Hermitian tridiagonal: a diagonal phase similarity makes it real
    RealTridiagonal t{matrix.diagonal(), Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 1, 0))};
    Eigen::VectorXcd phase = Eigen::VectorXcd::Ones(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const std::complex<double> h = matrix.lower()(1, i);
      const double a = std::abs(h);
      t.off(i) = a;
      phase(i + 1) = a > 0.0 ? phase(i) * (h / a) : phase(i);
    }
    lowest_tridiagonal_pairs(t, count, options, out.matrix_norm, matrix, values, tri_vectors);
    unit = phase.asDiagonal() * tri_vectors.cast<std::complex<double>>();
  } else {
    const Eigen::Tridiagonalization<Eigen::MatrixXcd> reduction(matrix.dense());
    RealTridiagonal t{reduction.diagonal().real(), reduction.subDiagonal().real()};
    lowest_tridiagonal_pairs(t, count, options, out.matrix_norm, matrix, values, tri_vectors);
    unit = reduction.matrixQ() * tri_vectors.cast<std::complex<double>>();
  }

  out.eigenvalues = values;
  out.residuals.resize(count);
  for (int j = 0; j < count; ++j) {
    const Eigen::VectorXcd u = unit.col(j);
    const double residual = (matrix.apply(u) - values(j) * u).norm();
    out.residuals(j) = residual;
    const double bound = options.residual_tolerance * (std::abs(values(j)) + out.matrix_norm);
    if (!(residual <= bound)) {
      std::ostringstream msg;
      msg << "eigenpair " << j << " residual " << residual << " exceeds " << bound << " (z = " << matrix.z()
          << ", M = " << matrix.truncation() << ", N = " << matrix.bandwidth() << ")";
      fail(ErrorCode::NumericalFailure, msg.str());
    }
    for (int i = 0; i < j; ++i) {
      const double overlap = std::abs(unit.col(i).dot(u));
      if (!(overlap <= options.orthogonality_tolerance)) {
        std::ostringstream msg;
        msg << "eigenvectors " << i << " and " << j << " overlap by " << overlap << " at z = " << matrix.z();
        fail(ErrorCode::NumericalFailure, msg.str());
      }
    }
  }
  out.eigenvectors = unit / std::sqrt(2.0 * std::numbers::pi);
  return out;
}

}  // namespace blochwp
