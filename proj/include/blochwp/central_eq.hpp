#pragma once

#include <Eigen/Core>

#include <complex>

#include "blochwp/potential.hpp"

namespace blochwp {

/// Truncated central-equation matrix at dimensionless quasi-momentum z,
///
///   H(n, m) = (z + n)^2 delta_{nm} + V_{n-m},   n, m in [-M, M],
///
/// with V in the internal energy unit hbar^2 q^2 / (2 mu). Row n holds the
/// equation for f_n. Stored as a Hermitian band: the real diagonal and the
/// N sub-diagonals, lower(k, i) = H(i + k, i).
class CentralMatrix {
 public:
  CentralMatrix(double z, int truncation, Eigen::VectorXd diagonal, Eigen::MatrixXcd lower);

  double z() const noexcept { return z_; }
  int truncation() const noexcept { return truncation_; }
  int bandwidth() const noexcept { return static_cast<int>(lower_.rows()) - 1; }
  Eigen::Index dim() const noexcept { return diagonal_.size(); }

  /// Storage index of Fourier harmonic n.
  Eigen::Index index_of(int n) const noexcept { return n + truncation_; }

  const Eigen::VectorXd& diagonal() const noexcept { return diagonal_; }
  const Eigen::MatrixXcd& lower() const noexcept { return lower_; }

  std::complex<double> operator()(Eigen::Index row, Eigen::Index col) const;

  Eigen::MatrixXcd dense() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

  /// Maximum absolute row sum.
  double norm_inf() const;
  bool is_real() const;

 private:
  double z_;
  int truncation_;
  Eigen::VectorXd diagonal_;
  Eigen::MatrixXcd lower_;
};

/// Throws zone-boundary-excluded when |z| >= 1/2 and truncation-too-small when M < N.
CentralMatrix build_central_matrix(const FourierPotential& potential, double z, int truncation);

struct SolverOptions {
  /// Gaps below this times ||H||_inf count as touching bands.
  double degeneracy_tolerance = 1e-9;
  /// Accepted residual ||H f - e f|| / (|e| + ||H||_inf) for unit f.
  double residual_tolerance = 1e-10;
  double orthogonality_tolerance = 1e-10;
};

/// Lowest eigenpairs of one central matrix. Eigenvectors are columns indexed
/// by harmonic n = -M..M, normalized to sum |f_n|^2 = 1/(2 pi); their phase is
/// whatever the solver produced.
struct EigenPairSet {
  double z = 0.0;
  int truncation = 0;
  double matrix_norm = 0.0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  /// ||H u - e u|| for the unit-normalized u.
  Eigen::VectorXd residuals;
};

EigenPairSet eigen_lowest(const CentralMatrix& matrix, int count, const SolverOptions& options = {});

}  // namespace blochwp
