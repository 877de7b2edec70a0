#pragma once

// Real symmetric tridiagonal eigensolvers: implicit-shift QL (the EISPACK
// tql1/tql2 recurrences), Sturm bisection for the lowest eigenvalues and
// shifted inverse iteration for selected vectors.
// Templated on the real scalar; the matrix is given by its diagonal and
// its sub-diagonal, offdiag(i) coupling rows i and i + 1.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "blochwp/error.hpp"

namespace blochwp {

template <typename Real>
using VectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

/// Implicit-shift QL sweep. When `vectors` is non-null its columns are rotated
/// along (pass identity to obtain the eigenvectors of the tridiagonal itself).
template <typename Real>
void tridiagonal_ql(VectorX<Real>& d, VectorX<Real>& e, MatrixX<Real>* vectors, int max_iterations) {
  const Eigen::Index n = d.size();
  if (n == 0) return;
  const Real eps = std::numeric_limits<Real>::epsilon();

  for (Eigen::Index l = 0; l < n; ++l) {
    int iterations = 0;
    Eigen::Index m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const Real dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd) break;
      }
      if (m == l) break;
      if (iterations++ == max_iterations) {
        fail(ErrorCode::NumericalFailure,
             "tridiagonal QL did not converge for eigenvalue " + std::to_string(l) + " of " + std::to_string(n) +
                 " after " + std::to_string(max_iterations) + " iterations");
      }

      Real g = (d(l + 1) - d(l)) / (Real(2) * e(l));
      Real r = std::hypot(g, Real(1));
      g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
      Real s = 1, c = 1, p = 0;
      Eigen::Index i = m - 1;
      bool underflow = false;
      for (; i >= l; --i) {
        const Real f = s * e(i);
        const Real b = c * e(i);
        r = std::hypot(f, g);
        e(i + 1) = r;
        if (r == Real(0)) {
          d(i + 1) -= p;
          e(m) = 0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d(i + 1) - p;
        r = (d(i) - g) * s + Real(2) * c * b;
        p = s * r;
        d(i + 1) = g + p;
        g = c * r - b;
        if (vectors != nullptr) {
          for (Eigen::Index k = 0; k < vectors->rows(); ++k) {
            const Real t = (*vectors)(k, i + 1);
            (*vectors)(k, i + 1) = s * (*vectors)(k, i) + c * t;
            (*vectors)(k, i) = c * (*vectors)(k, i) - s * t;
          }
        }
      }
      if (underflow && i >= l) continue;
      d(l) -= p;
      e(l) = g;
      e(m) = 0;
    } while (m != l);
  }
}

/// Tridiagonal LU with partial pivoting (the dgttrf scheme) of T - shift I.
/// Zero pivots are replaced by `tiny`, which keeps inverse iteration finite
/// when the shift is an exact eigenvalue.
template <typename Real>
struct ShiftedTridiagonalLU {
  VectorX<Real> lower, diag, upper1, upper2;
  std::vector<std::uint8_t> swapped;

  ShiftedTridiagonalLU(const VectorX<Real>& d, const VectorX<Real>& off, Real shift, Real tiny) {
    const Eigen::Index n = d.size();
    diag = d.array() - shift;
    lower = off;
    upper1 = off;
    upper2 = VectorX<Real>::Zero(std::max<Eigen::Index>(n - 2, 0));
    swapped.assign(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)), 0);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (std::abs(diag(i)) >= std::abs(lower(i))) {
        if (diag(i) == Real(0)) diag(i) = tiny;
        const Real factor = lower(i) / diag(i);
        lower(i) = factor;
        diag(i + 1) -= factor * upper1(i);
      } else {
        const Real factor = diag(i) / lower(i);
        diag(i) = lower(i);
        lower(i) = factor;
        const Real t = upper1(i);
        upper1(i) = diag(i + 1);
        diag(i + 1) = t - factor * diag(i + 1);
        if (i + 2 < n) {
          upper2(i) = upper1(i + 1);
          upper1(i + 1) = -factor * upper1(i + 1);
        }
        swapped[static_cast<std::size_t>(i)] = 1;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(diag(i)) < tiny) diag(i) = std::copysign(tiny, diag(i) == Real(0) ? Real(1) : diag(i));
    }
  }

  void solve_in_place(VectorX<Real>& x) const {
    const Eigen::Index n = diag.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (swapped[static_cast<std::size_t>(i)]) {
        const Real t = x(i);
        x(i) = x(i + 1);
        x(i + 1) = t - lower(i) * x(i);
      } else {
        x(i + 1) -= lower(i) * x(i);
      }
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      Real v = x(i);
      if (i + 1 < n) v -= upper1(i) * x(i + 1);
      if (i + 2 < n) v -= upper2(i) * x(i + 2);
      x(i) = v / diag(i);
    }
  }
};

}  // namespace detail

/// All eigenvalues of a symmetric tridiagonal matrix, ascending.
template <typename Real>
VectorX<Real> tridiagonal_eigenvalues(const VectorX<Real>& diag, const VectorX<Real>& offdiag, int max_iterations = 60) {
  VectorX<Real> d = diag;
  VectorX<Real> e = VectorX<Real>::Zero(diag.size());
  e.head(offdiag.size()) = offdiag;
  detail::tridiagonal_ql<Real>(d, e, nullptr, max_iterations);
  std::sort(d.data(), d.data() + d.size());
  return d;
}

/// Number of eigenvalues strictly below x (Sturm sequence of the LDL^T pivots).
template <typename Real>
Eigen::Index sturm_count(const VectorX<Real>& diag, const VectorX<Real>& offdiag, Real x, Real pivot_floor) {
  Eigen::Index count = 0;
  Real q = diag(0) - x;
  for (Eigen::Index i = 0;; ++i) {
    if (std::abs(q) < pivot_floor) q = -pivot_floor;
    if (q < 0) ++count;
    if (i + 1 == diag.size()) break;
    q = diag(i + 1) - x - offdiag(i) * offdiag(i) / q;
  }
  return count;
}

/// The `count` smallest eigenvalues by bisection on the Sturm count, ascending,
/// each to within a few ulps of the matrix norm.
template <typename Real>
VectorX<Real> tridiagonal_lowest_eigenvalues(const VectorX<Real>& diag, const VectorX<Real>& offdiag,
                                             Eigen::Index count) {
  const Eigen::Index n = diag.size();
  Real lo = std::numeric_limits<Real>::max();
  Real hi = std::numeric_limits<Real>::lowest();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real r = (i > 0 ? std::abs(offdiag(i - 1)) : Real(0)) + (i + 1 < n ? std::abs(offdiag(i)) : Real(0));
    lo = std::min(lo, diag(i) - r);
    hi = std::max(hi, diag(i) + r);
  }
  const Real norm = std::max(std::abs(lo), std::abs(hi));
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real pivot_floor = std::max(norm, Real(1)) * eps * eps;
  lo -= 2 * eps * norm + pivot_floor;
  hi += 2 * eps * norm + pivot_floor;

  VectorX<Real> out(count);
  Real left = lo;
  for (Eigen::Index k = 0; k < count; ++k) {
    // k-th eigenvalue: smallest x with more than k eigenvalues below it
    Real a = left, b = hi;
    while (b - a > 2 * eps * (std::abs(a) + std::abs(b)) + pivot_floor) {
      const Real mid = a + (b - a) / 2;
      if (mid <= a || mid >= b) break;
      if (sturm_count<Real>(diag, offdiag, mid, pivot_floor) > k) b = mid;
      else a = mid;
    }
    out(k) = a + (b - a) / 2;
    left = a;
  }
  return out;
}

template <typename Real>
struct TridiagonalEigensystem {
  VectorX<Real> eigenvalues;
  MatrixX<Real> eigenvectors;
};

/// Full eigensystem by QL with accumulated rotations, ascending eigenvalues.
template <typename Real>
TridiagonalEigensystem<Real> tridiagonal_eigensystem(const VectorX<Real>& diag, const VectorX<Real>& offdiag,
                                                     int max_iterations = 60) {
  VectorX<Real> d = diag;
  VectorX<Real> e = VectorX<Real>::Zero(diag.size());
  e.head(offdiag.size()) = offdiag;
  MatrixX<Real> z = MatrixX<Real>::Identity(diag.size(), diag.size());
  detail::tridiagonal_ql<Real>(d, e, &z, max_iterations);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d(a) < d(b); });
  TridiagonalEigensystem<Real> out{VectorX<Real>(d.size()), MatrixX<Real>(d.size(), d.size())};
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.eigenvalues(static_cast<Eigen::Index>(k)) = d(order[k]);
    out.eigenvectors.col(static_cast<Eigen::Index>(k)) = z.col(order[k]);
  }
  return out;
}

/// Unit eigenvector for the (already accurate) eigenvalue `shift` by inverse
/// iteration, orthogonalized against `previous` unit vectors.
template <typename Real>
VectorX<Real> tridiagonal_inverse_iteration(const VectorX<Real>& diag, const VectorX<Real>& offdiag, Real shift,
                                            std::span<const VectorX<Real>> previous, int iterations = 3) {
  const Eigen::Index n = diag.size();
  const Real scale = std::max(diag.cwiseAbs().maxCoeff() + Real(2) * (offdiag.size() ? offdiag.cwiseAbs().maxCoeff() : 0),
                              std::numeric_limits<Real>::min());
  const Real tiny = std::numeric_limits<Real>::epsilon() * scale;
  const detail::ShiftedTridiagonalLU<Real> lu(diag, offdiag, shift, tiny);

  // deterministic, non-symmetric start vector
  VectorX<Real> x(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (Eigen::Index i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    x(i) = Real(0.5) + Real(state >> 11) / Real(1ull << 53);
  }
  x.normalize();

  auto orthogonalize = [&](VectorX<Real>& v) {
    for (const auto& p : previous) v -= p.dot(v) * p;
  };
  for (int it = 0; it < iterations; ++it) {
    lu.solve_in_place(x);
    orthogonalize(x);
    const Real norm = x.norm();
    require(std::isfinite(norm) && norm > Real(0), ErrorCode::NumericalFailure, "inverse iteration collapsed");
    x /= norm;
  }
  orthogonalize(x);
  x.normalize();
  return x;
}

}  // namespace blochwp
