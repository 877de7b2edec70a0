#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace blochwp {

/// Composite Simpson weights for `count` equally spaced samples. An odd
/// number of intervals closes with the Simpson 3/8 panel; two samples fall
/// back to the trapezoid.
inline Eigen::VectorXd simpson_weights(Eigen::Index count, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(count);
  if (count < 2) return w;
  if (count == 2) {
    w.setConstant(h / 2.0);
    return w;
  }
  const Eigen::Index intervals = count - 1;
  const Eigen::Index simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
  for (Eigen::Index i = 0; i + 2 <= simpson_end; i += 2) {
    w(i) += h / 3.0;
    w(i + 1) += 4.0 * h / 3.0;
    w(i + 2) += h / 3.0;
  }
  if (simpson_end != intervals) {
    const Eigen::Index i = simpson_end;
    w(i) += 3.0 * h / 8.0;
    w(i + 1) += 9.0 * h / 8.0;
    w(i + 2) += 9.0 * h / 8.0;
    w(i + 3) += 3.0 * h / 8.0;
  }
  return w;
}

template <typename Derived>
typename Derived::Scalar simpson(const Eigen::MatrixBase<Derived>& values, double h) {
  return simpson_weights(values.size(), h).template cast<typename Derived::Scalar>().dot(values.derived());
}

/// Four-point Lagrange interpolation of samples on the uniform grid
/// x_i = x0 + i h. Stencils are shifted inward at the ends of the range.
template <typename Derived>
typename Derived::Scalar cubic_interpolate(const Eigen::MatrixBase<Derived>& values, double x0, double h, double x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = values.size();
  const double s = (x - x0) / h;
  const auto nearest = static_cast<Eigen::Index>(std::llround(s));
  if (nearest >= 0 && nearest < n && std::abs(s - double(nearest)) < 1e-12) return values(nearest);
  if (n < 4) {
    const Eigen::Index i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(s)), 0, n - 2);
    const double t = s - double(i);
    return values(i) * Scalar(1.0 - t) + values(i + 1) * Scalar(t);
  }
  const Eigen::Index i0 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(s)) - 1, 0, n - 4);
  const double t = s - double(i0);
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return values(i0) * Scalar(l0) + values(i0 + 1) * Scalar(l1) + values(i0 + 2) * Scalar(l2) +
         values(i0 + 3) * Scalar(l3);
}

}  // namespace blochwp
