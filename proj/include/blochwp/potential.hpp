#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace blochwp {

using Complex = std::complex<double>;

/// One positive harmonic of a real periodic potential, V_n = re + i im for n > 0.
struct Harmonic {
  int n = 1;
  double re = 0.0;
  double im = 0.0;
};

/// Real periodic potential with finitely many Fourier components,
/// V(x) = sum_{|n| <= N} V_n exp(i n q x), with V_{-n} = conj(V_n).
///
/// Coefficients are stored sparsely; exact zeros are dropped so that the
/// highest stored harmonic is the order N. Immutable after construction.
class FourierPotential {
 public:
  using Coefficients = std::map<int, Complex>;

  /// Takes the full coefficient map, both signs of n. Throws invalid-argument
  /// when q <= 0 or when the map is not Hermitian-symmetric.
  FourierPotential(double q, Coefficients coefficients);

  /// Builds the map from positive harmonics plus a real offset, completing
  /// V_{-n} = conj(V_n) automatically.
  static FourierPotential from_harmonics(double q, double v0, const std::vector<Harmonic>& harmonics);

  /// Potential with no harmonics at all (V = 0).
  static FourierPotential free(double q = 1.0);

  double q() const noexcept { return q_; }
  double period() const noexcept;
  int order() const noexcept { return order_; }
  const Coefficients& coefficients() const noexcept { return coefficients_; }
  Complex coefficient(int n) const;
  double max_abs_coefficient() const noexcept;
  bool is_real_symmetric() const noexcept;

  /// Same shape with every coefficient multiplied by `factor`, reciprocal period replaced by `q`.
  FourierPotential rescaled(double factor, double q) const;

  /// FNV-1a over q and the (n, re, im) triples.
  std::uint64_t fingerprint() const noexcept;

 private:
  double q_;
  Coefficients coefficients_;
  int order_ = 0;
};

/// A cos(q x): V_{+1} = V_{-1} = A/2.
FourierPotential make_cosine(double amplitude, double q);

/// Dimensionless cosine potential of strength alpha in units where the
/// kinetic term of the central equation is (z + n)^2: V~_{+1} = V~_{-1} = alpha.
FourierPotential cosine_potential(double alpha);

double evaluate(const FourierPotential& potential, double x);

/// alpha = mu A / (hbar^2 q^2).
double dimensionless_strength(double amplitude, double mu, double hbar, double q);

/// Converts to the internal convention (q = 1, energies in units of
/// hbar^2 q^2 / (2 mu)), so V~_n = 2 mu V_n / (hbar q)^2.
FourierPotential to_dimensionless(const FourierPotential& potential, double mu, double hbar);

}  // namespace blochwp
