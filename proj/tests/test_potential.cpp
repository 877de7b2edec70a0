#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blochwp/error.hpp"
#include "blochwp/potential.hpp"

using namespace blochwp;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

FourierPotential two_harmonic() {
  return FourierPotential::from_harmonics(1.3, 0.2, {{1, 0.7, -0.4}, {3, -0.25, 0.6}});
}

}  // namespace

TEST(MakeCosine, CoefficientsAreHalfAmplitude) {
  const FourierPotential p = make_cosine(2.0, 1.0);
  EXPECT_EQ(p.order(), 1);
  EXPECT_EQ(p.coefficient(1), Complex(1.0, 0.0));
  EXPECT_EQ(p.coefficient(-1), Complex(1.0, 0.0));
  EXPECT_EQ(p.coefficient(0), Complex(0.0, 0.0));
  EXPECT_EQ(p.coefficients().size(), 2u);
}

TEST(MakeCosine, RejectsNonPositiveArguments) {
  EXPECT_EQ(code_of([] { make_cosine(0.0, 1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { make_cosine(-1.0, 1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { make_cosine(1.0, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(Evaluate, CosineValues) {
  EXPECT_DOUBLE_EQ(evaluate(make_cosine(2.0, 1.0), 0.0), 2.0);
  const FourierPotential p = make_cosine(1.0, 1.0);
  EXPECT_NEAR(evaluate(p, kPi), -1.0, 1e-15);
  EXPECT_NEAR(evaluate(p, kPi / 2), 0.0, 1e-15);
  const double x0 = 0.8137;
  EXPECT_NEAR(evaluate(p, x0), evaluate(p, x0 + 2 * kPi), 1e-14);
}

TEST(Evaluate, MatchesRealSeries) {
  // V(x) = v0 + sum_n 2 (re cos(n q x) - im sin(n q x))
  const FourierPotential p = two_harmonic();
  for (double x : {-2.0, 0.0, 0.4, 1.7, 5.5}) {
    const double expected = 0.2 + 2 * (0.7 * std::cos(1.3 * x) + 0.4 * std::sin(1.3 * x)) +
                            2 * (-0.25 * std::cos(3 * 1.3 * x) - 0.6 * std::sin(3 * 1.3 * x));
    EXPECT_NEAR(evaluate(p, x), expected, 1e-14);
  }
}

TEST(Evaluate, PeriodicOverRandomPoints) {
  const FourierPotential p = two_harmonic();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int k = 0; k < 100; ++k) {
    const double x = dist(rng);
    const double v = evaluate(p, x);
    EXPECT_NEAR(evaluate(p, x + p.period()), v, 1e-13 * std::max(1.0, std::abs(v)));
  }
}

TEST(FourierPotential, CompletesHermitianPartner) {
  const FourierPotential p = two_harmonic();
  EXPECT_EQ(p.order(), 3);
  EXPECT_EQ(p.coefficient(-1), std::conj(p.coefficient(1)));
  EXPECT_EQ(p.coefficient(-3), std::conj(p.coefficient(3)));
  EXPECT_EQ(p.coefficient(2), Complex(0.0, 0.0));
  EXPECT_FALSE(p.is_real_symmetric());
  EXPECT_TRUE(make_cosine(1.0, 1.0).is_real_symmetric());
}

TEST(FourierPotential, RejectsNonHermitianMap) {
  EXPECT_EQ(code_of([] { FourierPotential(1.0, {{1, Complex(1.0, 0.5)}, {-1, Complex(1.0, 0.5)}}); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { FourierPotential(1.0, {{2, Complex(1.0, 0.0)}}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { FourierPotential(1.0, {{0, Complex(1.0, 0.1)}}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { FourierPotential(-1.0, {}); }), ErrorCode::InvalidArgument);
}

TEST(FourierPotential, FreeHasOrderZero) {
  const FourierPotential p = FourierPotential::free();
  EXPECT_EQ(p.order(), 0);
  EXPECT_EQ(evaluate(p, 1.234), 0.0);
}

TEST(FourierPotential, FingerprintSeparatesPotentials) {
  EXPECT_EQ(make_cosine(1.0, 1.0).fingerprint(), make_cosine(1.0, 1.0).fingerprint());
  EXPECT_NE(make_cosine(1.0, 1.0).fingerprint(), make_cosine(1.0 + 1e-15, 1.0).fingerprint());
  EXPECT_NE(make_cosine(1.0, 1.0).fingerprint(), make_cosine(1.0, 2.0).fingerprint());
}

TEST(DimensionlessStrength, Formula) {
  EXPECT_DOUBLE_EQ(dimensionless_strength(1.0, 1.0, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(dimensionless_strength(2.0, 1.0, 1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(dimensionless_strength(1.0, 4.0, 2.0, 1.0), 1.0);
  EXPECT_EQ(code_of([] { dimensionless_strength(1.0, 0.0, 1.0, 1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { dimensionless_strength(-1.0, 1.0, 1.0, 1.0); }), ErrorCode::InvalidArgument);
}

TEST(ToDimensionless, CosineBecomesAlpha) {
  // V~_{+-1} = 2 mu (A/2) / (hbar q)^2 = alpha
  const double A = 3.0, mu = 0.7, hbar = 1.1, q = 2.5;
  const FourierPotential p = to_dimensionless(make_cosine(A, q), mu, hbar);
  const double alpha = dimensionless_strength(A, mu, hbar, q);
  EXPECT_DOUBLE_EQ(p.q(), 1.0);
  EXPECT_NEAR(p.coefficient(1).real(), alpha, 1e-15);
  EXPECT_NEAR(p.coefficient(-1).real(), alpha, 1e-15);
  EXPECT_EQ(cosine_potential(alpha).coefficient(1), Complex(alpha, 0.0));
}
