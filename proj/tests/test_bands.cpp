#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "blochwp/bands.hpp"
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
  return FourierPotential::from_harmonics(1.0, 0.0, {{1, 0.6, -0.3}, {2, 0.2, 0.25}});
}

}  // namespace

TEST(BrillouinGrid, DefaultLayout) {
  const BrillouinGrid grid;
  EXPECT_EQ(grid.count(), 2001);
  EXPECT_EQ(grid.margin(), 1e-6);
  EXPECT_EQ(grid[grid.zero_index()], 0.0);
  EXPECT_EQ(grid[0], -(0.5 - 1e-6));
  EXPECT_EQ(grid[2000], 0.5 - 1e-6);
  for (Eigen::Index i = 0; i < grid.count(); ++i) {
    EXPECT_EQ(grid[i], -grid[grid.count() - 1 - i]);
    if (i > 0) {
      EXPECT_GT(grid[i], grid[i - 1]);
      EXPECT_NEAR(grid[i] - grid[i - 1], grid.spacing(), 1e-15);
    }
  }
}

TEST(BrillouinGrid, RejectsBadShapes) {
  EXPECT_EQ(code_of([] { BrillouinGrid(2000); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { BrillouinGrid(1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { BrillouinGrid(11, 0.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { BrillouinGrid(11, 0.5); }), ErrorCode::InvalidArgument);
}

TEST(ComputeBands, FreeParticleParabola) {
  const BandTable t = compute_bands(FourierPotential::free(), BrillouinGrid(), 0, 5);
  for (Eigen::Index i = 0; i < t.grid.count(); ++i) {
    EXPECT_NEAR(t.energies(0, i), t.grid[i] * t.grid[i], 1e-15);
    EXPECT_EQ(t.coefficient(0, i, 0), std::complex<double>(1.0 / std::sqrt(kTwoPi), 0.0));
  }
}

TEST(ComputeBands, WeakCosineGroundEnergy) {
  const BandTable t = compute_bands(cosine_potential(0.01), BrillouinGrid(), 0, 100);
  const double e0 = t.energies(0, t.grid.zero_index());
  EXPECT_NEAR(e0, -2e-4, 0.05 * 2e-4);
}

TEST(ComputeBands, UnitCosineBandsAreGapped) {
  const BandTable t = compute_bands(cosine_potential(1.0), BrillouinGrid(401), 1, 100);
  EXPECT_GT(t.energies.row(1).minCoeff() - t.energies.row(0).maxCoeff(), 0.0);
}

TEST(ComputeBands, TableInvariants) {
  const BandTable t = compute_bands(complex_potential(), BrillouinGrid(201), 3, 40);
  for (int j = 0; j <= 3; ++j) {
    const auto& f = t.coefficients[j];
    for (Eigen::Index i = 0; i < t.grid.count(); ++i) {
      EXPECT_NEAR(f.col(i).squaredNorm(), 1.0 / kTwoPi, 1e-12);
      // ties within 1e-12 go to the lowest index
      const Eigen::VectorXd m = f.col(i).cwiseAbs();
      Eigen::Index big = 0;
      while (m(big) < m.maxCoeff() * (1.0 - 1e-12)) ++big;
      EXPECT_EQ(f(big, i).imag(), 0.0);
      EXPECT_GT(f(big, i).real(), 0.0);
    }
  }
}

TEST(ComputeBands, TimeReversalSymmetryForCosine) {
  const BandTable t = compute_bands(cosine_potential(2.0), BrillouinGrid(401), 2, 100);
  for (int j = 0; j <= 2; ++j) {
    for (Eigen::Index i = 0; i < t.grid.count(); ++i) {
      EXPECT_NEAR(t.energies(j, i), t.energies(j, t.grid.count() - 1 - i), 1e-10);
    }
  }
}

TEST(ComputeBands, ResolvingReproducesEnergies) {
  const BandTable t = compute_bands(complex_potential(), BrillouinGrid(101), 2, 40);
  for (Eigen::Index i = 0; i < t.grid.count(); i += 7) {
    const EigenPairSet again = solve_gauged(complex_potential(), t.grid[i], 40, 3);
    for (int j = 0; j <= 2; ++j) EXPECT_NEAR(again.eigenvalues(j), t.energies(j, i), 1e-12);
  }
}

TEST(ComputeBands, ParallelMatchesSerialExactly) {
  const BandTable serial = compute_bands(complex_potential(), BrillouinGrid(301), 2, 30);
  const BandTable parallel = compute_bands(complex_potential(), BrillouinGrid(301), 2, 30, {{}, 4});
  EXPECT_EQ(serial.energies, parallel.energies);
  for (int j = 0; j <= 2; ++j) EXPECT_EQ(serial.coefficients[j], parallel.coefficients[j]);
}

TEST(ComputeBands, TouchingBandsAreRejected) {
  // a pure second harmonic leaves the first gap closed at the zone boundary
  const FourierPotential p = FourierPotential::from_harmonics(1.0, 0.0, {{2, 0.3, 0.0}});
  EXPECT_EQ(code_of([&] { compute_bands(p, BrillouinGrid(101), 1, 50); }), ErrorCode::DegenerateBands);
  EXPECT_NO_THROW(compute_bands(p, BrillouinGrid(101), 0, 50));
}

TEST(ComputeBands, Preconditions) {
  EXPECT_EQ(code_of([] { compute_bands(complex_potential(), BrillouinGrid(11), 0, 1); }),
            ErrorCode::TruncationTooSmall);
  EXPECT_EQ(code_of([] { compute_bands(cosine_potential(1.0), BrillouinGrid(11), -1, 10); }),
            ErrorCode::InvalidArgument);
}

TEST(GaugeFix, RotatesLargestEntryToPositiveReal) {
  const double c = 1.0 / std::sqrt(kTwoPi);
  Eigen::VectorXcd v(3);
  v << 0.0, std::complex<double>(0.0, c), 0.0;
  const Eigen::VectorXcd g = gauge_fix(v);
  EXPECT_EQ(g(0), 0.0);
  EXPECT_EQ(g(1), std::complex<double>(c, 0.0));
  EXPECT_EQ(g(2), 0.0);
}

TEST(GaugeFix, IdempotentAndPhaseInvariant) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(9);
  for (auto& x : v) x = {g(rng), g(rng)};
  const Eigen::VectorXcd fixed = gauge_fix(v);
  EXPECT_EQ(gauge_fix(fixed), fixed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXcd rotated = gauge_fix(v * std::polar(1.0, angle(rng)));
    EXPECT_LE((rotated - fixed).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(GaugeFix, TiesGoToLowestIndex) {
  Eigen::VectorXcd v(3);
  v << std::complex<double>(0.0, 1.0), 0.5, std::complex<double>(-1.0, 0.0);
  const Eigen::VectorXcd g = gauge_fix(v);
  EXPECT_EQ(g(0), 1.0);
  EXPECT_NEAR(std::abs(g(2) - std::complex<double>(0.0, 1.0)), 0.0, 1e-15);
}

TEST(GaugeFix, RejectsZeroVector) {
  EXPECT_EQ(code_of([] { gauge_fix(Eigen::VectorXcd::Zero(4)); }), ErrorCode::InvalidArgument);
}

TEST(Convergence, UnitCosineConvergedAtDefaultTruncation) {
  const ConvergenceReport r = check_convergence(cosine_potential(1.0), BrillouinGrid(), 0, 100);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.doubled_truncation, 200);
  EXPECT_LT(r.max_energy_deviation, 1e-10);
}

TEST(Convergence, UnderTruncatedStrongCosineFails) {
  // four bands at M = 10 move by ~5e-9 when M doubles
  const ConvergenceReport four = check_convergence(cosine_potential(10.0), BrillouinGrid(201), 3, 10);
  EXPECT_FALSE(four.pass);
  EXPECT_GT(four.max_energy_deviation, 1e-10);
  // the lowest band alone is already converged at M = 10 but not at M = 8
  EXPECT_TRUE(check_convergence(cosine_potential(10.0), BrillouinGrid(201), 0, 10).pass);
  const ConvergenceReport low = check_convergence(cosine_potential(10.0), BrillouinGrid(201), 0, 8);
  EXPECT_FALSE(low.pass);
  EXPECT_GT(low.max_lambda_sum_deviation, 1e-10);
}

TEST(Convergence, FreeParticleIsExact) {
  for (int m : {1, 3, 8}) {
    const ConvergenceReport r = check_convergence(FourierPotential::free(), BrillouinGrid(101), 0, m);
    EXPECT_EQ(r.max_energy_deviation, 0.0);
    EXPECT_EQ(r.max_lambda_sum_deviation, 0.0);
  }
}

TEST(Convergence, EscalationFindsPassingTruncation) {
  const ConvergedBands c = compute_bands_converged(cosine_potential(10.0), BrillouinGrid(201), 3, 10);
  EXPECT_TRUE(c.report.pass);
  EXPECT_EQ(c.table.truncation, 20);
  EXPECT_EQ(code_of([] { compute_bands_converged(cosine_potential(10.0), BrillouinGrid(201), 0, 4, 8); }),
            ErrorCode::NumericalFailure);
}

TEST(BandFile, RoundTripIsBitIdentical) {
  const BandTable t = compute_bands(complex_potential(), BrillouinGrid(51), 1, 12);
  std::stringstream first;
  write_band_table(first, t);
  const std::string text = first.str();
  std::istringstream in(text);
  const BandTable back = read_band_table(in);
  EXPECT_EQ(back.energies, t.energies);
  EXPECT_EQ(back.coefficients[0], t.coefficients[0]);
  EXPECT_EQ(back.coefficients[1], t.coefficients[1]);
  EXPECT_EQ(back.grid, t.grid);
  EXPECT_EQ(back.fingerprint(), t.fingerprint());
  std::stringstream second;
  write_band_table(second, back);
  EXPECT_EQ(second.str(), text);
}

TEST(BandFile, LayoutAndRowCount) {
  const BandTable t = compute_bands(cosine_potential(1.0), BrillouinGrid(21), 1, 3);
  std::stringstream s;
  write_band_table(s, t, {{"command", "bands"}});
  std::string line;
  std::getline(s, line);
  const auto header = nlohmann::json::parse(line);
  EXPECT_EQ(header.at("M"), 3);
  EXPECT_EQ(header.at("J_max"), 1);
  EXPECT_EQ(header.at("command"), "bands");
  EXPECT_EQ(header.at("grid").at("count"), 21);
  std::getline(s, line);
  EXPECT_EQ(line, "z,j,epsilon,re_f-3,im_f-3,re_f-2,im_f-2,re_f-1,im_f-1,re_f0,im_f0,re_f1,im_f1,re_f2,im_f2,re_f3,im_f3");
  int rows = 0;
  while (std::getline(s, line)) ++rows;
  EXPECT_EQ(rows, 42);
}

TEST(BandFile, RejectsDamagedInput) {
  const BandTable t = compute_bands(cosine_potential(1.0), BrillouinGrid(11), 0, 2);
  std::stringstream s;
  write_band_table(s, t);
  std::string text = s.str();
  std::istringstream truncated(text.substr(0, text.size() - 30));
  EXPECT_EQ(code_of([&] { read_band_table(truncated); }), ErrorCode::InvalidArgument);
  std::istringstream garbage("not json\n");
  EXPECT_EQ(code_of([&] { read_band_table(garbage); }), ErrorCode::InvalidArgument);
}
