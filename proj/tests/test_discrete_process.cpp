#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "hcwalk/closed_form.hpp"
#include "hcwalk/discrete_process.hpp"
#include "oracles.hpp"

using namespace hcwalk;

namespace {
constexpr double kT = std::numbers::pi / 2.0;

DensityMatrix corner(int d) { return DensityMatrix::vertex(d, corner_start()); }

// Max over the grid of |discrete - continuous| hitting probability.
double discrete_error(int d, double lambda, double step, const std::vector<double>& grid) {
  const WalkParams params{d, 1.0, lambda};
  const DiscreteTrajectory disc =
      evolve_discrete(corner(d), params, MeasurementFamily::vertex(d), step, lambda * step, grid);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const oracle::CMatrix rho = oracle::evolve_expm(corner(d).matrix(), d, 1.0, lambda, 1, grid[i]);
    err = std::max(err, std::abs(disc.hitting[i] - rho((1 << d) - 1, (1 << d) - 1).real()));
  }
  return err;
}
}  // namespace

TEST(MeasurementFamily, ProjectorCounts) {
  const MeasurementFamily v = MeasurementFamily::vertex(3);
  EXPECT_EQ(v.measurement_count(), 1);
  EXPECT_EQ(v.shared_projectors(5, 5), 1);
  EXPECT_EQ(v.shared_projectors(5, 4), 0);
  const MeasurementFamily s = MeasurementFamily::subspace(3);
  EXPECT_EQ(s.measurement_count(), 3);
  EXPECT_EQ(s.shared_projectors(5, 5), 3);
  EXPECT_EQ(s.shared_projectors(5, 3), 1);  // 101 vs 011 agree only in bit 0
  EXPECT_THROW(MeasurementFamily({}), InvalidArgument);
  EXPECT_THROW(MeasurementFamily({{0, 1}, {0, 1, 2}}), InvalidArgument);
}

TEST(UnitaryPropagator, MatchesMatrixExponential) {
  for (int d = 1; d <= 4; ++d) {
    const oracle::CMatrix expected =
        (oracle::Complex{0.0, -0.37} * oracle::kron_hamiltonian(d, 1.4).cast<oracle::Complex>()).exp();
    EXPECT_LT((unitary_propagator({d, 1.4, 0.0}, 0.37) - expected).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(DiscreteStep, ZeroProbabilityIsUnitaryConjugation) {
  const WalkParams params{2, 1.0, 0.0};
  const ComplexMatrix u = unitary_propagator(params, 0.3);
  const DensityMatrix rho = corner(2);
  const DensityMatrix out = discrete_measured_step(rho, u, MeasurementFamily::subspace(2), 0.0);
  EXPECT_LT((out.matrix() - u * rho.matrix() * u.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DiscreteStep, CompleteVertexMeasurementDephasesFully) {
  const WalkParams params{3, 1.0, 0.0};
  const ComplexMatrix u = unitary_propagator(params, 0.4);
  const DensityMatrix out = discrete_measured_step(corner(3), u, MeasurementFamily::vertex(3), 1.0);
  const ComplexMatrix sigma = u * corner(3).matrix() * u.adjoint();
  for (Eigen::Index y = 0; y < 8; ++y)
    for (Eigen::Index x = 0; x < 8; ++x)
      EXPECT_LT(std::abs(out.matrix()(x, y) - (x == y ? sigma(x, y) : Complex{})), 1e-15);
  EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-14);
}

TEST(DiscreteStep, SubspaceFamilyAtMaximalProbability) {
  // m p = 1 with the subspace family leaves an entry differing in k bits
  // scaled by (d - k)/d.
  const int d = 3;
  const ComplexMatrix u = unitary_propagator({d, 1.0, 0.0}, 0.5);
  const DensityMatrix out = discrete_measured_step(corner(d), u, MeasurementFamily::subspace(d), 1.0 / d);
  const ComplexMatrix sigma = u * corner(d).matrix() * u.adjoint();
  for (Eigen::Index y = 0; y < 8; ++y)
    for (Eigen::Index x = 0; x < 8; ++x) {
      const double scale = static_cast<double>(d - std::popcount(static_cast<unsigned>(x ^ y))) / d;
      EXPECT_LT(std::abs(out.matrix()(x, y) - scale * sigma(x, y)), 1e-15);
    }
}

TEST(DiscreteStep, RejectsOverfullProbability) {
  const ComplexMatrix u = unitary_propagator({2, 1.0, 0.0}, 0.1);
  EXPECT_THROW((void)discrete_measured_step(corner(2), u, MeasurementFamily::subspace(2), 0.51), InvalidArgument);
  EXPECT_THROW((void)discrete_measured_step(corner(2), u, MeasurementFamily::vertex(2), 1.01), InvalidArgument);
  EXPECT_THROW((void)discrete_measured_step(corner(2), u, MeasurementFamily::vertex(2), -0.1), InvalidArgument);
  EXPECT_THROW((void)discrete_measured_step(corner(2), u, MeasurementFamily::vertex(3), 0.1), InvalidArgument);
}

TEST(EvolveDiscrete, GridMustBeStepMultiple) {
  const WalkParams params{1, 1.0, 0.2};
  EXPECT_THROW((void)evolve_discrete(corner(1), params, MeasurementFamily::vertex(1), 0.01, 0.002,
                                     std::vector<double>{0.0, 0.015}),
               InvalidArgument);
  const auto tr = evolve_discrete(corner(1), params, MeasurementFamily::vertex(1), 0.01, 0.002,
                                  std::vector<double>{0.0, 0.02, 0.05});
  EXPECT_EQ(tr.hitting.size(), 3U);
}

TEST(EvolveDiscrete, ErrorHalvesWithStep) {
  const std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  for (int d = 1; d <= 3; ++d) {
    const double coarse = discrete_error(d, 0.2, 1e-2, grid);
    const double fine = discrete_error(d, 0.2, 5e-3, grid);
    EXPECT_GT(coarse / fine, 1.8) << "d=" << d;
    EXPECT_LT(coarse / fine, 2.2) << "d=" << d;
  }
}

TEST(EvolveDiscrete, EquivalentProbabilityTracksContinuousDeficit) {
  // With p = 2 lambda T / (pi d) the discrete decay e^{-dp} stays within
  // 15% of the perturbative P_v(T).
  for (int d = 1; d <= 10; ++d) {
    const double p = kendon_tregenna_probability(0.2, kT, d);
    const double pv = vertex_hitting_perturbative({d, 1.0, 0.2}, kT);
    EXPECT_LT(std::abs(std::exp(-d * p) - pv) / pv, 0.15) << "d=" << d;
  }
}
