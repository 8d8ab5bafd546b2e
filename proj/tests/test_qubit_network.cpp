#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "hcwalk/closed_form.hpp"
#include "hcwalk/dynamics.hpp"
#include "hcwalk/qubit_network.hpp"
#include "oracles.hpp"

using namespace hcwalk;

namespace {

// Full qubit-space evolution restricted back to {ground} + single excitations.
ExcitationState oracle_network(const RealMatrix& coupling, double t1, double tphi, bool collective,
                               Eigen::Index start, double t) {
  const auto qubits = coupling.rows();
  const auto dim = Eigen::Index{1} << qubits;
  const oracle::CMatrix gen = oracle::network_generator(coupling, t1, tphi, collective);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim * dim);
  const Eigen::Index s = Eigen::Index{1} << start;
  v(s * dim + s) = 1.0;
  const Eigen::VectorXcd out = (gen * t).exp() * v;
  ExcitationState state{out(0).real(), ComplexMatrix::Zero(qubits, qubits)};
  for (Eigen::Index x = 0; x < qubits; ++x)
    for (Eigen::Index y = 0; y < qubits; ++y) state.block(x, y) = out((Eigen::Index{1} << x) * dim + (Eigen::Index{1} << y));
  return state;
}

RealMatrix ring_with_chord() {
  RealMatrix c = RealMatrix::Zero(4, 4);
  c(0, 1) = c(1, 0) = 1.0;
  c(1, 2) = c(2, 1) = 0.7;
  c(2, 3) = c(3, 2) = 1.2;
  c(3, 0) = c(0, 3) = 0.4;
  c(0, 2) = c(2, 0) = 0.3;
  return c;
}

double block_distance(const ExcitationState& a, const ExcitationState& b) {
  return std::max(std::abs(a.ground - b.ground), (a.block - b.block).cwiseAbs().maxCoeff());
}

}  // namespace

TEST(CouplingMatrix, HypercubeMatchesHamiltonian) {
  for (int d = 1; d <= 4; ++d) {
    const CouplingMatrix c = hypercube_coupling(d, 0.6);
    EXPECT_EQ(c.size(), Eigen::Index{1} << d);
    EXPECT_EQ(c.matrix(), build_hamiltonian({d, 0.6, 0.0}));
    for (Eigen::Index x = 0; x < c.size(); ++x) EXPECT_EQ((c.matrix().row(x).array() != 0.0).count(), d);
  }
  RealMatrix one(2, 2);
  one << 0, 1, 1, 0;
  EXPECT_EQ(hypercube_coupling(1, 1.0).matrix(), one);
}

TEST(CouplingMatrix, RejectsInvalidMatrices) {
  RealMatrix asym = RealMatrix::Zero(2, 2);
  asym(0, 1) = 1.0;
  EXPECT_THROW(CouplingMatrix{asym}, InvalidArgument);
  RealMatrix diag = RealMatrix::Identity(2, 2);
  EXPECT_THROW(CouplingMatrix{diag}, InvalidArgument);
  EXPECT_THROW(CouplingMatrix{RealMatrix::Zero(2, 3)}, InvalidArgument);
}

TEST(CouplingCsv, ParsesSquareMatrix) {
  std::istringstream in("0, 1.5,0\n1.5,0,2\n\n0,2,0\n");
  const CouplingMatrix c = parse_coupling_csv(in);
  EXPECT_EQ(c.size(), 3);
  EXPECT_EQ(c.matrix()(1, 2), 2.0);
  std::istringstream ragged("0,1\n1\n");
  EXPECT_THROW((void)parse_coupling_csv(ragged), InvalidArgument);
  std::istringstream junk("0,x\nx,0\n");
  EXPECT_THROW((void)parse_coupling_csv(junk), InvalidArgument);
  std::istringstream empty("");
  EXPECT_THROW((void)parse_coupling_csv(empty), InvalidArgument);
  EXPECT_THROW((void)load_coupling_csv("/nonexistent/coupling.csv"), Error);
}

TEST(NetworkIndependent, MatchesFullQubitSpace) {
  const std::vector<double> grid{0.0, 0.4, 1.1, 2.0};
  struct Case {
    RealMatrix coupling;
    double t1, tphi;
  };
  RealMatrix pair(2, 2);
  pair << 0, 0.9, 0.9, 0;
  for (const Case& c : {Case{pair, 3.0, 2.0}, Case{ring_with_chord(), 4.0, 6.0}, Case{ring_with_chord(), kInfiniteTime, 5.0},
                        Case{ring_with_chord(), 2.5, kInfiniteTime}}) {
    const CouplingMatrix coupling(c.coupling);
    const NoiseParams noise{c.t1, c.tphi, NoiseKind::Independent};
    for (IntegrationMethod method : {IntegrationMethod::RungeKutta4, IntegrationMethod::SplitOperator}) {
      IntegratorConfig config = network_default_config();
      config.method = method;
      const auto traj = evolve_independent(ExcitationState::excited(coupling.size(), 0), coupling, noise, grid, config);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const ExcitationState expected = oracle_network(c.coupling, c.t1, c.tphi, false, 0, grid[i]);
        EXPECT_LT(block_distance(traj.states[i], expected), 1e-7) << to_string(method) << " t=" << grid[i];
        EXPECT_NEAR(traj.states[i].total_probability(), 1.0, 1e-9);
      }
    }
  }
}

TEST(NetworkCollective, MatchesFullQubitSpace) {
  const std::vector<double> grid{0.0, 0.6, 1.5};
  RealMatrix pair(2, 2);
  pair << 0, 1.1, 1.1, 0;
  for (const RealMatrix& m : {pair, ring_with_chord()}) {
    const CouplingMatrix coupling(m);
    const NoiseParams noise{kInfiniteTime, 3.0, NoiseKind::Collective};
    const auto traj = evolve_collective(ExcitationState::excited(coupling.size(), 1), coupling, noise, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const ExcitationState expected = oracle_network(m, kInfiniteTime, 3.0, true, 1, grid[i]);
      EXPECT_LT(block_distance(traj.states[i], expected), 1e-9);
      EXPECT_EQ(traj.states[i].ground, 0.0);
    }
  }
}

TEST(NetworkIndependent, CoherentTransferFollowsUnitaryHitting) {
  const int d = 3;
  const auto grid = uniform_grid(3.0, 0.25);
  const auto traj = evolve_independent(ExcitationState::excited(8, 0), hypercube_coupling(d, 1.0), NoiseParams{}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(traj.states[i].block(7, 7).real(), unitary_hitting({d, 1.0, 0.0}, grid[i]), 1e-9);
}

TEST(NetworkIndependent, ReducesToVertexModel) {
  for (int d = 1; d <= 3; ++d) {
    const WalkParams params{d, 1.0, 0.2};
    const auto grid = uniform_grid(5.0, 0.5);
    const auto net = evolve_independent(ExcitationState::excited(Eigen::Index{1} << d, 0), hypercube_coupling(d, 1.0),
                                        NoiseParams{kInfiniteTime, 10.0, NoiseKind::Independent}, grid);
    const Trajectory walk = evolve(DensityMatrix::vertex(d, corner_start()), params, ModelKind::Vertex,
                                   IntegratorConfig(params, 1e-3, IntegrationMethod::RungeKutta4), grid,
                                   {.keep_states = true});
    for (std::size_t i = 0; i < grid.size(); ++i)
      EXPECT_LT((net.states[i].block - walk.states[i].matrix()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(NetworkCollective, ReducesToSubspaceModel) {
  for (int d = 1; d <= 3; ++d) {
    const WalkParams params{d, 1.0, 0.2};
    const auto grid = uniform_grid(5.0, 0.5);
    const auto net = evolve_collective(ExcitationState::excited(Eigen::Index{1} << d, 0), hypercube_coupling(d, 1.0),
                                       NoiseParams{kInfiniteTime, 10.0, NoiseKind::Collective}, grid);
    const Trajectory walk = evolve(DensityMatrix::vertex(d, corner_start()), params, ModelKind::Subspace,
                                   IntegratorConfig(params, 1e-3, IntegrationMethod::RungeKutta4), grid,
                                   {.keep_states = true});
    for (std::size_t i = 0; i < grid.size(); ++i)
      EXPECT_LT((net.states[i].block - walk.states[i].matrix()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(NetworkCollective, OneBitEqualsIndependent) {
  const auto grid = uniform_grid(4.0, 0.2);
  const CouplingMatrix c = hypercube_coupling(1, 1.0);
  const auto coll = evolve_collective(ExcitationState::excited(2, 0), c, {kInfiniteTime, 7.0, NoiseKind::Collective}, grid);
  const auto ind = evolve_independent(ExcitationState::excited(2, 0), c, {kInfiniteTime, 7.0, NoiseKind::Independent}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LT(block_distance(coll.states[i], ind.states[i]), 1e-14);
}

TEST(NetworkCollective, RejectsUnsupportedNetworks) {
  RealMatrix three = RealMatrix::Zero(3, 3);
  three(0, 1) = three(1, 0) = 1.0;
  const std::vector<double> grid{0.0, 1.0};
  EXPECT_THROW((void)evolve_collective(ExcitationState::excited(3, 0), CouplingMatrix(three),
                                       {kInfiniteTime, 5.0, NoiseKind::Collective}, grid),
               InvalidArgument);
  EXPECT_THROW((void)evolve_collective(ExcitationState::excited(4, 0), hypercube_coupling(2, 1.0),
                                       {10.0, 5.0, NoiseKind::Collective}, grid),
               InvalidArgument);
  EXPECT_THROW((void)evolve_collective(ExcitationState::excited(4, 0), hypercube_coupling(2, 1.0),
                                       {kInfiniteTime, 5.0, NoiseKind::Independent}, grid),
               InvalidArgument);
}

TEST(NetworkIndependent, GroundPopulationGrowsAtDecayRate) {
  const auto grid = uniform_grid(20.0, 1.0);
  const auto traj = evolve_independent(ExcitationState::excited(4, 2), hypercube_coupling(2, 1.0),
                                       {3.0, kInfiniteTime, NoiseKind::Independent}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(traj.states[i].ground, 1.0 - std::exp(-grid[i] / 3.0), 1e-10);
    EXPECT_NEAR(traj.states[i].total_probability(), 1.0, 1e-9);
  }
}

TEST(RescaleExcitedBlock, RecoversPureDephasingRun) {
  for (int d = 1; d <= 3; ++d) {
    const auto grid = uniform_grid(6.0, 0.5);
    const CouplingMatrix c = hypercube_coupling(d, 1.0);
    const auto start = ExcitationState::excited(c.size(), 0);
    const auto decaying = evolve_independent(start, c, {10.0, 5.0, NoiseKind::Independent}, grid);
    const auto clean = evolve_independent(start, c, {kInfiniteTime, 5.0, NoiseKind::Independent}, grid);
    const auto rescaled = rescale_excited_block(decaying, 10.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_LT((rescaled.states[i].block - clean.states[i].block).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_NEAR(rescaled.states[i].block.trace().real(),
                  decaying.states[i].block.trace().real() * std::exp(grid[i] / 10.0), 1e-12);
    }
  }
  const auto grid = uniform_grid(1.0, 0.5);
  const auto traj = evolve_independent(ExcitationState::excited(2, 0), hypercube_coupling(1, 1.0), NoiseParams{}, grid);
  const auto same = rescale_excited_block(traj, kInfiniteTime);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(same.states[i].block, traj.states[i].block);
  EXPECT_THROW((void)rescale_excited_block(traj, 0.0), InvalidArgument);
}

TEST(CollectiveSign, MatchesOperatorConstruction) {
  // Build S_{j,alpha} = I + sum_{x: x_j = alpha} (Z_x - I) and the
  // alternative prod_{x: x_j = alpha} Z_x on the full qubit space, and read
  // off their action on |x)(y| in the single-excitation sector.
  for (int d = 1; d <= 3; ++d) {
    const int nodes = 1 << d;
    const oracle::QubitOperators ops = oracle::qubit_operators(nodes);
    const auto dim = Eigen::Index{1} << nodes;
    for (int j = 0; j < d; ++j)
      for (int alpha = 0; alpha <= 1; ++alpha) {
        RealMatrix sum_form = RealMatrix::Identity(dim, dim);
        RealMatrix product_form = RealMatrix::Identity(dim, dim);
        for (int x = 0; x < nodes; ++x)
          if (((x >> j) & 1) == alpha) {
            sum_form += ops.z[static_cast<std::size_t>(x)] - RealMatrix::Identity(dim, dim);
            product_form = (product_form * ops.z[static_cast<std::size_t>(x)]).eval();
          }
        for (int x = 0; x < nodes; ++x)
          for (int y = 0; y < nodes; ++y) {
            const Eigen::Index ix = Eigen::Index{1} << x;
            const Eigen::Index iy = Eigen::Index{1} << y;
            const int expected = collective_sign(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y), j);
            EXPECT_EQ(sum_form(ix, ix) * sum_form(iy, iy), expected);
            EXPECT_EQ(product_form(ix, ix) * product_form(iy, iy), expected);
          }
      }
  }
}

TEST(NetworkEntropy, CombinesGroundAndBlock) {
  EXPECT_NEAR(network_entropy(ExcitationState::excited(4, 1)), 0.0, 1e-12);
  ExcitationState half{0.5, ComplexMatrix::Zero(2, 2)};
  half.block(0, 0) = 0.5;
  EXPECT_NEAR(network_entropy(half), 1.0, 1e-12);
}

TEST(NetworkEvolve, RejectsMismatchedState) {
  const std::vector<double> grid{0.0, 1.0};
  EXPECT_THROW((void)evolve_independent(ExcitationState::excited(3, 0), hypercube_coupling(2, 1.0), NoiseParams{}, grid),
               InvalidArgument);
  EXPECT_THROW((void)evolve_independent(ExcitationState::excited(4, 0), hypercube_coupling(2, 1.0),
                                        {-1.0, 5.0, NoiseKind::Independent}, grid),
               InvalidArgument);
  EXPECT_THROW((void)ExcitationState::excited(4, 4), InvalidArgument);
}
