#pragma once

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hcwalk/density_matrix.hpp"
#include "hcwalk/dynamics.hpp"
#include "hcwalk/errors.hpp"
#include "hcwalk/hypercube.hpp"

namespace hcwalk {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Real symmetric XY coupling Omega_{jk} with zero diagonal.
class CouplingMatrix {
 public:
  explicit CouplingMatrix(RealMatrix omega) : omega_(std::move(omega)) {
    if (omega_.rows() != omega_.cols() || omega_.rows() < 1)
      throw InvalidArgument("coupling matrix must be square and nonempty");
    for (Eigen::Index i = 0; i < omega_.rows(); ++i) {
      if (omega_(i, i) != 0.0) throw InvalidArgument("coupling matrix must have a zero diagonal");
      for (Eigen::Index j = 0; j < i; ++j)
        if (omega_(i, j) != omega_(j, i)) throw InvalidArgument("coupling matrix must be symmetric");
    }
    if (!omega_.allFinite()) throw InvalidArgument("coupling matrix has non-finite entries");
  }

  [[nodiscard]] Eigen::Index size() const { return omega_.rows(); }
  [[nodiscard]] const RealMatrix& matrix() const { return omega_; }

  /// Largest absolute row sum, a bound on the spectral radius.
  [[nodiscard]] double max_rate() const { return omega_.cwiseAbs().rowwise().sum().maxCoeff(); }

 private:
  RealMatrix omega_;
};

/// Hypercube adjacency times omega; reproduces build_hamiltonian.
[[nodiscard]] inline CouplingMatrix hypercube_coupling(int d, double omega) {
  return CouplingMatrix(build_hamiltonian(WalkParams{d, omega, 0.0}));
}

/// Parses a square comma-separated matrix of reals, one row per line.
/// Blank lines and lines starting with '#' are skipped.
[[nodiscard]] inline CouplingMatrix parse_coupling_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidArgument("coupling CSV: cannot parse '" + cell + "' on row " + std::to_string(rows.size() + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  RealMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw InvalidArgument("coupling CSV is not square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return CouplingMatrix(std::move(m));
}

[[nodiscard]] inline CouplingMatrix load_coupling_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open coupling file " + path);
  return parse_coupling_csv(in);
}

enum class NoiseKind { Independent, Collective };

/// Amplitude-damping time T1 and dephasing time Tphi; either may be
/// infinite.
struct NoiseParams {
  double t1 = kInfiniteTime;
  double tphi = kInfiniteTime;
  NoiseKind kind = NoiseKind::Independent;

  void validate() const {
    if (!(t1 > 0.0) || !(tphi > 0.0)) throw InvalidArgument("T1 and Tphi must be > 0");
  }
  [[nodiscard]] double decay_rate() const { return 1.0 / t1; }
  [[nodiscard]] double dephasing_rate() const { return 1.0 / tphi; }
};

/// rho = rho_00 |0)(0| + sum_{x,y} rho_xy |x)(y|: ground population plus
/// the single-excitation block.
struct ExcitationState {
  double ground = 0.0;
  ComplexMatrix block;

  [[nodiscard]] static ExcitationState excited(Eigen::Index nodes, Eigen::Index node) {
    if (node < 0 || node >= nodes) throw InvalidArgument("excited node outside the network");
    ExcitationState s{0.0, ComplexMatrix::Zero(nodes, nodes)};
    s.block(node, node) = 1.0;
    return s;
  }

  [[nodiscard]] double total_probability() const { return ground + block.trace().real(); }
};

struct NetworkTrajectory {
  std::vector<double> times;
  std::vector<ExcitationState> states;
};

/// S_{j,alpha} |x)(y| S_{j,alpha} = (2 delta_{x_j,y_j} - 1) |x)(y|.
[[nodiscard]] constexpr int collective_sign(std::uint64_t x, std::uint64_t y, int j) {
  return (((x ^ y) >> j) & 1U) ? -1 : 1;
}

namespace detail {

inline void check_network(const ExcitationState& s, const CouplingMatrix& c) {
  if (s.block.rows() != c.size() || s.block.cols() != c.size())
    throw InvalidArgument("state block size does not match the network");
}

// Off-diagonal dephasing rate of block entry (x, y) for each noise kind.
inline double network_offdiagonal_rate(const NoiseParams& noise, std::uint64_t x, std::uint64_t y) {
  if (x == y) return 0.0;
  if (noise.kind == NoiseKind::Independent) return noise.decay_rate() + 2.0 * noise.dephasing_rate();
  return 2.0 * noise.dephasing_rate() * std::popcount(x ^ y);
}

inline ExcitationState network_rhs(const ExcitationState& s, const CouplingMatrix& c, const NoiseParams& noise) {
  const RealMatrix& omega = c.matrix();
  ExcitationState out;
  out.block = Complex{0.0, -1.0} * (omega * s.block - s.block * omega);
  const Eigen::Index n = s.block.rows();
  for (Eigen::Index y = 0; y < n; ++y)
    for (Eigen::Index x = 0; x < n; ++x) {
      const double rate = network_offdiagonal_rate(noise, static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y));
      if (rate != 0.0) out.block(x, y) -= rate * s.block(x, y);
    }
  out.ground = 0.0;
  if (noise.kind == NoiseKind::Independent && noise.decay_rate() > 0.0) {
    out.block.diagonal() -= noise.decay_rate() * s.block.diagonal();
    out.ground = noise.decay_rate() * s.block.trace().real();
  }
  return out;
}

inline void network_rk4_step(ExcitationState& s, const CouplingMatrix& c, const NoiseParams& noise, double h) {
  auto axpy = [](const ExcitationState& base, double scale, const ExcitationState& k) {
    return ExcitationState{base.ground + scale * k.ground, base.block + scale * k.block};
  };
  const ExcitationState k1 = network_rhs(s, c, noise);
  const ExcitationState k2 = network_rhs(axpy(s, 0.5 * h, k1), c, noise);
  const ExcitationState k3 = network_rhs(axpy(s, 0.5 * h, k2), c, noise);
  const ExcitationState k4 = network_rhs(axpy(s, h, k3), c, noise);
  s.ground += (h / 6.0) * (k1.ground + 2.0 * k2.ground + 2.0 * k3.ground + k4.ground);
  s.block += (h / 6.0) * (k1.block + 2.0 * k2.block + 2.0 * k3.block + k4.block);
}

// Split-operator sub-steps for a general coupling: dense spectral
// conjugation for the XY part, exact exponential damping with the lost
// excited population fed into rho_00.
class NetworkSplitPropagator {
 public:
  NetworkSplitPropagator(const CouplingMatrix& c, const NoiseParams& noise) : noise_(noise) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(c.matrix());
    if (solver.info() != Eigen::Success) throw CorruptedState("coupling eigen-solve failed");
    vectors_ = solver.eigenvectors();
    values_ = solver.eigenvalues();
  }

  void unitary(ExcitationState& s, double h) const {
    const Eigen::VectorXcd phases =
        values_.unaryExpr([h](double e) { return std::polar(1.0, -e * h); });
    const ComplexMatrix u = vectors_.cast<Complex>() * phases.asDiagonal() * vectors_.transpose().cast<Complex>();
    s.block = u * s.block * u.adjoint();
  }

  void damp(ExcitationState& s, double h) const {
    const Eigen::Index n = s.block.rows();
    for (Eigen::Index y = 0; y < n; ++y)
      for (Eigen::Index x = 0; x < n; ++x) {
        const double rate = network_offdiagonal_rate(noise_, static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y));
        if (rate != 0.0) s.block(x, y) *= std::exp(-rate * h);
      }
    if (noise_.kind == NoiseKind::Independent && noise_.decay_rate() > 0.0) {
      const double keep = std::exp(-noise_.decay_rate() * h);
      const double before = s.block.trace().real();
      s.block.diagonal() *= keep;
      s.ground += (1.0 - keep) * before;
    }
  }

 private:
  NoiseParams noise_;
  RealMatrix vectors_;
  Eigen::VectorXd values_;
};

inline NetworkTrajectory evolve_network(const ExcitationState& state0, const CouplingMatrix& coupling,
                                        const NoiseParams& noise, std::span<const double> t_grid,
                                        const IntegratorConfig& config) {
  noise.validate();
  check_network(state0, coupling);
  check_time_grid(t_grid);
  double max_rate = coupling.max_rate() + noise.decay_rate();
  if (noise.kind == NoiseKind::Independent)
    max_rate = std::max(max_rate, noise.decay_rate() + 2.0 * noise.dephasing_rate());
  else
    max_rate = std::max(max_rate, 2.0 * noise.dephasing_rate() * std::bit_width(static_cast<std::uint64_t>(coupling.size())));
  config.validate_for_rate(max_rate);

  NetworkTrajectory out;
  ExcitationState s = state0;
  const double initial_total = state0.total_probability();
  auto record = [&](double t) {
    const double total = s.total_probability();
    if (std::abs(total - initial_total) > config.trace_tolerance) {
      Diagnostics diag;
      diag.trace_deviation = std::abs(total - initial_total);
      diag.hermiticity_deviation = hermiticity_deviation(s.block);
      throw IntegratorAbort("network probability not conserved", t, diag);
    }
    out.times.push_back(t);
    out.states.push_back(s);
  };
  record(t_grid[0]);

  if (config.method == IntegrationMethod::SplitOperator) {
    const NetworkSplitPropagator propagator(coupling, noise);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const double interval = t_grid[i] - t_grid[i - 1];
      const long steps = substeps(interval, config.dt);
      const double h = interval / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k) {
        propagator.damp(s, 0.5 * h);
        propagator.unitary(s, h);
        propagator.damp(s, 0.5 * h);
      }
      record(t_grid[i]);
    }
  } else {
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const double interval = t_grid[i] - t_grid[i - 1];
      const long steps = substeps(interval, config.dt);
      const double h = interval / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k) network_rk4_step(s, coupling, noise, h);
      record(t_grid[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Default integrator for the network models: fourth-order Runge-Kutta.
[[nodiscard]] inline IntegratorConfig network_default_config(double dt = 1e-3) {
  IntegratorConfig config;
  config.dt = dt;
  config.method = IntegrationMethod::RungeKutta4;
  return config;
}

/// Independent amplitude damping and dephasing of every qubit:
///   d rho_00 = T1^{-1} sum_x rho_xx
///   d rho_xy = -i[Omega, rho]_xy - T1^{-1} delta_xy rho_xx
///              - 2 [(2 T1)^{-1} + Tphi^{-1}] (1 - delta_xy) rho_xy
[[nodiscard]] inline NetworkTrajectory evolve_independent(const ExcitationState& state0,
                                                          const CouplingMatrix& coupling, const NoiseParams& noise,
                                                          std::span<const double> t_grid,
                                                          const IntegratorConfig& config = network_default_config()) {
  if (noise.kind != NoiseKind::Independent) throw InvalidArgument("evolve_independent needs independent noise");
  return detail::evolve_network(state0, coupling, noise, t_grid, config);
}

/// Collective dephasing through the per-bit operators S_{j,alpha}:
///   d rho_xy = -i[Omega, rho]_xy - 2 Tphi^{-1} rho_xy sum_j (1 - delta_{x_j,y_j})
/// Node labels must be the vertices of a hypercube.
[[nodiscard]] inline NetworkTrajectory evolve_collective(const ExcitationState& state0,
                                                         const CouplingMatrix& coupling, const NoiseParams& noise,
                                                         std::span<const double> t_grid,
                                                         const IntegratorConfig& config = network_default_config()) {
  if (noise.kind != NoiseKind::Collective) throw InvalidArgument("evolve_collective needs collective noise");
  const auto n = static_cast<std::uint64_t>(coupling.size());
  if (n < 2 || !std::has_single_bit(n))
    throw InvalidArgument("collective dephasing needs a network of 2^d nodes");
  if (std::isfinite(noise.t1))
    throw InvalidArgument("collective dephasing has no amplitude damping; T1 must be infinite");
  return detail::evolve_network(state0, coupling, noise, t_grid, config);
}

/// Undoes the uniform T1 decay of the excited block: rho~_xy(t) = e^{t/T1} rho_xy(t).
[[nodiscard]] inline NetworkTrajectory rescale_excited_block(NetworkTrajectory traj, double t1) {
  if (!(t1 > 0.0)) throw InvalidArgument("T1 must be > 0");
  if (!std::isfinite(t1)) return traj;
  for (std::size_t i = 0; i < traj.times.size(); ++i) traj.states[i].block *= std::exp(traj.times[i] / t1);
  return traj;
}

/// Full network state rho_00 (+) block as a density matrix over N + 1 levels
/// is block diagonal, so its entropy combines both parts.
[[nodiscard]] inline double network_entropy(const ExcitationState& s) {
  const Eigen::VectorXd block_ev = detail::hermitian_eigenvalues(s.block);
  Eigen::VectorXd all(block_ev.size() + 1);
  all << s.ground, block_ev;
  return entropy_from_eigenvalues(all);
}

}  // namespace hcwalk
