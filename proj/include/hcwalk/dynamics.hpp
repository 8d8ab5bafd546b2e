#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcwalk/density_matrix.hpp"
#include "hcwalk/errors.hpp"
#include "hcwalk/hypercube.hpp"

namespace hcwalk {

enum class ModelKind { Unitary, Vertex, Subspace };

[[nodiscard]] inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Unitary: return "unitary";
    case ModelKind::Vertex: return "vertex";
    case ModelKind::Subspace: return "subspace";
  }
  return "unknown";
}

enum class IntegrationMethod { RungeKutta4, SplitOperator };

[[nodiscard]] inline const char* to_string(IntegrationMethod m) {
  return m == IntegrationMethod::RungeKutta4 ? "rk4" : "split-operator";
}

/// Internal step size, propagation method and the trace tolerance checked
/// at every sample.
struct IntegratorConfig {
  double dt = 1e-3;
  IntegrationMethod method = IntegrationMethod::SplitOperator;
  double trace_tolerance = 1e-9;

  IntegratorConfig() = default;

  /// Builds a config and checks the step against the fastest rate of the walk.
  explicit IntegratorConfig(const WalkParams& params, double step = 1e-3,
                            IntegrationMethod m = IntegrationMethod::SplitOperator,
                            double tolerance = 1e-9)
      : dt(step), method(m), trace_tolerance(tolerance) {
    validate_for(params);
  }

  /// dt * max_rate must stay below 0.1.
  void validate_for_rate(double max_rate) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("integrator step dt must be > 0");
    if (!(trace_tolerance > 0.0)) throw InvalidArgument("trace tolerance must be > 0");
    if (dt * max_rate >= 0.1)
      throw InvalidArgument("integrator step too large: dt * rate = " + std::to_string(dt * max_rate) +
                            " (must be < 0.1)");
  }

  void validate_for(const WalkParams& params) const {
    validate_for_rate(std::max(params.omega * params.d, params.lambda * params.d));
  }
};

/// Raised when a propagated state violates its invariants. Carries the
/// diagnostics of the offending sample.
class IntegratorAbort : public Error {
 public:
  IntegratorAbort(const std::string& what, double time, Diagnostics diag)
      : Error(what + " at t=" + std::to_string(time)), time_(time), diagnostics_(diag) {}

  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] const Diagnostics& diagnostics() const { return diagnostics_; }

 private:
  double time_;
  Diagnostics diagnostics_;
};

/// Which observables evolve() records at each sample.
struct Observables {
  std::optional<VertexIndex> target;  // defaults to |1...1>
  bool entropy = false;
  bool diagnostics = false;
  bool keep_states = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> hitting;
  std::vector<double> entropy;            // empty unless requested
  std::vector<Diagnostics> diagnostics;   // empty unless requested
  std::vector<DensityMatrix> states;      // empty unless requested
  DensityMatrix final_state;
};

/// Off-diagonal damping weight: 1 - delta_{x,y} for the vertex model,
/// Hamming(x, y) for the subspace model.
[[nodiscard]] inline int damping_weight(ModelKind kind, std::uint64_t x, std::uint64_t y) {
  switch (kind) {
    case ModelKind::Unitary: return 0;
    case ModelKind::Vertex: return x == y ? 0 : 1;
    case ModelKind::Subspace: return std::popcount(x ^ y);
  }
  return 0;
}

/// d rho / dt = -i[H, rho] - lambda w(x,y) rho_{x,y}.
[[nodiscard]] inline ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const WalkParams& params,
                                                ModelKind kind) {
  params.validate();
  const Eigen::Index n = rho.rows();
  if (n != static_cast<Eigen::Index>(params.size()) || rho.cols() != n)
    throw InvalidArgument("state size does not match 2^d");
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  // H rho - rho H via single-bit flips of the row and column labels.
  for (int j = 0; j < params.d; ++j) {
    const Eigen::Index mask = Eigen::Index{1} << j;
    for (Eigen::Index y = 0; y < n; ++y) {
      const Complex* src = rho.data() + y * n;
      const Complex* src_flip = rho.data() + (y ^ mask) * n;
      Complex* dst = out.data() + y * n;
      for (Eigen::Index x = 0; x < n; ++x) dst[x] += src[x ^ mask] - src_flip[x];
    }
  }
  out *= Complex{0.0, -params.omega};
  if (kind != ModelKind::Unitary && params.lambda > 0.0) {
    for (Eigen::Index y = 0; y < n; ++y)
      for (Eigen::Index x = 0; x < n; ++x) {
        const int w = damping_weight(kind, static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y));
        if (w != 0) out(x, y) -= params.lambda * w * rho(x, y);
      }
  }
  return out;
}

namespace detail {

/// Exact sub-steps of the split-operator scheme, applied to the state
/// expressed in the Walsh-Hadamard eigenbasis of H (rho~ = W rho W).
///
/// In that basis the unitary part is a pure phase, and both dephasing
/// channels stay cheap: the vertex channel mixes rho~ with its
/// xor-diagonal sums, and the subspace channel is a product of single-bit
/// X-conjugations.
class EigenbasisPropagator {
 public:
  EigenbasisPropagator(const WalkParams& params, ModelKind kind) : params_(params), kind_(kind) {
    const auto n = params.size();
    popcount_.resize(n);
    for (std::size_t k = 0; k < n; ++k) popcount_[k] = std::popcount(k);
  }

  [[nodiscard]] bool dissipative() const { return kind_ != ModelKind::Unitary && params_.lambda > 0.0; }

  /// rho~_{kl} *= exp(-i (E_k - E_l) h), E_k - E_l = 2 omega (|l| - |k|).
  void unitary(ComplexMatrix& tilde, double h) const {
    const int d = params_.d;
    std::vector<Complex> table(static_cast<std::size_t>(2 * d + 1));
    for (int delta = -d; delta <= d; ++delta)
      table[static_cast<std::size_t>(delta + d)] = std::polar(1.0, -2.0 * params_.omega * delta * h);
    const Eigen::Index n = tilde.rows();
    for (Eigen::Index l = 0; l < n; ++l) {
      Complex* col = tilde.data() + l * n;
      const Complex* shifted = table.data() + popcount_[static_cast<std::size_t>(l)] + d;
      for (Eigen::Index k = 0; k < n; ++k) {
        const Complex ph = shifted[-popcount_[static_cast<std::size_t>(k)]];
        col[k] = {col[k].real() * ph.real() - col[k].imag() * ph.imag(),
                  col[k].real() * ph.imag() + col[k].imag() * ph.real()};
      }
    }
  }

  /// Strang sequence D(h/2) [U(h) D(h)]^{steps-1} U(h) D(h/2).
  void propagate(ComplexMatrix& tilde, long steps, double h) const {
    if (kind_ == ModelKind::Vertex) {
      propagate_vertex(tilde, steps, h);
      return;
    }
    damp(tilde, 0.5 * h);
    for (long s = 0; s < steps; ++s) {
      unitary(tilde, h);
      damp(tilde, s + 1 == steps ? 0.5 * h : h);
    }
  }

  /// Exact dephasing over time h: rho_{xy} *= exp(-lambda w(x,y) h) in the
  /// vertex basis.
  void damp(ComplexMatrix& tilde, double h) const {
    if (!dissipative()) return;
    const double e = std::exp(-params_.lambda * h);
    const Eigen::Index n = tilde.rows();
    if (kind_ == ModelKind::Vertex) {
      // rho -> e rho + (1 - e) diag(rho); W diag(rho) W = 2^{-d} s_{k^l}
      // with s_m = sum_k rho~_{k, k^m}.
      std::vector<Complex> s(static_cast<std::size_t>(n), Complex{});
      for (Eigen::Index l = 0; l < n; ++l) {
        const Complex* col = tilde.data() + l * n;
        for (Eigen::Index k = 0; k < n; ++k) s[static_cast<std::size_t>(k ^ l)] += col[k];
      }
      const double mix = (1.0 - e) / static_cast<double>(n);
      for (Eigen::Index l = 0; l < n; ++l) {
        Complex* col = tilde.data() + l * n;
        for (Eigen::Index k = 0; k < n; ++k) col[k] = e * col[k] + mix * s[static_cast<std::size_t>(k ^ l)];
      }
      return;
    }
    // Subspace model: per bit, rho -> a rho + b Z_j rho Z_j, and Z_j becomes
    // X_j in the Hadamard basis.
    const double a = 0.5 * (1.0 + e);
    const double b = 0.5 * (1.0 - e);
    for (int j = 0; j < params_.d; ++j) {
      const Eigen::Index mask = Eigen::Index{1} << j;
      for (Eigen::Index l = 0; l < n; ++l) {
        if (l & mask) continue;
        Complex* c0 = tilde.data() + l * n;
        Complex* c1 = tilde.data() + (l ^ mask) * n;
        for (Eigen::Index k = 0; k < n; ++k) {
          // pairs (k, l) <-> (k^mask, l^mask) and (k, l^mask) <-> (k^mask, l)
          if (k & mask) continue;
          const Eigen::Index kf = k ^ mask;
          const Complex p00 = c0[k], p11 = c1[kf];
          c0[k] = a * p00 + b * p11;
          c1[kf] = a * p11 + b * p00;
          const Complex p01 = c1[k], p10 = c0[kf];
          c1[k] = a * p01 + b * p10;
          c0[kf] = a * p10 + b * p01;
        }
      }
    }
  }

 private:
  // Vertex-model sequence with each damping fused into the following phase
  // step: one read-modify-write sweep per step, carrying the xor-diagonal
  // sums forward.
  void propagate_vertex(ComplexMatrix& tilde, long steps, double h) const {
    const int d = params_.d;
    const Eigen::Index n = tilde.rows();
    const auto un = static_cast<std::size_t>(n);
    std::vector<Complex> table(static_cast<std::size_t>(2 * d + 1));
    for (int delta = -d; delta <= d; ++delta)
      table[static_cast<std::size_t>(delta + d)] = std::polar(1.0, -2.0 * params_.omega * delta * h);
    std::vector<Complex> sums(un, Complex{});
    std::vector<Complex> next(un, Complex{});
    for (Eigen::Index l = 0; l < n; ++l) {
      const Complex* col = tilde.data() + l * n;
      for (Eigen::Index k = 0; k < n; ++k) sums[static_cast<std::size_t>(k ^ l)] += col[k];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    const double e_half = std::exp(-0.5 * params_.lambda * h);
    const double e_full = std::exp(-params_.lambda * h);
    for (long s = 0; s < steps; ++s) {
      const double e = (s == 0) ? e_half : e_full;
      const double mix = (1.0 - e) * inv_n;
      std::fill(next.begin(), next.end(), Complex{});
      for (Eigen::Index l = 0; l < n; ++l) {
        Complex* col = tilde.data() + l * n;
        const Complex* shifted = table.data() + popcount_[static_cast<std::size_t>(l)] + d;
        for (Eigen::Index k = 0; k < n; ++k) {
          const auto m = static_cast<std::size_t>(k ^ l);
          const Complex a = e * col[k] + mix * sums[m];
          const Complex ph = shifted[-popcount_[static_cast<std::size_t>(k)]];
          // Written out to skip the NaN-recovery path of complex operator*.
          const Complex v{a.real() * ph.real() - a.imag() * ph.imag(), a.real() * ph.imag() + a.imag() * ph.real()};
          col[k] = v;
          next[m] += v;
        }
      }
      sums.swap(next);
    }
    const double mix = (1.0 - e_half) * inv_n;
    for (Eigen::Index l = 0; l < n; ++l) {
      Complex* col = tilde.data() + l * n;
      for (Eigen::Index k = 0; k < n; ++k) col[k] = e_half * col[k] + mix * sums[static_cast<std::size_t>(k ^ l)];
    }
  }

  WalkParams params_;
  ModelKind kind_;
  std::vector<int> popcount_;
};

inline void rk4_step(ComplexMatrix& rho, const WalkParams& params, ModelKind kind, double h) {
  const ComplexMatrix k1 = lindblad_rhs(rho, params, kind);
  const ComplexMatrix k2 = lindblad_rhs(rho + 0.5 * h * k1, params, kind);
  const ComplexMatrix k3 = lindblad_rhs(rho + 0.5 * h * k2, params, kind);
  const ComplexMatrix k4 = lindblad_rhs(rho + h * k3, params, kind);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void check_time_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw InvalidArgument("time grid is empty");
  if (t_grid.front() != 0.0) throw InvalidArgument("time grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
}

/// Number of equal sub-steps of size <= dt covering an interval.
inline long substeps(double interval, double dt) {
  return std::max(1L, static_cast<long>(std::ceil(interval / dt - 1e-9)));
}

inline double diagonal_real(const ComplexMatrix& rho, Eigen::Index i) {
  const Complex v = rho(i, i);
  if (std::abs(v.imag()) > kDiagonalImagTolerance)
    throw CorruptedState("diagonal entry has imaginary part " + std::to_string(v.imag()));
  return v.real();
}

}  // namespace detail

/// Range tolerated on sampled hitting probabilities.
inline constexpr double kHittingSlack = 1e-9;

/// Propagates rho0 under the chosen model and samples observables on
/// t_grid (which must start at 0 and increase). Internal steps never exceed
/// config.dt and land exactly on every sample time.
[[nodiscard]] inline Trajectory evolve(const DensityMatrix& rho0, const WalkParams& params, ModelKind kind,
                                       const IntegratorConfig& config, std::span<const double> t_grid,
                                       const Observables& observables = {}) {
  params.validate();
  check_dimension_cap(params.d);
  config.validate_for(params);
  detail::check_time_grid(t_grid);
  if (rho0.dimension() != params.d) throw InvalidArgument("initial state dimension does not match d");
  const VertexIndex target = observables.target.value_or(corner_target(params.d));
  if (!target.fits(params.d)) throw InvalidArgument("target vertex outside the hypercube");
  const auto target_index = static_cast<Eigen::Index>(target.value());

  std::vector<double> times;
  std::vector<double> hitting;
  std::vector<double> entropy;
  std::vector<Diagnostics> diagnostics;
  std::vector<DensityMatrix> states;
  times.reserve(t_grid.size());
  hitting.reserve(t_grid.size());

  auto record = [&](double t, const ComplexMatrix& rho) {
    const Complex trace = rho.trace();
    if (std::abs(trace - Complex{1.0, 0.0}) > config.trace_tolerance)
      throw IntegratorAbort("trace drifted beyond tolerance", t, diagnose(rho));
    double p = 0.0;
    try {
      p = detail::diagonal_real(rho, target_index);
    } catch (const CorruptedState& e) {
      throw IntegratorAbort(e.what(), t, diagnose(rho));
    }
    if (p < -kHittingSlack || p > 1.0 + kHittingSlack)
      throw IntegratorAbort("hitting probability left [0, 1]", t, diagnose(rho));
    times.push_back(t);
    hitting.push_back(p);
    if (observables.diagnostics) {
      const Diagnostics diag = diagnose(rho);
      if (diag.min_eigenvalue < -kPositivityTolerance) throw IntegratorAbort("positivity lost", t, diag);
      diagnostics.push_back(diag);
    }
    if (observables.entropy) {
      try {
        entropy.push_back(von_neumann_entropy(rho));
      } catch (const Error& e) {
        throw IntegratorAbort(e.what(), t, diagnose(rho));
      }
    }
    if (observables.keep_states) states.emplace_back(rho);
  };

  ComplexMatrix rho = rho0.matrix();
  record(t_grid[0], rho);

  if (config.method == IntegrationMethod::SplitOperator) {
    const detail::EigenbasisPropagator propagator(params, kind);
    ComplexMatrix tilde = rho;
    walsh::conjugate(tilde);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const double interval = t_grid[i] - t_grid[i - 1];
      if (propagator.dissipative()) {
        // Strang splitting D(h/2) U(h) D(h/2), adjacent half steps merged.
        const long steps = detail::substeps(interval, config.dt);
        const double h = interval / static_cast<double>(steps);
        propagator.propagate(tilde, steps, h);
      } else {
        propagator.unitary(tilde, interval);
      }
      rho = tilde;
      walsh::conjugate(rho);
      record(t_grid[i], rho);
    }
  } else {
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const double interval = t_grid[i] - t_grid[i - 1];
      const long steps = detail::substeps(interval, config.dt);
      const double h = interval / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) detail::rk4_step(rho, params, kind, h);
      record(t_grid[i], rho);
    }
  }

  return Trajectory{std::move(times), std::move(hitting), std::move(entropy), std::move(diagnostics),
                    std::move(states), DensityMatrix(std::move(rho))};
}

/// Uniform sample grid 0, dt, 2 dt, ... up to t_max (inclusive within
/// roundoff). Sample k is exactly k * dt_sample.
[[nodiscard]] inline std::vector<double> uniform_grid(double t_max, double dt_sample) {
  if (!(t_max > 0.0) || !(dt_sample > 0.0)) throw InvalidArgument("t_max and dt_sample must be > 0");
  const auto count = static_cast<long>(std::floor(t_max / dt_sample + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count + 1));
  for (long k = 0; k <= count; ++k) grid.push_back(static_cast<double>(k) * dt_sample);
  return grid;
}

}  // namespace hcwalk
