#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcwalk/density_matrix.hpp"
#include "hcwalk/dynamics.hpp"
#include "hcwalk/errors.hpp"
#include "hcwalk/hypercube.hpp"

namespace hcwalk {

/// A family of complete projective measurements, all diagonal in the vertex
/// basis. Measurement g assigns each vertex x the outcome labels[g][x]; its
/// projectors are the indicator sets of the distinct labels, so they sum to
/// the identity.
class MeasurementFamily {
 public:
  explicit MeasurementFamily(std::vector<std::vector<int>> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw InvalidArgument("measurement family is empty");
    for (const auto& m : labels_)
      if (m.size() != labels_.front().size()) throw InvalidArgument("measurements disagree on the vertex count");
  }

  /// One measurement with 2^d single-vertex projectors.
  [[nodiscard]] static MeasurementFamily vertex(int d) {
    check_dimension_cap(d);
    std::vector<int> labels(std::size_t{1} << d);
    for (std::size_t x = 0; x < labels.size(); ++x) labels[x] = static_cast<int>(x);
    return MeasurementFamily({std::move(labels)});
  }

  /// d measurements, each with the two projectors onto x_j = 0 and x_j = 1.
  [[nodiscard]] static MeasurementFamily subspace(int d) {
    check_dimension_cap(d);
    std::vector<std::vector<int>> all;
    for (int j = 0; j < d; ++j) {
      std::vector<int> labels(std::size_t{1} << d);
      for (std::size_t x = 0; x < labels.size(); ++x) labels[x] = static_cast<int>((x >> j) & 1U);
      all.push_back(std::move(labels));
    }
    return MeasurementFamily(std::move(all));
  }

  [[nodiscard]] int measurement_count() const { return static_cast<int>(labels_.size()); }
  [[nodiscard]] std::size_t vertex_count() const { return labels_.front().size(); }

  /// Number of projectors P_j (over all measurements) with P_j|x> = |x> and
  /// P_j|y> = |y>. sum_j P_j rho P_j is rho entrywise times this count.
  [[nodiscard]] int shared_projectors(std::size_t x, std::size_t y) const {
    int count = 0;
    for (const auto& m : labels_) count += (m[x] == m[y]) ? 1 : 0;
    return count;
  }

 private:
  std::vector<std::vector<int>> labels_;
};

/// exp(-i H dt) built from the Walsh-Hadamard spectral decomposition. The
/// entry <x|U|y> depends only on x xor y.
[[nodiscard]] inline ComplexMatrix unitary_propagator(const WalkParams& params, double dt) {
  params.validate();
  check_dimension_cap(params.d);
  const auto n = static_cast<Eigen::Index>(params.size());
  std::vector<Complex> by_xor(static_cast<std::size_t>(n), Complex{});
  for (Eigen::Index m = 0; m < n; ++m) {
    Complex sum{};
    for (Eigen::Index k = 0; k < n; ++k) {
      const double sign = (std::popcount(static_cast<std::uint64_t>(k & m)) % 2 == 0) ? 1.0 : -1.0;
      sum += sign * std::polar(1.0, -hamiltonian_eigenvalue(params, static_cast<std::uint64_t>(k)) * dt);
    }
    by_xor[static_cast<std::size_t>(m)] = sum / static_cast<double>(n);
  }
  ComplexMatrix u(n, n);
  for (Eigen::Index y = 0; y < n; ++y)
    for (Eigen::Index x = 0; x < n; ++x) u(x, y) = by_xor[static_cast<std::size_t>(x ^ y)];
  return u;
}

/// rho' = (1 - m p) U rho U^dag + p sum_j P_j U rho U^dag P_j, where m is the
/// number of measurements in the family.
[[nodiscard]] inline DensityMatrix discrete_measured_step(const DensityMatrix& rho, const ComplexMatrix& u,
                                                          const MeasurementFamily& family, double p) {
  const Eigen::Index n = rho.size();
  if (u.rows() != n || u.cols() != n) throw InvalidArgument("unitary size does not match the state");
  if (family.vertex_count() != static_cast<std::size_t>(n))
    throw InvalidArgument("measurement family size does not match the state");
  const int m = family.measurement_count();
  if (!(p >= 0.0) || m * p > 1.0)
    throw InvalidArgument("measurement probability must satisfy 0 <= m p <= 1 (m=" + std::to_string(m) + ")");
  ComplexMatrix sigma = u * rho.matrix() * u.adjoint();
  for (Eigen::Index y = 0; y < n; ++y)
    for (Eigen::Index x = 0; x < n; ++x) {
      const int shared = family.shared_projectors(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      sigma(x, y) *= (1.0 - m * p) + p * shared;
    }
  return DensityMatrix(std::move(sigma));
}

struct DiscreteTrajectory {
  std::vector<double> times;
  std::vector<double> hitting;
  std::vector<double> entropy;
  std::vector<Diagnostics> diagnostics;
  DensityMatrix final_state;
};

/// Repeats discrete_measured_step with U = exp(-i H step) and samples on
/// t_grid, whose spacings must be whole multiples of step.
[[nodiscard]] inline DiscreteTrajectory evolve_discrete(const DensityMatrix& rho0, const WalkParams& params,
                                                        const MeasurementFamily& family, double step, double p,
                                                        std::span<const double> t_grid,
                                                        const Observables& observables = {}) {
  params.validate();
  detail::check_time_grid(t_grid);
  if (!(step > 0.0)) throw InvalidArgument("discrete step must be > 0");
  if (rho0.dimension() != params.d) throw InvalidArgument("initial state dimension does not match d");
  const VertexIndex target = observables.target.value_or(corner_target(params.d));
  const ComplexMatrix u = unitary_propagator(params, step);

  DiscreteTrajectory out{{}, {}, {}, {}, rho0};
  auto record = [&](double t) {
    const ComplexMatrix& m = out.final_state.matrix();
    out.times.push_back(t);
    out.hitting.push_back(hitting_probability(out.final_state, target));
    if (observables.entropy) out.entropy.push_back(von_neumann_entropy(m));
    if (observables.diagnostics) out.diagnostics.push_back(diagnose(m));
  };
  record(t_grid[0]);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double ratio = (t_grid[i] - t_grid[i - 1]) / step;
    const long steps = std::lround(ratio);
    if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-6)
      throw InvalidArgument("sample spacing must be a whole multiple of the discrete step");
    for (long s = 0; s < steps; ++s) out.final_state = discrete_measured_step(out.final_state, u, family, p);
    record(t_grid[i]);
  }
  return out;
}

}  // namespace hcwalk
