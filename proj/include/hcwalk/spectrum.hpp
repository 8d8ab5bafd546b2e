#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hcwalk/closed_form.hpp"
#include "hcwalk/combinatorics.hpp"
#include "hcwalk/dynamics.hpp"
#include "hcwalk/errors.hpp"
#include "hcwalk/hypercube.hpp"

namespace hcwalk {

/// Largest d the verifier accepts; the superoperator space has 4^d states.
inline constexpr int kSpectrumMaxDimension = 6;
inline constexpr double kSpectrumTolerance = 1e-9;

struct EigenvalueCluster {
  double value = 0.0;
  std::size_t multiplicity = 0;
};

/// Comparison for one eigenspace of the Hamiltonian superoperator, whose
/// eigenvalue is 2 i omega (d - n).
struct SubspaceSpectrum {
  int n = 0;
  std::size_t dimension = 0;           // counted from the Fourier labels
  std::uint64_t expected_dimension = 0;  // (2d)! / [n! (2d-n)!]
  double hamiltonian_residual = 0.0;   // max |(H-super - eps) v| over the subspace
  std::vector<EigenvalueCluster> predicted;
  std::vector<EigenvalueCluster> computed;
  double max_mismatch = 0.0;
  bool multiplicities_match = false;

  [[nodiscard]] bool passed() const {
    return dimension == expected_dimension && multiplicities_match && max_mismatch <= kSpectrumTolerance &&
           hamiltonian_residual <= kSpectrumTolerance;
  }
};

struct SpectralReport {
  WalkParams params;
  std::vector<SubspaceSpectrum> subspaces;
  double max_mismatch = 0.0;
  std::size_t total_dimension = 0;

  [[nodiscard]] bool passed() const {
    return std::all_of(subspaces.begin(), subspaces.end(), [](const SubspaceSpectrum& s) { return s.passed(); }) &&
           total_dimension == (std::size_t{1} << (2 * params.d));
  }
};

namespace detail {

// Sorted eigenvalues grouped into runs closer than the tolerance.
inline std::vector<EigenvalueCluster> cluster(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<EigenvalueCluster> out;
  for (const double v : values) {
    if (!out.empty() && std::abs(v - out.back().value) <= tol) {
      auto& c = out.back();
      c.value += (v - c.value) / static_cast<double>(c.multiplicity + 1);
      ++c.multiplicity;
    } else {
      out.push_back({v, 1});
    }
  }
  return out;
}

inline std::vector<double> expand(const std::vector<EigenvalueCluster>& clusters) {
  std::vector<double> out;
  for (const auto& c : clusters) out.insert(out.end(), c.multiplicity, c.value);
  std::sort(out.begin(), out.end());
  return out;
}

// Superoperator basis vector |x;y>_x written as a 2^d x 2^d matrix:
// F[x'][y'] = 2^{-d} (-1)^{x.x' + y.y'}.
inline ComplexMatrix fourier_state(int d, std::uint64_t x, std::uint64_t y) {
  const auto n = Eigen::Index{1} << d;
  ComplexMatrix f(n, n);
  const double norm = std::ldexp(1.0, -d);
  for (Eigen::Index yp = 0; yp < n; ++yp)
    for (Eigen::Index xp = 0; xp < n; ++xp) {
      const int parity = std::popcount(x & static_cast<std::uint64_t>(xp)) +
                         std::popcount(y & static_cast<std::uint64_t>(yp));
      f(xp, yp) = (parity % 2 == 0) ? norm : -norm;
    }
  return f;
}

}  // namespace detail

/// Checks the degenerate-perturbation prediction for the vertex model.
///
/// Every Fourier state |x;y>_x is an eigenvector of the commutator
/// superoperator with eigenvalue 2 i omega (d - n), n = zeros(x) + ones(y);
/// the residual of that claim is measured through lindblad_rhs. Within each
/// eigenspace the dephasing superoperator L0 |x';y'> = -lambda (1 - delta)
/// |x';y'> is projected exactly and diagonalized. The prediction is
/// -lambda_pn with multiplicity d!/[(n-2p)!(d-n+2p)!] for each admissible p,
/// and -lambda for the rest of the subspace.
[[nodiscard]] inline SpectralReport verify_perturbative_spectrum(const WalkParams& params) {
  params.validate();
  if (params.d > kSpectrumMaxDimension)
    throw DimensionOverflow("spectral verification supports d <= " + std::to_string(kSpectrumMaxDimension));
  const int d = params.d;
  const auto n_vertices = std::uint64_t{1} << d;
  const double lambda = params.lambda;
  const WalkParams coherent{d, params.omega, 0.0};

  // Group the 4^d Fourier labels by n.
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> labels(static_cast<std::size_t>(2 * d + 1));
  for (std::uint64_t x = 0; x < n_vertices; ++x)
    for (std::uint64_t y = 0; y < n_vertices; ++y) {
      const int n = (d - std::popcount(x)) + std::popcount(y);
      labels[static_cast<std::size_t>(n)].emplace_back(x, y);
    }

  const DecayRateTable table(d, lambda, kSpectrumMaxDimension);
  // Cluster tolerance: distinct predicted values differ by far more than this.
  const double cluster_tol = 1e3 * kSpectrumTolerance * std::max(1.0, lambda);

  SpectralReport report;
  report.params = params;
  for (int n = 0; n <= 2 * d; ++n) {
    const auto& members = labels[static_cast<std::size_t>(n)];
    SubspaceSpectrum sub;
    sub.n = n;
    sub.dimension = members.size();
    sub.expected_dimension = binomial(2 * d, n);
    report.total_dimension += sub.dimension;

    // The Hamiltonian superoperator -i[H, .] acting on each Fourier state.
    const Complex eps{0.0, 2.0 * params.omega * (d - n)};
    for (const auto& [x, y] : members) {
      const ComplexMatrix f = detail::fourier_state(d, x, y);
      const ComplexMatrix residual = lindblad_rhs(f, coherent, ModelKind::Unitary) - eps * f;
      sub.hamiltonian_residual = std::max(sub.hamiltonian_residual, residual.cwiseAbs().maxCoeff());
    }

    // <u|L0|v> = -lambda delta_uv + lambda sum_{x'} F_u(x',x') F_v(x',x').
    // A[x'][u] = F_u(x', x') = 2^{-d} (-1)^{(x_u xor y_u) . x'}.
    const auto dim = static_cast<Eigen::Index>(members.size());
    RealMatrix a(static_cast<Eigen::Index>(n_vertices), dim);
    const double norm = std::ldexp(1.0, -d);
    for (Eigen::Index u = 0; u < dim; ++u) {
      const auto [x, y] = members[static_cast<std::size_t>(u)];
      for (std::uint64_t xp = 0; xp < n_vertices; ++xp)
        a(static_cast<Eigen::Index>(xp), u) = (std::popcount((x ^ y) & xp) % 2 == 0) ? norm : -norm;
    }
    RealMatrix projected = lambda * (a.transpose() * a);
    projected.diagonal().array() -= lambda;
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(projected, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw CorruptedState("projected L0 eigen-solve failed");
    const Eigen::VectorXd& ev = solver.eigenvalues();
    sub.computed = detail::cluster(std::vector<double>(ev.data(), ev.data() + ev.size()), cluster_tol);

    std::vector<double> predicted;
    std::size_t assigned = 0;
    for (const auto& e : table.entries()) {
      if (e.n != n) continue;
      predicted.insert(predicted.end(), e.multiplicity, -e.rate);
      assigned += e.multiplicity;
    }
    if (assigned < sub.dimension) predicted.insert(predicted.end(), sub.dimension - assigned, -lambda);
    sub.predicted = detail::cluster(predicted, cluster_tol);

    const std::vector<double> lhs = detail::expand(sub.predicted);
    const std::vector<double> rhs(ev.data(), ev.data() + ev.size());
    if (lhs.size() == rhs.size()) {
      for (std::size_t i = 0; i < lhs.size(); ++i)
        sub.max_mismatch = std::max(sub.max_mismatch, std::abs(lhs[i] - rhs[i]));
      sub.multiplicities_match = sub.predicted.size() == sub.computed.size();
      for (std::size_t i = 0; sub.multiplicities_match && i < sub.predicted.size(); ++i)
        sub.multiplicities_match = sub.predicted[i].multiplicity == sub.computed[i].multiplicity;
    } else {
      sub.max_mismatch = std::numeric_limits<double>::infinity();
      sub.multiplicities_match = false;
    }
    report.max_mismatch = std::max(report.max_mismatch, sub.max_mismatch);
    report.subspaces.push_back(std::move(sub));
  }
  return report;
}

}  // namespace hcwalk
