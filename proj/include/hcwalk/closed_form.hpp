#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcwalk/combinatorics.hpp"
#include "hcwalk/errors.hpp"
#include "hcwalk/hypercube.hpp"

namespace hcwalk {

/// Thrown when a closed-form probability leaves [0, 1] by more than
/// roundoff. Signals a bug, never a recoverable condition.
class RangeAssertion : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kProbabilitySlack = 1e-12;

namespace detail {

inline void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be finite and >= 0");
}

inline double assert_probability(double value, const char* what) {
  if (!(value >= -kProbabilitySlack && value <= 1.0 + kProbabilitySlack))
    throw RangeAssertion(std::string(what) + " left [0, 1]: " + std::to_string(value));
  return value;
}

}  // namespace detail

/// Coherent transfer probability |<b|e^{-iHt}|a>|^2 = sin(omega t)^{2d}.
[[nodiscard]] inline double unitary_hitting(const WalkParams& params, double t) {
  params.validate();
  detail::check_time(t);
  return std::pow(std::sin(params.omega * t), 2 * params.d);
}

enum class SubspaceRegime { Underdamped, Critical, Overdamped };

/// beta^2 = 16 omega^2 - lambda^2 decides whether the single-bit factor
/// oscillates or decays monotonically.
[[nodiscard]] inline SubspaceRegime subspace_regime(const WalkParams& params) {
  const double beta_sq = 16.0 * params.omega * params.omega - params.lambda * params.lambda;
  if (beta_sq > 0.0) return SubspaceRegime::Underdamped;
  if (beta_sq < 0.0) return SubspaceRegime::Overdamped;
  return SubspaceRegime::Critical;
}

[[nodiscard]] inline const char* to_string(SubspaceRegime r) {
  switch (r) {
    case SubspaceRegime::Underdamped: return "underdamped";
    case SubspaceRegime::Critical: return "critical";
    case SubspaceRegime::Overdamped: return "overdamped";
  }
  return "unknown";
}

/// Exact hitting probability of the subspace model starting from |a><a|:
///   P_s(t) = 2^{-d} [1 - e^{-lambda t/2} (cos(beta t/2) + (lambda/beta) sin(beta t/2))]^d
/// For lambda > 4 omega the bracket continues to cosh/sinh.
[[nodiscard]] inline double subspace_hitting(const WalkParams& params, double t) {
  params.validate();
  detail::check_time(t);
  const double lam = params.lambda;
  const double beta_sq = 16.0 * params.omega * params.omega - lam * lam;
  double damped = 0.0;  // e^{-lambda t/2} {cos + (lambda/beta) sin}
  if (beta_sq > 0.0) {
    const double beta = std::sqrt(beta_sq);
    damped = std::exp(-lam * t / 2.0) *
             (std::cos(beta * t / 2.0) + lam / beta * std::sin(beta * t / 2.0));
  } else if (beta_sq < 0.0) {
    // Written as two decaying exponentials so large t cannot overflow.
    const double kappa = std::sqrt(-beta_sq);
    damped = 0.5 * (1.0 + lam / kappa) * std::exp((kappa - lam) * t / 2.0) +
             0.5 * (1.0 - lam / kappa) * std::exp(-(kappa + lam) * t / 2.0);
  } else {
    damped = std::exp(-lam * t / 2.0) * (1.0 + lam * t / 2.0);
  }
  const double single = 0.5 * (1.0 - damped);
  return detail::assert_probability(std::pow(single, params.d), "subspace hitting probability");
}

/// d_p = (d-n+2p)! / [p! (d-n+p)!]: ways to place p paired excitations.
[[nodiscard]] inline std::uint64_t pair_count(int d, int n, int p) {
  return binomial(d - n + 2 * p, p);
}

/// Number of unpaired-index sets, d! / [(n-2p)! (d-n+2p)!].
[[nodiscard]] inline std::uint64_t unpaired_multiplicity(int d, int n, int p) {
  return binomial(d, n - 2 * p);
}

[[nodiscard]] inline int min_pairs(int d, int n) { return std::max(0, n - d); }
[[nodiscard]] inline int max_pairs(int n) { return n / 2; }

/// lambda_pn = lambda (1 - 2^{n-d-2p} (d-n+2p)! / [p! (d-n+p)!]).
[[nodiscard]] inline double vertex_decay_rate(int d, double lambda, int n, int p) {
  if (d < 1) throw InvalidArgument("dimension d must be >= 1");
  if (n < 0 || n > 2 * d) throw InvalidArgument("subspace index n out of range [0, 2d]");
  if (p < min_pairs(d, n) || p > max_pairs(n))
    throw InvalidArgument("pair count p=" + std::to_string(p) + " out of range for n=" + std::to_string(n));
  const double ratio = std::ldexp(static_cast<double>(pair_count(d, n, p)), n - d - 2 * p);
  return lambda * (1.0 - ratio);
}

/// All lambda_pn with their multiplicities for one (d, lambda).
class DecayRateTable {
 public:
  struct Entry {
    int n = 0;
    int p = 0;
    double rate = 0.0;
    std::uint64_t multiplicity = 0;  // d! / [(n-2p)! (d-n+2p)!]
    std::uint64_t pair_count = 0;    // d_p
  };

  DecayRateTable(int d, double lambda, int cap = kMaxDimension) : d_(d), lambda_(lambda) {
    check_dimension_cap(d, cap);
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    for (int n = 0; n <= 2 * d; ++n) {
      for (int p = min_pairs(d, n); p <= max_pairs(n); ++p) {
        entries_.push_back({n, p, vertex_decay_rate(d, lambda, n, p), unpaired_multiplicity(d, n, p),
                            pair_count(d, n, p)});
      }
    }
  }

  [[nodiscard]] int dimension() const { return d_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }

  [[nodiscard]] const Entry& at(int n, int p) const {
    for (const auto& e : entries_)
      if (e.n == n && e.p == p) return e;
    throw InvalidArgument("no table entry for (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
  }

  /// Sum over p of multiplicity * 2^{n-2p} * d_p: the number of L0
  /// eigenvectors the construction assigns to subspace n.
  [[nodiscard]] std::uint64_t constructed_states(int n) const {
    std::uint64_t total = 0;
    for (const auto& e : entries_)
      if (e.n == n) total += e.multiplicity * (std::uint64_t{1} << (n - 2 * e.p)) * e.pair_count;
    return total;
  }

  /// (2d)! / [n! (2d-n)!], the degeneracy of the n-th eigenvalue of the
  /// Hamiltonian superoperator.
  [[nodiscard]] std::uint64_t subspace_degeneracy(int n) const { return binomial(2 * d_, n); }

 private:
  int d_;
  double lambda_;
  std::vector<Entry> entries_;
};

[[nodiscard]] inline DecayRateTable build_decay_table(const WalkParams& params) {
  params.validate();
  return DecayRateTable(params.d, params.lambda);
}

/// Perturbative hitting probability for the vertex model,
///   P_v(t) = sum_{n=0}^{d} (-1)^{d-n} g_n(t) cos(2 omega t (d-n)),
///   g_n(t) = sum_p d! (2 - delta_{n,d}) 2^{n-2p-2d} / [p! (n-2p)! (d-n+p)!] e^{-lambda_pn t}.
/// Weights and rates are computed once; evaluate() is cheap.
class PerturbativeSeries {
 public:
  struct Term {
    int n = 0;
    double frequency = 0.0;  // 2 omega (d - n)
    double sign = 1.0;       // (-1)^{d-n}
    std::vector<double> weights;
    std::vector<double> rates;
  };

  explicit PerturbativeSeries(const WalkParams& params) : params_(params) {
    params.validate();
    check_dimension_cap(params.d);
    const int d = params.d;
    for (int n = 0; n <= d; ++n) {
      Term term;
      term.n = n;
      term.frequency = 2.0 * params.omega * (d - n);
      term.sign = ((d - n) % 2 == 0) ? 1.0 : -1.0;
      const double fold = (n == d) ? 1.0 : 2.0;
      for (int p = 0; p <= max_pairs(n); ++p) {
        // d!/[p!(n-2p)!(d-n+p)!] = C(d, n-2p) C(d-n+2p, p)
        const double count = static_cast<double>(unpaired_multiplicity(d, n, p)) *
                             static_cast<double>(pair_count(d, n, p));
        term.weights.push_back(fold * std::ldexp(count, n - 2 * p - 2 * d));
        term.rates.push_back(vertex_decay_rate(d, params.lambda, n, p));
      }
      terms_.push_back(std::move(term));
    }
  }

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }

  [[nodiscard]] double g(int n, double t) const {
    const Term& term = terms_.at(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (std::size_t i = 0; i < term.weights.size(); ++i)
      sum += term.weights[i] * std::exp(-term.rates[i] * t);
    return sum;
  }

  [[nodiscard]] double evaluate(double t) const {
    detail::check_time(t);
    double total = 0.0;
    for (const Term& term : terms_) total += term.sign * g(term.n, t) * std::cos(term.frequency * t);
    return total;
  }

 private:
  WalkParams params_;
  std::vector<Term> terms_;
};

/// Ratio lambda/omega above which the weak-decoherence series is reported
/// but flagged.
inline constexpr double kPerturbativeValidityRatio = 0.5;

[[nodiscard]] inline bool perturbative_valid(const WalkParams& params) {
  return params.lambda / params.omega <= kPerturbativeValidityRatio;
}

[[nodiscard]] inline double vertex_hitting_perturbative(const WalkParams& params, double t) {
  return PerturbativeSeries(params).evaluate(t);
}

/// e^{-lambda T}, a dimension-independent lower bound on the vertex-model
/// hitting probability.
[[nodiscard]] inline double vertex_hitting_lower_bound(const WalkParams& params, double hitting_time) {
  params.validate();
  detail::check_time(hitting_time);
  return std::exp(-params.lambda * hitting_time);
}

/// e^{-d lambda T / 4}, the small-lambda form of the subspace-model
/// probability at the hitting time.
[[nodiscard]] inline double subspace_asymptote(const WalkParams& params, double hitting_time) {
  params.validate();
  detail::check_time(hitting_time);
  return std::exp(-params.d * params.lambda * hitting_time / 4.0);
}

/// Per-step measurement probability p = 2 lambda T / (pi d) for a
/// discrete-time walk that loses information at the same total rate.
[[nodiscard]] inline double kendon_tregenna_probability(double lambda, double hitting_time, int d) {
  if (!(lambda >= 0.0) || !(hitting_time > 0.0) || d < 1)
    throw InvalidArgument("kendon_tregenna_probability needs lambda >= 0, T > 0, d >= 1");
  return 2.0 * lambda * hitting_time / (std::numbers::pi * d);
}

/// First coherent hitting time pi / (2 omega).
[[nodiscard]] inline double hitting_time(const WalkParams& params) {
  return std::numbers::pi / (2.0 * params.omega);
}

}  // namespace hcwalk
