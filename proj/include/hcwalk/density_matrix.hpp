#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "hcwalk/errors.hpp"
#include "hcwalk/hypercube.hpp"

namespace hcwalk {

/// Dense 2^d x 2^d density matrix rho_{x,y} = <x|rho|y>.
///
/// Construction only checks the shape. Trace, hermiticity and positivity are
/// reported by diagnose() and enforced where an operation depends on them.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    const auto n = static_cast<std::uint64_t>(entries_.rows());
    if (entries_.rows() != entries_.cols() || n < 2 || !std::has_single_bit(n))
      throw InvalidArgument("density matrix must be square with a power-of-two size >= 2");
    d_ = std::countr_zero(n);
  }

  /// Pure state |v><v|.
  [[nodiscard]] static DensityMatrix vertex(int d, VertexIndex v) {
    check_dimension_cap(d);
    if (!v.fits(d)) throw InvalidArgument("vertex index outside the hypercube");
    const auto n = Eigen::Index{1} << d;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(static_cast<Eigen::Index>(v.value()), static_cast<Eigen::Index>(v.value())) = 1.0;
    return DensityMatrix(std::move(m));
  }

  [[nodiscard]] static DensityMatrix maximally_mixed(int d) {
    check_dimension_cap(d);
    const auto n = Eigen::Index{1} << d;
    return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
  }

  [[nodiscard]] int dimension() const { return d_; }
  [[nodiscard]] Eigen::Index size() const { return entries_.rows(); }
  [[nodiscard]] const ComplexMatrix& matrix() const { return entries_; }
  [[nodiscard]] ComplexMatrix& matrix() { return entries_; }
  [[nodiscard]] Complex operator()(Eigen::Index x, Eigen::Index y) const { return entries_(x, y); }

 private:
  ComplexMatrix entries_;
  int d_ = 1;
};

struct Diagnostics {
  double trace_deviation = 0.0;
  double hermiticity_deviation = 0.0;  // max |rho_xy - conj(rho_yx)|
  double min_eigenvalue = 0.0;
};

namespace detail {

inline double hermiticity_deviation(const ComplexMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index y = 0; y < m.cols(); ++y)
    for (Eigen::Index x = 0; x <= y; ++x)
      worst = std::max(worst, std::abs(m(x, y) - std::conj(m(y, x))));
  return worst;
}

inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw CorruptedState("eigenvalue solver did not converge");
  return solver.eigenvalues();
}

}  // namespace detail

/// Largest imaginary part tolerated on a diagonal entry.
inline constexpr double kDiagonalImagTolerance = 1e-10;
/// Eigenvalues below -kPositivityTolerance are a genuine loss of
/// positivity; smaller negative values are roundoff and count as zero.
inline constexpr double kPositivityTolerance = 1e-8;

/// Population <target|rho|target>.
[[nodiscard]] inline double hitting_probability(const DensityMatrix& rho, VertexIndex target) {
  if (!target.fits(rho.dimension())) throw InvalidArgument("target vertex outside the hypercube");
  const auto i = static_cast<Eigen::Index>(target.value());
  const Complex value = rho(i, i);
  if (std::abs(value.imag()) > kDiagonalImagTolerance)
    throw CorruptedState("diagonal entry has imaginary part " + std::to_string(value.imag()));
  return value.real();
}

/// Von Neumann entropy in bits from a list of eigenvalues, applying the
/// roundoff clipping rule.
[[nodiscard]] inline double entropy_from_eigenvalues(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (const double e : eigenvalues) {
    if (e < -kPositivityTolerance)
      throw CorruptedState("eigenvalue " + std::to_string(e) + " below positivity tolerance");
    if (e <= 0.0) continue;  // clipped window and 0 log 0
    s -= e * std::log2(e);
  }
  return std::max(s, 0.0);
}

/// S = -tr[rho log2 rho], in bits.
[[nodiscard]] inline double von_neumann_entropy(const ComplexMatrix& rho) {
  if (detail::hermiticity_deviation(rho) > kPositivityTolerance)
    throw InvalidArgument("entropy requires a Hermitian matrix");
  return entropy_from_eigenvalues(detail::hermitian_eigenvalues(rho));
}

[[nodiscard]] inline double von_neumann_entropy(const DensityMatrix& rho) {
  return von_neumann_entropy(rho.matrix());
}

/// Trace deviation, hermiticity deviation and minimum eigenvalue. Never
/// throws on a bad state; it only reports.
[[nodiscard]] inline Diagnostics diagnose(const ComplexMatrix& rho) {
  Diagnostics out;
  out.trace_deviation = std::abs(rho.trace() - Complex{1.0, 0.0});
  out.hermiticity_deviation = detail::hermiticity_deviation(rho);
  const ComplexMatrix symmetric = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(symmetric, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.info() == Eigen::Success ? solver.eigenvalues().minCoeff()
                                                       : std::numeric_limits<double>::quiet_NaN();
  return out;
}

[[nodiscard]] inline Diagnostics diagnose(const DensityMatrix& rho) { return diagnose(rho.matrix()); }

}  // namespace hcwalk
