#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "hcwalk/errors.hpp"

namespace hcwalk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

// Largest hypercube dimension accepted by default. A dense 2^14 x 2^14
// complex matrix is 4 GiB.
inline constexpr int kMaxDimension = 14;

/// Vertex of the d-dimensional hypercube. Bit j of the value is the
/// coordinate x_j, counted from 0 at the least significant bit.
class VertexIndex {
 public:
  constexpr VertexIndex() = default;
  constexpr explicit VertexIndex(std::uint64_t value) : value_(value) {}

  [[nodiscard]] constexpr std::uint64_t value() const { return value_; }
  [[nodiscard]] constexpr int bit(int j) const { return static_cast<int>((value_ >> j) & 1U); }
  [[nodiscard]] constexpr bool fits(int d) const { return value_ < (std::uint64_t{1} << d); }

  friend constexpr bool operator==(VertexIndex, VertexIndex) = default;

 private:
  std::uint64_t value_ = 0;
};

/// |0...0>, where every walk starts.
[[nodiscard]] constexpr VertexIndex corner_start() { return VertexIndex{0}; }

/// |1...1>, the opposite corner.
[[nodiscard]] constexpr VertexIndex corner_target(int d) {
  return VertexIndex{(std::uint64_t{1} << d) - 1};
}

[[nodiscard]] inline int hamming_distance(VertexIndex x, VertexIndex y) {
  return std::popcount(x.value() ^ y.value());
}

/// Dimension d, hopping rate omega and decoherence rate lambda. All
/// quantities are dimensionless.
struct WalkParams {
  int d = 1;
  double omega = 1.0;
  double lambda = 0.0;

  void validate() const {
    if (d < 1) throw InvalidArgument("dimension d must be >= 1, got " + std::to_string(d));
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw InvalidArgument("hopping rate omega must be positive and finite");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw InvalidArgument("decoherence rate lambda must be nonnegative and finite");
  }

  [[nodiscard]] std::size_t size() const { return std::size_t{1} << d; }
};

inline void check_dimension_cap(int d, int cap = kMaxDimension) {
  if (d < 1) throw InvalidArgument("dimension d must be >= 1");
  if (d > cap)
    throw DimensionOverflow("2^" + std::to_string(d) + " exceeds the dimension cap 2^" +
                            std::to_string(cap));
}

/// Adjacency of the hypercube scaled by omega: H[x][y] = omega when x and y
/// differ in exactly one bit.
[[nodiscard]] inline RealMatrix build_hamiltonian(const WalkParams& params, int cap = kMaxDimension) {
  params.validate();
  check_dimension_cap(params.d, cap);
  const auto n = static_cast<Eigen::Index>(params.size());
  RealMatrix h = RealMatrix::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (int j = 0; j < params.d; ++j) h(x, x ^ (Eigen::Index{1} << j)) = params.omega;
  }
  return h;
}

/// Eigenvalue of H on the k-th Walsh-Hadamard vector: omega * (d - 2 popcount(k)).
[[nodiscard]] inline double hamiltonian_eigenvalue(const WalkParams& params, std::uint64_t k) {
  return params.omega * (params.d - 2 * std::popcount(k));
}

namespace walsh {

// Unnormalized in-place Walsh-Hadamard transform of every column.
inline void transform_columns(ComplexMatrix& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Complex* p = m.data() + c * n;
    for (Eigen::Index h = 1; h < n; h <<= 1) {
      for (Eigen::Index i = 0; i < n; i += 2 * h) {
        for (Eigen::Index k = i; k < i + h; ++k) {
          const Complex a = p[k];
          const Complex b = p[k + h];
          p[k] = a + b;
          p[k + h] = a - b;
        }
      }
    }
  }
}

// Unnormalized in-place Walsh-Hadamard transform of every row. Columns are
// contiguous, so the butterflies run over whole column pairs.
inline void transform_rows(ComplexMatrix& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index n = m.cols();
  for (Eigen::Index h = 1; h < n; h <<= 1) {
    for (Eigen::Index i = 0; i < n; i += 2 * h) {
      for (Eigen::Index k = i; k < i + h; ++k) {
        Complex* a = m.data() + k * rows;
        Complex* b = m.data() + (k + h) * rows;
        for (Eigen::Index r = 0; r < rows; ++r) {
          const Complex u = a[r];
          const Complex v = b[r];
          a[r] = u + v;
          b[r] = u - v;
        }
      }
    }
  }
}

/// m <- W m W with W the normalized (symmetric, orthogonal) Hadamard
/// matrix. The map is its own inverse.
inline void conjugate(ComplexMatrix& m) {
  transform_columns(m);
  transform_rows(m);
  m /= static_cast<double>(m.rows());
}

}  // namespace walsh
}  // namespace hcwalk
