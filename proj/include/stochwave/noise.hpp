#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stochwave/spectral_basis.hpp"

namespace stochwave {

/// Covariance operator Q = sum_i q_i <., e_i> e_i, diagonal in the sine basis.
///
/// predicted_delta is the regularity exponent the regime induces on the
/// solution; it only feeds the theoretical rates printed next to measured ones.
struct CovarianceSpec {
  enum class Kind { White, AlgebraicDecay, Custom };

  Kind kind = Kind::White;
  double decay_exponent = 0.0;
  std::vector<double> q;
  double predicted_delta = 0.5;

  /// q_i = 1 (space-time white noise). delta = 1/2 (minus an arbitrarily small epsilon).
  static CovarianceSpec white(std::size_t n_modes);
  /// q_i = i^{-r}. delta = min(1, (1 + r)/2).
  static CovarianceSpec algebraic_decay(std::size_t n_modes, double r);
  /// Arbitrary nonnegative eigenvalues with a caller-declared delta.
  static CovarianceSpec custom(std::vector<double> q, double predicted_delta);

  std::size_t size() const { return q.size(); }
  std::string describe() const;
};

/// Partial sums of Tr(Lambda^{beta - 1/2} Q Lambda^{-1/2}) = sum_i lambda_i^{beta-1} q_i.
struct RegularityTrace {
  double total = 0.0;
  double tail_fraction = 0.0;  // share contributed by the upper half of the modes
  bool plateaued = true;
};

/// plateaued is false when the upper half of the modes contributes more than
/// `tolerance` of the total, i.e. the truncated sum has not converged.
RegularityTrace regularity_trace(const SpectralBasis& basis, const CovarianceSpec& covariance,
                                 double beta, double tolerance = 0.01);

/// Q-Wiener increments dW_{m,i} ~ N(0, q_i dt), stored row-major (step, mode).
struct BrownianPath {
  std::size_t n_steps = 0;
  std::size_t n_modes = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t sample_index = 0;
  std::vector<double> increments;

  std::span<const double> row(std::size_t m) const {
    return {increments.data() + m * n_modes, n_modes};
  }
};

/// The generator for (seed, sample_index) is derived statelessly from both
/// values, so samples can be produced in any order on any thread.
BrownianPath sample_path(const CovarianceSpec& covariance, const SpectralBasis& basis,
                         std::size_t n_steps, double dt, std::uint64_t seed,
                         std::uint64_t sample_index);

/// Sums consecutive blocks of `factor` increments.
BrownianPath coarsen(const BrownianPath& path, std::size_t factor);

/// dW(x_j) = sum_i dW_i e_i(x_j)
std::vector<double> increment_on_grid(const SpectralBasis& basis,
                                      std::span<const double> increment_row);

/// Binary dump: u64 N, u64 M, f64 dt, u64 seed, then M*N f64 increments
/// row-major. All little-endian.
void write_path_binary(const BrownianPath& path, const std::filesystem::path& file);
BrownianPath read_path_binary(const std::filesystem::path& file);

}  // namespace stochwave
