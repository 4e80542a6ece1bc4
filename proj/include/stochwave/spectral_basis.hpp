#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace stochwave {

namespace detail {
class SineTransform;
}

/// Dirichlet sine eigenbasis e_i(x) = sqrt(2) sin(i pi x) of -d^2/dx^2 on (0,1),
/// truncated to the first N modes, with the collocation grid x_j = j/(N+1).
///
/// Grid transforms are a DST-I evaluated through FFTW. The basis is immutable
/// and cheap to copy; copies share the transform plan.
class SpectralBasis {
 public:
  explicit SpectralBasis(std::size_t n_modes);

  std::size_t size() const { return eigenvalues_.size(); }
  /// lambda_i = pi^2 i^2, i = 1..N.
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// sqrt(lambda_i) = pi i.
  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<double>& collocation_points() const { return points_; }

  /// values_j = sum_i coeffs_i e_i(x_j)
  std::vector<double> to_grid(std::span<const double> coeffs) const;
  void to_grid(std::span<const double> coeffs, std::span<double> values) const;

  /// coeffs_i = sqrt(2)/(N+1) sum_j values_j sin(i pi x_j), the exact inverse of to_grid.
  std::vector<double> from_grid(std::span<const double> values) const;
  void from_grid(std::span<const double> values, std::span<double> coeffs) const;

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> frequencies_;
  std::vector<double> points_;
  std::shared_ptr<const detail::SineTransform> transform_;
};

SpectralBasis make_basis(std::size_t n_modes);

/// Coefficient vector <u, e_i> tagged with the Sobolev index gamma of the space
/// H^gamma it is regarded as living in. The tag is metadata only.
struct Field {
  std::vector<double> coeffs;
  double sobolev_index = 0.0;

  std::size_t size() const { return coeffs.size(); }
};

/// X = (u, v) in H = H^0 x H^{-1}.
struct StatePair {
  Field u;
  Field v{{}, -1.0};
};

StatePair zero_state(const SpectralBasis& basis);

std::vector<double> to_grid(const SpectralBasis& basis, const Field& field);
Field from_grid(const SpectralBasis& basis, std::span<const double> values);

/// (sum_i lambda_i^gamma c_i^2)^{1/2}
double sobolev_norm(const SpectralBasis& basis, const Field& field, double gamma);
/// ||X||_H^2 = ||u||_0^2 + ||v||_{-1}^2
double h_norm(const SpectralBasis& basis, const StatePair& state);

/// Scales coeffs_i by lambda_i^gamma; the Sobolev tag shifts by -2 gamma.
Field apply_lambda_power(const SpectralBasis& basis, const Field& field, double gamma);

/// Diagonal multipliers cos(t sqrt(lambda_i)) and sin(t sqrt(lambda_i)).
std::vector<double> cos_op(const SpectralBasis& basis, double t);
std::vector<double> sin_op(const SpectralBasis& basis, double t);

/// Per-mode multipliers of the wave group E(t) = exp(tA), A = [[0, I], [-Lambda, 0]].
struct GroupMultipliers {
  double t = 0.0;
  std::vector<double> cos;
  std::vector<double> sin;
};

GroupMultipliers group_multipliers(const SpectralBasis& basis, double t);

/// E(t) X, mode by mode:
///   u' = C u + Lambda^{-1/2} S v,   v' = -Lambda^{1/2} S u + C v.
StatePair apply_group(const SpectralBasis& basis, double t, const StatePair& state);
StatePair apply_group(const SpectralBasis& basis, const GroupMultipliers& group,
                      const StatePair& state);

}  // namespace stochwave
