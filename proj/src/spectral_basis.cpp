#include "stochwave/spectral_basis.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stochwave {

namespace detail {

// DST-I via FFTW's RODFT00: Y_k = 2 sum_j X_j sin(pi (j+1)(k+1) / (n+1)).
class SineTransform {
 public:
  explicit SineTransform(std::size_t n) : n_(n) {
    // Planner calls are not thread-safe; execution with new arrays is.
    static std::mutex planner_mutex;
    std::lock_guard lock(planner_mutex);
    std::vector<double> in(n), out(n);
    plan_ = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(), FFTW_RODFT00,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) {
      throw std::runtime_error("FFTW failed to create a DST-I plan of size " + std::to_string(n));
    }
  }
  ~SineTransform() { fftw_destroy_plan(plan_); }
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  /// out = scale * DST-I(in). in and out may alias.
  void apply(std::span<const double> in, std::span<double> out, double scale) const {
    if (in.data() == out.data()) {
      thread_local std::vector<double> scratch;
      scratch.assign(in.begin(), in.end());
      fftw_execute_r2r(plan_, scratch.data(), out.data());
    } else {
      // FFTW takes a non-const input pointer but RODFT00 out-of-place leaves it intact.
      fftw_execute_r2r(plan_, const_cast<double*>(in.data()), out.data());
    }
    for (double& x : out) x *= scale;
  }

  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

namespace {

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": length " + std::to_string(got) +
                                " does not match basis size " + std::to_string(want));
  }
}

}  // namespace

SpectralBasis::SpectralBasis(std::size_t n_modes) {
  if (n_modes == 0) throw std::invalid_argument("SpectralBasis: n_modes must be at least 1");
  eigenvalues_.resize(n_modes);
  frequencies_.resize(n_modes);
  points_.resize(n_modes);
  const double h = 1.0 / static_cast<double>(n_modes + 1);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double k = static_cast<double>(i + 1);
    frequencies_[i] = std::numbers::pi * k;
    eigenvalues_[i] = frequencies_[i] * frequencies_[i];
    points_[i] = k * h;
  }
  transform_ = std::make_shared<const detail::SineTransform>(n_modes);
}

std::vector<double> SpectralBasis::to_grid(std::span<const double> coeffs) const {
  std::vector<double> values(size());
  to_grid(coeffs, values);
  return values;
}

void SpectralBasis::to_grid(std::span<const double> coeffs, std::span<double> values) const {
  require_length(coeffs.size(), size(), "to_grid");
  require_length(values.size(), size(), "to_grid");
  transform_->apply(coeffs, values, std::numbers::sqrt2 / 2.0);
}

std::vector<double> SpectralBasis::from_grid(std::span<const double> values) const {
  std::vector<double> coeffs(size());
  from_grid(values, coeffs);
  return coeffs;
}

void SpectralBasis::from_grid(std::span<const double> values, std::span<double> coeffs) const {
  require_length(values.size(), size(), "from_grid");
  require_length(coeffs.size(), size(), "from_grid");
  transform_->apply(values, coeffs, std::numbers::sqrt2 / (2.0 * static_cast<double>(size() + 1)));
}

SpectralBasis make_basis(std::size_t n_modes) { return SpectralBasis(n_modes); }

StatePair zero_state(const SpectralBasis& basis) {
  StatePair x;
  x.u.coeffs.assign(basis.size(), 0.0);
  x.v.coeffs.assign(basis.size(), 0.0);
  return x;
}

std::vector<double> to_grid(const SpectralBasis& basis, const Field& field) {
  return basis.to_grid(field.coeffs);
}

Field from_grid(const SpectralBasis& basis, std::span<const double> values) {
  return Field{basis.from_grid(values), 0.0};
}

double sobolev_norm(const SpectralBasis& basis, const Field& field, double gamma) {
  require_length(field.size(), basis.size(), "sobolev_norm");
  const auto& lambda = basis.eigenvalues();
  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    sum += std::exp(gamma * std::log(lambda[i])) * field.coeffs[i] * field.coeffs[i];
  }
  return std::sqrt(sum);
}

double h_norm(const SpectralBasis& basis, const StatePair& state) {
  require_length(state.u.size(), basis.size(), "h_norm");
  require_length(state.v.size(), basis.size(), "h_norm");
  const auto& lambda = basis.eigenvalues();
  double sum = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    sum +=
        state.u.coeffs[i] * state.u.coeffs[i] + state.v.coeffs[i] * state.v.coeffs[i] / lambda[i];
  }
  return std::sqrt(sum);
}

Field apply_lambda_power(const SpectralBasis& basis, const Field& field, double gamma) {
  require_length(field.size(), basis.size(), "apply_lambda_power");
  Field out{field.coeffs, field.sobolev_index - 2.0 * gamma};
  if (gamma == 0.0) return out;
  const auto& lambda = basis.eigenvalues();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.coeffs[i] *= std::exp(gamma * std::log(lambda[i]));
  }
  return out;
}

std::vector<double> cos_op(const SpectralBasis& basis, double t) {
  std::vector<double> c(basis.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::cos(t * basis.frequencies()[i]);
  return c;
}

std::vector<double> sin_op(const SpectralBasis& basis, double t) {
  std::vector<double> s(basis.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(t * basis.frequencies()[i]);
  return s;
}

GroupMultipliers group_multipliers(const SpectralBasis& basis, double t) {
  return GroupMultipliers{t, cos_op(basis, t), sin_op(basis, t)};
}

StatePair apply_group(const SpectralBasis& basis, double t, const StatePair& state) {
  return apply_group(basis, group_multipliers(basis, t), state);
}

StatePair apply_group(const SpectralBasis& basis, const GroupMultipliers& group,
                      const StatePair& state) {
  const std::size_t n = basis.size();
  require_length(state.u.size(), n, "apply_group");
  require_length(state.v.size(), n, "apply_group");
  require_length(group.cos.size(), n, "apply_group");
  StatePair out = state;
  const auto& w = basis.frequencies();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = state.u.coeffs[i];
    const double v = state.v.coeffs[i];
    out.u.coeffs[i] = group.cos[i] * u + group.sin[i] / w[i] * v;
    out.v.coeffs[i] = -w[i] * group.sin[i] * u + group.cos[i] * v;
  }
  return out;
}

}  // namespace stochwave
