#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stochwave/integrators.hpp"
#include "stochwave/model.hpp"

namespace stochwave {

/// Test functional of the displacement coefficients.
struct Functional {
  enum class Kind { PaperPhi, HNormSq, Mode };

  Kind kind = Kind::PaperPhi;
  std::size_t mode = 1;  // 1-based, Kind::Mode only

  /// True when the functional is linear in u.
  bool linear() const { return kind != Kind::HNormSq; }
  std::string name() const;
};

/// paper_phi, h_norm_sq, mode_k(K) (also mode_K).
Functional parse_functional(std::string_view name);

/// paper_phi(u) = 10 int_0^1 u(x) sin(pi x) dx = (10 / sqrt 2) u_1
/// h_norm_sq(u) = ||u||_0^2
/// mode_k(u)    = u_k
double evaluate(const Functional& functional, const SpectralBasis& basis, const Field& u_hat);
double functional(std::string_view name, const SpectralBasis& basis, const Field& u_hat);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual in log space
};

/// Least squares of log(error) against log(tau).
RateFit fit_rate(std::span<const double> taus, std::span<const double> errors);

/// min(delta, 1)
double predicted_strong_rate(double delta);
/// min(2 beta, 1/2 + beta, 1); the epsilon loss in the middle term is dropped.
double predicted_weak_rate(double beta);

struct StrongStudyConfig {
  std::string preset = "sine_gordon_strong_white";
  std::size_t n_modes = 256;
  PresetOverrides overrides;
  std::vector<SchemeKind> schemes = {SchemeKind::LinearImplicitEuler, SchemeKind::CrankNicolson,
                                     SchemeKind::ExponentialEuler};
  std::vector<std::size_t> step_counts = {32, 64, 128, 256};
  SchemeKind reference_scheme = SchemeKind::CrankNicolson;
  std::size_t reference_steps = 2048;
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  /// Also estimate (E sup_m ||u_ref(t_m) - u_m||^2)^{1/2} over the coarse grid.
  bool sup_norm = false;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

struct WeakStudyConfig {
  std::string preset = "sine_gordon_weak_additive";
  std::size_t n_modes = 256;
  PresetOverrides overrides;
  std::vector<SchemeKind> schemes = {SchemeKind::LinearImplicitEuler, SchemeKind::CrankNicolson,
                                     SchemeKind::ExponentialEuler};
  std::vector<std::size_t> step_counts = {8, 16, 32, 64};
  SchemeKind reference_scheme = SchemeKind::CrankNicolson;
  std::size_t reference_steps = 2048;
  std::string functional = "paper_phi";
  std::size_t samples = 1000;
  std::uint64_t seed = 42;
  /// Couple each coarse run to the reference on the same Brownian path.
  bool variance_reduction = true;
  /// With coupling, subtract the same coupled difference for the linearised
  /// problem (f replaced by its slope at u = 0), whose mean is known exactly.
  /// Applies only to additive noise and linear functionals.
  bool control_variate = true;
  std::size_t threads = 0;
};

struct RatePoint {
  SchemeKind scheme = SchemeKind::ExponentialEuler;
  std::size_t steps = 0;
  double tau = 0.0;
  /// Strong: RMS error. Weak: |E phi(u_ref) - E phi(u_M)|.
  double error = 0.0;
  double standard_error = 0.0;
  std::size_t n_samples = 0;
  /// Weak only: signed E phi(u_ref) - E phi(u_M), and E phi(u_M) with its standard error.
  double signed_error = 0.0;
  double estimate = 0.0;
  double estimate_stderr = 0.0;
  /// Strong only, when requested: RMS of the sup over the coarse grid.
  std::optional<double> sup_error;
  std::optional<double> sup_standard_error;
};

struct SchemeFit {
  SchemeKind scheme = SchemeKind::ExponentialEuler;
  std::optional<RateFit> fit;  // absent when an error is zero or fewer than 2 points
  double predicted_rate = 0.0;
};

struct RateReport {
  std::string study;  // "strong" or "weak"
  std::string preset;
  std::string functional;
  SchemeKind reference_scheme = SchemeKind::CrankNicolson;
  std::size_t reference_steps = 0;
  std::size_t n_samples = 0;
  std::size_t failed_samples = 0;
  bool coupled = true;
  bool control_variate = false;
  double reference_estimate = 0.0;  // weak: E phi(u_ref)
  double reference_stderr = 0.0;
  std::vector<RatePoint> points;
  std::vector<SchemeFit> fits;
  std::vector<std::string> warnings;

  const RatePoint* point(SchemeKind scheme, std::size_t steps) const;
  const SchemeFit* fit_for(SchemeKind scheme) const;
};

RateReport strong_study(const StrongStudyConfig& config);
RateReport strong_study(const Problem& problem, const StrongStudyConfig& config);

RateReport weak_study(const WeakStudyConfig& config);
RateReport weak_study(const Problem& problem, const WeakStudyConfig& config);

}  // namespace stochwave
