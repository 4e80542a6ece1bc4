#include "stochwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stochwave {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double x : values) {
    if (!std::isfinite(x)) throw NonFiniteError(std::string(what) + " produced a non-finite value");
  }
}

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": length " + std::to_string(got) +
                                " does not match basis size " + std::to_string(want));
  }
}

// Worst ratios of the Lipschitz and linear-growth bounds for one pointwise map.
double lattice_ratio(const PointwiseMap& map, double L, std::size_t x_points, std::size_t u_points,
                     double u_max) {
  double worst = 0.0;
  std::vector<double> us(u_points);
  for (std::size_t k = 0; k < u_points; ++k) {
    us[k] = -u_max + 2.0 * u_max * static_cast<double>(k) / static_cast<double>(u_points - 1);
  }
  for (std::size_t j = 1; j <= x_points; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(x_points + 1);
    std::vector<double> vals(u_points);
    for (std::size_t k = 0; k < u_points; ++k) {
      vals[k] = map(x, us[k]);
      worst = std::max(worst, std::abs(vals[k]) / (L * (std::abs(us[k]) + 1.0)));
    }
    for (std::size_t a = 0; a < u_points; ++a) {
      for (std::size_t b = a + 1; b < u_points; ++b) {
        worst = std::max(worst, std::abs(vals[a] - vals[b]) / (L * std::abs(us[a] - us[b])));
      }
    }
  }
  return worst;
}

}  // namespace

LipschitzReport check_lipschitz(const Nonlinearity& nonlinearity, std::size_t x_points,
                                std::size_t u_points, double u_max) {
  if (u_points < 2 || x_points < 1) {
    throw std::invalid_argument("check_lipschitz: lattice needs at least 1 x point and 2 u points");
  }
  LipschitzReport report;
  const double L = nonlinearity.lipschitz_L;
  report.f_worst_ratio = lattice_ratio(nonlinearity.f, L, x_points, u_points, u_max);
  report.g_worst_ratio = lattice_ratio(nonlinearity.g, L, x_points, u_points, u_max);
  report.f_ok = report.f_worst_ratio <= 1.0;
  report.g_ok = report.g_worst_ratio <= 1.0;
  if (!report.f_ok) {
    report.warnings.push_back(
        "f violates the declared Lipschitz/growth constant L = " + std::to_string(L) +
        " (worst ratio " + std::to_string(report.f_worst_ratio) + ")");
  }
  if (!report.g_ok) {
    report.warnings.push_back(
        "g violates the declared Lipschitz/growth constant L = " + std::to_string(L) +
        " (worst ratio " + std::to_string(report.g_worst_ratio) + ")");
  }
  return report;
}

void validate_problem(const Problem& problem) {
  if (!(problem.horizon > 0.0)) throw std::invalid_argument("Problem: horizon must be positive");
  const std::size_t n = problem.basis.size();
  require_length(problem.covariance.size(), n, "Problem covariance");
  require_length(problem.initial.u.size(), n, "Problem initial u");
  require_length(problem.initial.v.size(), n, "Problem initial v");
  if (!problem.nonlinearity.f || !problem.nonlinearity.g) {
    throw std::invalid_argument("Problem: nonlinearity f and g must both be set");
  }
}

Field eval_F(const Problem& problem, const Field& u_hat) {
  const auto& basis = problem.basis;
  require_length(u_hat.size(), basis.size(), "eval_F");
  if (problem.nonlinearity.drift_is_zero) return Field{std::vector<double>(basis.size(), 0.0), 0.0};
  std::vector<double> grid = basis.to_grid(u_hat.coeffs);
  const auto& x = basis.collocation_points();
  for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = problem.nonlinearity.f(x[j], grid[j]);
  require_finite(grid, "f");
  return Field{basis.from_grid(grid), 0.0};
}

Field eval_G_times_increment(const Problem& problem, const Field& u_hat,
                             std::span<const double> increment) {
  const auto& basis = problem.basis;
  require_length(u_hat.size(), basis.size(), "eval_G_times_increment");
  require_length(increment.size(), basis.size(), "eval_G_times_increment");
  if (const auto& sigma = problem.nonlinearity.additive_sigma) {
    Field out{std::vector<double>(increment.begin(), increment.end()), 0.0};
    for (double& c : out.coeffs) c *= *sigma;
    require_finite(out.coeffs, "g");
    return out;
  }
  std::vector<double> grid = basis.to_grid(u_hat.coeffs);
  const std::vector<double> noise = basis.to_grid(increment);
  const auto& x = basis.collocation_points();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    grid[j] = problem.nonlinearity.g(x[j], grid[j]) * noise[j];
  }
  require_finite(grid, "g");
  return Field{basis.from_grid(grid), 0.0};
}

void eval_forcing(const Problem& problem, std::span<const double> u_hat, double tau,
                  std::span<const double> increment, std::span<double> out, ForcingWorkspace& ws) {
  const auto& basis = problem.basis;
  const auto& nl = problem.nonlinearity;
  const std::size_t n = basis.size();
  require_length(u_hat.size(), n, "eval_forcing");
  require_length(out.size(), n, "eval_forcing");
  const bool noisy = !increment.empty();
  if (noisy) require_length(increment.size(), n, "eval_forcing");

  const bool additive = nl.additive_sigma.has_value();
  const bool need_grid = !nl.drift_is_zero || (noisy && !additive);
  if (!need_grid) {
    std::fill(out.begin(), out.end(), 0.0);
  } else {
    ws.grid_u.resize(n);
    ws.grid_total.resize(n);
    basis.to_grid(u_hat, ws.grid_u);
    const auto& x = basis.collocation_points();
    if (nl.drift_is_zero) {
      std::fill(ws.grid_total.begin(), ws.grid_total.end(), 0.0);
    } else {
      for (std::size_t j = 0; j < n; ++j) ws.grid_total[j] = tau * nl.f(x[j], ws.grid_u[j]);
    }
    if (noisy && !additive) {
      ws.grid_noise.resize(n);
      basis.to_grid(increment, ws.grid_noise);
      for (std::size_t j = 0; j < n; ++j)
        ws.grid_total[j] += nl.g(x[j], ws.grid_u[j]) * ws.grid_noise[j];
    }
    basis.from_grid(ws.grid_total, out);
  }
  if (noisy && additive) {
    const double sigma = *nl.additive_sigma;
    for (std::size_t i = 0; i < n; ++i) out[i] += sigma * increment[i];
  }
  require_finite(out, "forcing");
}

StatePair project_initial(const SpectralBasis& basis, const InitialProfile& u0,
                          const InitialProfile& v0) {
  const auto& x = basis.collocation_points();
  std::vector<double> us(x.size()), vs(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    us[j] = u0(x[j]);
    vs[j] = v0(x[j]);
  }
  require_finite(us, "initial displacement");
  require_finite(vs, "initial velocity");
  StatePair state;
  state.u = Field{basis.from_grid(us), 0.0};
  state.v = Field{basis.from_grid(vs), -1.0};
  return state;
}

Nonlinearity sine_gordon_nonlinearity(double sigma0, double sigma1) {
  Nonlinearity nl;
  nl.f = [](double, double u) { return -std::sin(u); };
  nl.g = [sigma0, sigma1](double, double u) { return sigma0 + sigma1 * u; };
  nl.lipschitz_L = std::max({1.0, std::abs(sigma0), std::abs(sigma1)});
  if (sigma1 == 0.0) nl.additive_sigma = sigma0;
  nl.drift_slope = -1.0;
  return nl;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "sine_gordon_strong_white", "sine_gordon_strong_trace", "sine_gordon_weak_additive",
      "linear_homogeneous", "linear_additive"};
  return names;
}

namespace {

Nonlinearity linear_nonlinearity(double sigma0, double sigma1) {
  Nonlinearity nl;
  nl.f = [](double, double) { return 0.0; };
  nl.g = [sigma0, sigma1](double, double u) { return sigma0 + sigma1 * u; };
  nl.lipschitz_L = std::max({1.0, std::abs(sigma0), std::abs(sigma1)});
  nl.drift_is_zero = true;
  if (sigma1 == 0.0) nl.additive_sigma = sigma0;
  nl.drift_slope = 0.0;
  return nl;
}

CovarianceSpec covariance_for_decay(std::size_t n, double r) {
  return r == 0.0 ? CovarianceSpec::white(n) : CovarianceSpec::algebraic_decay(n, r);
}

}  // namespace

Problem preset(const std::string& name, std::size_t n_modes, const PresetOverrides& overrides) {
  SpectralBasis basis(n_modes);
  const double horizon = overrides.horizon.value_or(1.0);

  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double decay = 0.0;
  bool sine_gordon = true;
  bool silent = false;
  InitialProfile u0;
  InitialProfile v0;

  if (name == "sine_gordon_strong_white" || name == "sine_gordon_strong_trace") {
    sigma0 = 0.0;
    sigma1 = 1.0;
    decay = name == "sine_gordon_strong_trace" ? 1.1 : 0.0;
    u0 = [](double) { return 0.0; };
    v0 = [](double x) { return std::cos(x); };
  } else if (name == "sine_gordon_weak_additive") {
    sigma0 = 1.0;
    sigma1 = 0.0;
    u0 = [](double x) { return std::cos(std::numbers::pi * (x - 0.5)); };
    v0 = [](double) { return 0.0; };
  } else if (name == "linear_homogeneous") {
    sine_gordon = false;
    silent = true;
    u0 = [](double x) { return x * (1.0 - x); };
    v0 = [](double x) { return std::cos(x); };
  } else if (name == "linear_additive") {
    sine_gordon = false;
    sigma0 = 1.0;
    u0 = [](double x) { return std::sin(std::numbers::pi * x); };
    v0 = [](double) { return 0.0; };
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }

  sigma0 = overrides.sigma0.value_or(sigma0);
  sigma1 = overrides.sigma1.value_or(sigma1);
  if (overrides.noise_decay) {
    decay = *overrides.noise_decay;
    silent = false;
  }

  CovarianceSpec covariance = silent
                                  ? CovarianceSpec::custom(std::vector<double>(n_modes, 0.0), 1.0)
                                  : covariance_for_decay(n_modes, decay);
  Nonlinearity nl =
      sine_gordon ? sine_gordon_nonlinearity(sigma0, sigma1) : linear_nonlinearity(sigma0, sigma1);
  StatePair initial = project_initial(basis, u0, v0);

  Problem problem{std::move(basis),   std::move(nl), std::move(covariance),
                  std::move(initial), horizon,       name};
  validate_problem(problem);
  return problem;
}

}  // namespace stochwave
