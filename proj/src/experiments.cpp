#include "stochwave/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace stochwave {

std::string Functional::name() const {
  switch (kind) {
    case Kind::PaperPhi:
      return "paper_phi";
    case Kind::HNormSq:
      return "h_norm_sq";
    case Kind::Mode:
      return "mode_k(" + std::to_string(mode) + ")";
  }
  return "unknown";
}

Functional parse_functional(std::string_view name) {
  if (name == "paper_phi") return {Functional::Kind::PaperPhi, 1};
  if (name == "h_norm_sq") return {Functional::Kind::HNormSq, 1};
  std::string_view digits;
  if (name.starts_with("mode_k(") && name.ends_with(")")) {
    digits = name.substr(7, name.size() - 8);
  } else if (name.starts_with("mode_") && name.size() > 5 &&
             std::isdigit(static_cast<unsigned char>(name[5]))) {
    digits = name.substr(5);
  }
  if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
      })) {
    const std::size_t k = std::stoul(std::string(digits));
    if (k >= 1) return {Functional::Kind::Mode, k};
  }
  throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

double evaluate(const Functional& f, const SpectralBasis& basis, const Field& u_hat) {
  if (u_hat.size() != basis.size()) throw std::invalid_argument("functional: size mismatch");
  switch (f.kind) {
    case Functional::Kind::PaperPhi:
      // int_0^1 e_1(x) sin(pi x) dx = 1 / sqrt 2
      return 10.0 / std::numbers::sqrt2 * u_hat.coeffs[0];
    case Functional::Kind::HNormSq: {
      double s = 0.0;
      for (double c : u_hat.coeffs) s += c * c;
      return s;
    }
    case Functional::Kind::Mode:
      if (f.mode > basis.size()) {
        throw std::invalid_argument("functional: mode " + std::to_string(f.mode) +
                                    " exceeds basis size");
      }
      return u_hat.coeffs[f.mode - 1];
  }
  return 0.0;
}

double functional(std::string_view name, const SpectralBasis& basis, const Field& u_hat) {
  return evaluate(parse_functional(name), basis, u_hat);
}

RateFit fit_rate(std::span<const double> taus, std::span<const double> errors) {
  if (taus.size() != errors.size()) throw std::invalid_argument("fit_rate: length mismatch");
  if (taus.size() < 2) throw std::invalid_argument("fit_rate: need at least 2 points");
  const std::size_t n = taus.size();
  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(taus[k] > 0.0) || !(errors[k] > 0.0)) {
      throw std::invalid_argument("fit_rate: step sizes and errors must be positive");
    }
    x[k] = std::log(taus[k]);
    y[k] = std::log(errors[k]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: step sizes must not all be equal");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = y[k] - (fit.intercept + fit.slope * x[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

double predicted_strong_rate(double delta) { return std::min(delta, 1.0); }

double predicted_weak_rate(double beta) { return std::min({2.0 * beta, 0.5 + beta, 1.0}); }

const RatePoint* RateReport::point(SchemeKind scheme, std::size_t steps) const {
  for (const auto& p : points) {
    if (p.scheme == scheme && p.steps == steps) return &p;
  }
  return nullptr;
}

const SchemeFit* RateReport::fit_for(SchemeKind scheme) const {
  for (const auto& f : fits) {
    if (f.scheme == scheme) return &f;
  }
  return nullptr;
}

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
    m.variance /= static_cast<double>(xs.size() - 1);
  }
  return m;
}

// Runs work(s) for s in [0, count) on up to `threads` workers. Results land in
// slot s, so the caller reduces them in sample order regardless of scheduling.
// A NonFiniteError marks the sample failed; any other exception is rethrown.
template <typename Result, typename Work>
std::vector<std::optional<Result>> run_samples(std::size_t count, std::size_t threads, Work work) {
  std::vector<std::optional<Result>> results(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (std::size_t s = next++; s < count; s = next++) {
      try {
        results[s] = work(s);
      } catch (const NonFiniteError&) {
        results[s].reset();
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

void check_failures(std::size_t failed, std::size_t total) {
  if (static_cast<double>(failed) > 0.01 * static_cast<double>(total)) {
    throw std::runtime_error("study failed: " + std::to_string(failed) + " of " +
                             std::to_string(total) + " samples produced non-finite states");
  }
}

void check_common(const std::vector<SchemeKind>& schemes, const std::vector<std::size_t>& steps,
                  std::size_t reference_steps, std::size_t samples) {
  if (schemes.empty()) throw std::invalid_argument("study: no schemes selected");
  if (steps.empty()) throw std::invalid_argument("study: no step counts given");
  if (samples < 2) throw std::invalid_argument("study: at least 2 samples are required");
  if (reference_steps == 0)
    throw std::invalid_argument("study: reference step count must be positive");
  for (std::size_t m : steps) {
    if (m == 0 || reference_steps % m != 0) {
      throw std::invalid_argument("study: step count " + std::to_string(m) +
                                  " does not divide the reference step count " +
                                  std::to_string(reference_steps));
    }
  }
}

struct Run {
  SchemeKind scheme;
  std::size_t steps;
  StepPlan plan;
};

std::vector<Run> make_runs(const Problem& problem, const std::vector<SchemeKind>& schemes,
                           const std::vector<std::size_t>& steps) {
  std::vector<Run> runs;
  for (SchemeKind s : schemes) {
    for (std::size_t m : steps) {
      runs.push_back({s, m, plan(problem.basis, s, problem.horizon / static_cast<double>(m))});
    }
  }
  return runs;
}

double squared_distance(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.coeffs[i] - b.coeffs[i];
    s += d * d;
  }
  return s;
}

std::vector<SchemeFit> fit_schemes(const std::vector<RatePoint>& points,
                                   const std::vector<SchemeKind>& schemes, double predicted) {
  std::vector<SchemeFit> fits;
  for (SchemeKind s : schemes) {
    std::vector<double> taus, errors;
    bool fittable = true;
    for (const auto& p : points) {
      if (p.scheme != s) continue;
      taus.push_back(p.tau);
      errors.push_back(p.error);
      fittable = fittable && p.error > 0.0 && std::isfinite(p.error);
    }
    SchemeFit f{s, std::nullopt, predicted};
    if (fittable && taus.size() >= 2) f.fit = fit_rate(taus, errors);
    fits.push_back(f);
  }
  return fits;
}

}  // namespace

RateReport strong_study(const StrongStudyConfig& config) {
  return strong_study(preset(config.preset, config.n_modes, config.overrides), config);
}

RateReport strong_study(const Problem& problem, const StrongStudyConfig& config) {
  validate_problem(problem);
  check_common(config.schemes, config.step_counts, config.reference_steps, config.samples);

  const std::size_t m_ref = config.reference_steps;
  const double dt = problem.horizon / static_cast<double>(m_ref);
  const StepPlan ref_plan = plan(problem.basis, config.reference_scheme, dt);
  const std::vector<Run> runs = make_runs(problem, config.schemes, config.step_counts);

  struct Sample {
    std::vector<double> sq;
    std::vector<double> sup_sq;
  };

  auto work = [&](std::size_t s) {
    const BrownianPath path =
        sample_path(problem.covariance, problem.basis, m_ref, dt, config.seed, s);
    const Trajectory ref = integrate(problem, ref_plan, m_ref, path.increments, config.sup_norm);
    Sample out{std::vector<double>(runs.size()), std::vector<double>(runs.size(), 0.0)};
    std::vector<std::pair<std::size_t, BrownianPath>> coarse;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const std::size_t factor = m_ref / runs[k].steps;
      auto it = std::find_if(coarse.begin(), coarse.end(),
                             [&](const auto& c) { return c.first == factor; });
      if (it == coarse.end()) {
        coarse.emplace_back(factor, coarsen(path, factor));
        it = std::prev(coarse.end());
      }
      const Trajectory traj =
          integrate(problem, runs[k].plan, runs[k].steps, it->second.increments, config.sup_norm);
      out.sq[k] = squared_distance(ref.final_state.u, traj.final_state.u);
      if (config.sup_norm) {
        double sup = 0.0;
        for (std::size_t m = 0; m <= runs[k].steps; ++m) {
          sup = std::max(sup, squared_distance(ref.states[m * factor].u, traj.states[m].u));
        }
        out.sup_sq[k] = sup;
      }
    }
    return out;
  };
  const auto results = run_samples<Sample>(config.samples, config.threads, work);

  RateReport report;
  report.study = "strong";
  report.preset = problem.preset_name;
  report.reference_scheme = config.reference_scheme;
  report.reference_steps = m_ref;
  for (const auto& r : results) {
    if (!r) ++report.failed_samples;
  }
  check_failures(report.failed_samples, config.samples);
  report.n_samples = config.samples - report.failed_samples;

  const double sqrt_n = std::sqrt(static_cast<double>(report.n_samples));
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::vector<double> sq, sup;
    for (const auto& r : results) {
      if (!r) continue;
      sq.push_back(r->sq[k]);
      sup.push_back(r->sup_sq[k]);
    }
    RatePoint p;
    p.scheme = runs[k].scheme;
    p.steps = runs[k].steps;
    p.tau = problem.horizon / static_cast<double>(runs[k].steps);
    p.n_samples = report.n_samples;
    // Delta method: se(sqrt(m)) = se(m) / (2 sqrt(m)).
    const Moments m = moments(sq);
    p.error = std::sqrt(m.mean);
    p.standard_error = p.error > 0.0 ? std::sqrt(m.variance) / sqrt_n / (2.0 * p.error) : 0.0;
    if (config.sup_norm) {
      const Moments ms = moments(sup);
      p.sup_error = std::sqrt(ms.mean);
      p.sup_standard_error =
          *p.sup_error > 0.0 ? std::sqrt(ms.variance) / sqrt_n / (2.0 * *p.sup_error) : 0.0;
    }
    report.points.push_back(p);
  }
  report.fits = fit_schemes(report.points, config.schemes,
                            predicted_strong_rate(problem.covariance.predicted_delta));
  return report;
}

RateReport weak_study(const WeakStudyConfig& config) {
  return weak_study(preset(config.preset, config.n_modes, config.overrides), config);
}

RateReport weak_study(const Problem& problem, const WeakStudyConfig& config) {
  validate_problem(problem);
  check_common(config.schemes, config.step_counts, config.reference_steps, config.samples);
  const Functional phi = parse_functional(config.functional);

  const std::size_t m_ref = config.reference_steps;
  const double dt = problem.horizon / static_cast<double>(m_ref);
  const StepPlan ref_plan = plan(problem.basis, config.reference_scheme, dt);
  const std::vector<Run> runs = make_runs(problem, config.schemes, config.step_counts);

  RateReport report;
  report.study = "weak";
  report.preset = problem.preset_name;
  report.functional = phi.name();
  report.reference_scheme = config.reference_scheme;
  report.reference_steps = m_ref;
  report.coupled = config.variance_reduction;

  const bool use_cv = config.variance_reduction && config.control_variate &&
                      problem.nonlinearity.additive_sigma.has_value() && phi.linear();
  report.control_variate = use_cv;
  if (config.variance_reduction && config.control_variate && !use_cv) {
    report.warnings.push_back(
        "control variate skipped: it needs additive noise and a linear functional");
  }

  // Linearised control: same noise, f replaced by f'(0) u.
  Problem control = problem;
  std::vector<double> control_mean(runs.size(), 0.0);
  if (use_cv) {
    const double slope = problem.nonlinearity.drift_slope.value_or(0.0);
    control.nonlinearity.f = [slope](double, double u) { return slope * u; };
    control.nonlinearity.drift_is_zero = slope == 0.0;
    const double ref_det =
        evaluate(phi, problem.basis, integrate(control, ref_plan, m_ref, {}).final_state.u);
    for (std::size_t k = 0; k < runs.size(); ++k) {
      control_mean[k] =
          ref_det - evaluate(phi, problem.basis,
                             integrate(control, runs[k].plan, runs[k].steps, {}).final_state.u);
    }
  }

  struct Sample {
    double ref = 0.0;
    double ref_control = 0.0;
    std::vector<double> coarse;
    std::vector<double> coarse_control;
  };

  auto work = [&](std::size_t s) {
    const BrownianPath path =
        sample_path(problem.covariance, problem.basis, m_ref, dt, config.seed, s);
    Sample out;
    out.coarse.resize(runs.size());
    out.coarse_control.resize(runs.size());
    out.ref = evaluate(phi, problem.basis,
                       integrate(problem, ref_plan, m_ref, path.increments).final_state.u);
    if (use_cv) {
      out.ref_control = evaluate(
          phi, problem.basis, integrate(control, ref_plan, m_ref, path.increments).final_state.u);
    }
    // Uncoupled runs draw from the substreams past the reference ones.
    const BrownianPath independent = config.variance_reduction
                                         ? BrownianPath{}
                                         : sample_path(problem.covariance, problem.basis, m_ref, dt,
                                                       config.seed, config.samples + s);
    const BrownianPath& source = config.variance_reduction ? path : independent;
    std::vector<std::pair<std::size_t, BrownianPath>> coarse;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const std::size_t factor = m_ref / runs[k].steps;
      auto it = std::find_if(coarse.begin(), coarse.end(),
                             [&](const auto& c) { return c.first == factor; });
      if (it == coarse.end()) {
        coarse.emplace_back(factor, coarsen(source, factor));
        it = std::prev(coarse.end());
      }
      out.coarse[k] = evaluate(
          phi, problem.basis,
          integrate(problem, runs[k].plan, runs[k].steps, it->second.increments).final_state.u);
      if (use_cv) {
        out.coarse_control[k] = evaluate(
            phi, problem.basis,
            integrate(control, runs[k].plan, runs[k].steps, it->second.increments).final_state.u);
      }
    }
    return out;
  };
  const auto results = run_samples<Sample>(config.samples, config.threads, work);

  for (const auto& r : results) {
    if (!r) ++report.failed_samples;
  }
  check_failures(report.failed_samples, config.samples);
  report.n_samples = config.samples - report.failed_samples;
  const double n = static_cast<double>(report.n_samples);

  std::vector<double> refs;
  for (const auto& r : results) {
    if (r) refs.push_back(r->ref);
  }
  const Moments ref_m = moments(refs);
  report.reference_estimate = ref_m.mean;
  report.reference_stderr = std::sqrt(ref_m.variance / n);

  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::vector<double> values, diffs;
    for (const auto& r : results) {
      if (!r) continue;
      values.push_back(r->coarse[k]);
      double d = r->ref - r->coarse[k];
      if (use_cv) d -= r->ref_control - r->coarse_control[k];
      diffs.push_back(d);
    }
    const Moments vm = moments(values);
    RatePoint p;
    p.scheme = runs[k].scheme;
    p.steps = runs[k].steps;
    p.tau = problem.horizon / static_cast<double>(runs[k].steps);
    p.n_samples = report.n_samples;
    p.estimate = vm.mean;
    p.estimate_stderr = std::sqrt(vm.variance / n);
    if (config.variance_reduction) {
      const Moments dm = moments(diffs);
      p.signed_error = dm.mean + control_mean[k];
      p.standard_error = std::sqrt(dm.variance / n);
    } else {
      p.signed_error = ref_m.mean - vm.mean;
      p.standard_error = std::sqrt(ref_m.variance / n + vm.variance / n);
    }
    p.error = std::abs(p.signed_error);
    report.points.push_back(p);
  }
  report.fits = fit_schemes(report.points, config.schemes,
                            predicted_weak_rate(problem.covariance.predicted_delta));
  return report;
}

}  // namespace stochwave
