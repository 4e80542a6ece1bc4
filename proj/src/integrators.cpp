#include "stochwave/integrators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace stochwave {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  out.erase(std::remove_if(out.begin(), out.end(), [](char c) { return c == '_' || c == '-'; }),
            out.end());
  return out;
}

void resize(ModeMatrices& m, std::size_t n) {
  m.a11.resize(n);
  m.a12.resize(n);
  m.a21.resize(n);
  m.a22.resize(n);
}

}  // namespace

SchemeKind parse_scheme(std::string_view name) {
  const std::string key = lower(name);
  if (key == "ee" || key == "exponentialeuler") return SchemeKind::ExponentialEuler;
  if (key == "lie" || key == "linearimpliciteuler") return SchemeKind::LinearImplicitEuler;
  if (key == "cn" || key == "cranknicolson") return SchemeKind::CrankNicolson;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string_view scheme_name(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::ExponentialEuler:
      return "exponential_euler";
    case SchemeKind::LinearImplicitEuler:
      return "linear_implicit_euler";
    case SchemeKind::CrankNicolson:
      return "crank_nicolson";
  }
  return "unknown";
}

std::string_view scheme_abbreviation(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::ExponentialEuler:
      return "EE";
    case SchemeKind::LinearImplicitEuler:
      return "LIE";
    case SchemeKind::CrankNicolson:
      return "CN";
  }
  return "?";
}

const std::vector<SchemeKind>& all_schemes() {
  static const std::vector<SchemeKind> schemes{
      SchemeKind::LinearImplicitEuler, SchemeKind::CrankNicolson, SchemeKind::ExponentialEuler};
  return schemes;
}

StepPlan plan(const SpectralBasis& basis, SchemeKind scheme, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("plan: tau must be positive");
  const std::size_t n = basis.size();
  StepPlan p{scheme, tau, {}, {}};
  resize(p.propagator, n);
  resize(p.resolvent, n);
  const auto& lambda = basis.eigenvalues();
  const auto& w = basis.frequencies();

  for (std::size_t i = 0; i < n; ++i) {
    switch (scheme) {
      case SchemeKind::ExponentialEuler: {
        const double c = std::cos(tau * w[i]);
        const double s = std::sin(tau * w[i]);
        p.propagator.a11[i] = c;
        p.propagator.a12[i] = s / w[i];
        p.propagator.a21[i] = -w[i] * s;
        p.propagator.a22[i] = c;
        break;
      }
      case SchemeKind::LinearImplicitEuler: {
        // (I - tau A)^{-1} = [[1, tau], [-tau lambda, 1]] / (1 + tau^2 lambda)
        const double d = 1.0 + tau * tau * lambda[i];
        p.propagator.a11[i] = 1.0 / d;
        p.propagator.a12[i] = tau / d;
        p.propagator.a21[i] = -tau * lambda[i] / d;
        p.propagator.a22[i] = 1.0 / d;
        break;
      }
      case SchemeKind::CrankNicolson: {
        const double h = 0.5 * tau;
        const double d = 1.0 + h * h * lambda[i];
        p.resolvent.a11[i] = 1.0 / d;
        p.resolvent.a12[i] = h / d;
        p.resolvent.a21[i] = -h * lambda[i] / d;
        p.resolvent.a22[i] = 1.0 / d;
        const double diag = (1.0 - h * h * lambda[i]) / d;
        p.propagator.a11[i] = diag;
        p.propagator.a12[i] = tau / d;
        p.propagator.a21[i] = -tau * lambda[i] / d;
        p.propagator.a22[i] = diag;
        break;
      }
    }
  }
  if (scheme != SchemeKind::CrankNicolson) p.resolvent = p.propagator;
  return p;
}

void step_in_place(const StepPlan& plan, const Problem& problem, StatePair& state,
                   std::span<const double> increment, StepWorkspace& ws) {
  const std::size_t n = problem.basis.size();
  if (state.u.size() != n || state.v.size() != n || plan.propagator.a11.size() != n) {
    throw std::invalid_argument("step: state, plan and basis sizes differ");
  }
  ws.forcing_coeffs.resize(n);
  eval_forcing(problem, state.u.coeffs, plan.tau, increment, ws.forcing_coeffs, ws.forcing);

  const ModeMatrices& P = plan.propagator;
  const ModeMatrices& R = plan.resolvent;
  double* u = state.u.coeffs.data();
  double* v = state.v.coeffs.data();
  const double* w = ws.forcing_coeffs.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    const double vi = v[i];
    u[i] = P.a11[i] * ui + P.a12[i] * vi + R.a12[i] * w[i];
    v[i] = P.a21[i] * ui + P.a22[i] * vi + R.a22[i] * w[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(v[i])) {
      throw NonFiniteError("step: state became non-finite");
    }
  }
}

StatePair step(const StepPlan& plan, const Problem& problem, const StatePair& state,
               std::span<const double> increment) {
  StatePair next = state;
  StepWorkspace ws;
  step_in_place(plan, problem, next, increment, ws);
  return next;
}

StatePair exponential_euler_componentwise(const Problem& problem, double tau,
                                          const StatePair& state,
                                          std::span<const double> increment) {
  const auto& basis = problem.basis;
  const std::size_t n = basis.size();
  const std::vector<double> C = cos_op(basis, tau);
  const std::vector<double> S = sin_op(basis, tau);
  const Field F = eval_F(problem, state.u);
  const Field GdW = increment.empty() ? Field{std::vector<double>(n, 0.0), 0.0}
                                      : eval_G_times_increment(problem, state.u, increment);

  const Field& u = state.u;
  const Field& v = state.v;
  const Field half_inv_v = apply_lambda_power(basis, v, -0.5);
  const Field half_u = apply_lambda_power(basis, u, 0.5);
  const Field half_inv_F = apply_lambda_power(basis, F, -0.5);
  const Field half_inv_G = apply_lambda_power(basis, GdW, -0.5);

  StatePair out = state;
  for (std::size_t i = 0; i < n; ++i) {
    out.u.coeffs[i] = C[i] * u.coeffs[i] + S[i] * half_inv_v.coeffs[i] +
                      tau * S[i] * half_inv_F.coeffs[i] + S[i] * half_inv_G.coeffs[i];
    out.v.coeffs[i] = -S[i] * half_u.coeffs[i] + C[i] * v.coeffs[i] + tau * C[i] * F.coeffs[i] +
                      C[i] * GdW.coeffs[i];
  }
  return out;
}

Trajectory integrate(const Problem& problem, SchemeKind scheme, std::size_t n_steps,
                     const BrownianPath& path, bool record) {
  if (path.n_steps != n_steps) {
    throw std::invalid_argument("integrate: path has " + std::to_string(path.n_steps) +
                                " increments but " + std::to_string(n_steps) + " steps requested");
  }
  if (path.n_modes != problem.basis.size()) {
    throw std::invalid_argument("integrate: path and basis sizes differ");
  }
  if (n_steps > 0) {
    const double tau = problem.horizon / static_cast<double>(n_steps);
    if (std::abs(path.dt - tau) > 1e-12 * tau) {
      throw std::invalid_argument("integrate: path dt does not equal horizon / n_steps");
    }
  }
  return integrate(problem, scheme, n_steps, std::span<const double>(path.increments), record);
}

Trajectory integrate(const Problem& problem, SchemeKind scheme, std::size_t n_steps,
                     std::span<const double> increments, bool record) {
  if (n_steps == 0) {
    Trajectory t{problem.initial, 0.0, {}};
    if (record) t.states.push_back(problem.initial);
    return t;
  }
  const double tau = problem.horizon / static_cast<double>(n_steps);
  return integrate(problem, plan(problem.basis, scheme, tau), n_steps, increments, record);
}

Trajectory integrate(const Problem& problem, const StepPlan& step_plan, std::size_t n_steps,
                     std::span<const double> increments, bool record) {
  const std::size_t n = problem.basis.size();
  if (!increments.empty() && increments.size() != n_steps * n) {
    throw std::invalid_argument("integrate: expected " + std::to_string(n_steps) +
                                " increment rows of length " + std::to_string(n));
  }
  Trajectory traj{problem.initial, step_plan.tau, {}};
  if (record) {
    traj.states.reserve(n_steps + 1);
    traj.states.push_back(traj.final_state);
  }
  StepWorkspace ws;
  for (std::size_t m = 0; m < n_steps; ++m) {
    const auto row = increments.empty() ? std::span<const double>{} : increments.subspan(m * n, n);
    step_in_place(step_plan, problem, traj.final_state, row, ws);
    if (record) traj.states.push_back(traj.final_state);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "t,mode_index,u_coeff,v_coeff\n";
  const auto old_precision = os.precision(17);
  for (std::size_t m = 0; m < trajectory.states.size(); ++m) {
    const double t = static_cast<double>(m) * trajectory.tau;
    const StatePair& x = trajectory.states[m];
    for (std::size_t i = 0; i < x.u.size(); ++i) {
      os << t << ',' << (i + 1) << ',' << x.u.coeffs[i] << ',' << x.v.coeffs[i] << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace stochwave
