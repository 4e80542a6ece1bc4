#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stochwave/model.hpp"
#include "stochwave/noise.hpp"
#include "stochwave/spectral_basis.hpp"

namespace stochwave {

enum class SchemeKind { ExponentialEuler, LinearImplicitEuler, CrankNicolson };

/// Accepts full names and the abbreviations EE, LIE, CN, case-insensitively.
SchemeKind parse_scheme(std::string_view name);
std::string_view scheme_name(SchemeKind scheme);
std::string_view scheme_abbreviation(SchemeKind scheme);
const std::vector<SchemeKind>& all_schemes();

/// Row-major 2x2 block per mode.
struct ModeMatrices {
  std::vector<double> a11, a12, a21, a22;
};

/// Every scheme here is a one-step map
///   X_{m+1} = P X_m + R (0, tau F(u_m) + G(u_m) dW_m)
/// with P and R block diagonal (one 2x2 block per mode):
///   EE:  P = R = E(tau)
///   LIE: P = R = (I - tau A)^{-1}
///   CN:  R = (I - tau/2 A)^{-1},  P = R (I + tau/2 A)
struct StepPlan {
  SchemeKind scheme = SchemeKind::ExponentialEuler;
  double tau = 0.0;
  ModeMatrices propagator;
  ModeMatrices resolvent;
};

StepPlan plan(const SpectralBasis& basis, SchemeKind scheme, double tau);

/// Reusable buffers for a time loop.
struct StepWorkspace {
  ForcingWorkspace forcing;
  std::vector<double> forcing_coeffs;
};

/// One step. An empty increment means no noise.
StatePair step(const StepPlan& plan, const Problem& problem, const StatePair& state,
               std::span<const double> increment);
void step_in_place(const StepPlan& plan, const Problem& problem, StatePair& state,
                   std::span<const double> increment, StepWorkspace& workspace);

/// Exponential Euler written out component by component:
///   u' = C u + L^{-1/2} S v + tau L^{-1/2} S F(u) + L^{-1/2} S G(u) dW
///   v' = -L^{1/2} S u + C v + tau C F(u) + C G(u) dW
/// Kept separate from the block form used by step() so the two can be checked
/// against each other.
StatePair exponential_euler_componentwise(const Problem& problem, double tau,
                                          const StatePair& state,
                                          std::span<const double> increment);

struct Trajectory {
  StatePair final_state;
  double tau = 0.0;
  std::vector<StatePair> states;  // X_0..X_M, filled only when recording
};

/// n_steps steps of size horizon / n_steps from problem.initial. The path must
/// have exactly n_steps increments of that size.
Trajectory integrate(const Problem& problem, SchemeKind scheme, std::size_t n_steps,
                     const BrownianPath& path, bool record = false);
/// Same, with increments given as a row-major (n_steps x N) array; an empty
/// span means zero noise.
Trajectory integrate(const Problem& problem, SchemeKind scheme, std::size_t n_steps,
                     std::span<const double> increments, bool record = false);
Trajectory integrate(const Problem& problem, const StepPlan& plan, std::size_t n_steps,
                     std::span<const double> increments, bool record = false);

/// CSV with header t,mode_index,u_coeff,v_coeff; modes are 1-based.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace stochwave
