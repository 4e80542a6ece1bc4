#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochwave/noise.hpp"
#include "stochwave/spectral_basis.hpp"

namespace stochwave {

/// Raised when a nonlinearity or a time step produces NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (x, u) -> value, x in (0,1).
using PointwiseMap = std::function<double(double, double)>;
using InitialProfile = std::function<double(double)>;

/// Pointwise f and g of the semilinear wave equation
///   u_tt = u_xx + f(x, u) + g(x, u) dW/dt.
/// The optional fields are structural hints; they let the evaluators skip the
/// collocation round trip, they never change the mathematical operator.
struct Nonlinearity {
  PointwiseMap f;
  PointwiseMap g;
  double lipschitz_L = 1.0;
  bool drift_is_zero = false;            // f == 0
  std::optional<double> additive_sigma;  // g == sigma0
  std::optional<double> drift_slope;     // df/du at u = 0, if known
};

struct LipschitzReport {
  bool f_ok = true;
  bool g_ok = true;
  double f_worst_ratio = 0.0;  // max |f(u)-f(u')| / (L |u-u'|) and max |f(u)| / (L(|u|+1))
  double g_worst_ratio = 0.0;
  std::vector<std::string> warnings;

  bool ok() const { return f_ok && g_ok; }
};

/// Spot-checks |f(x,u) - f(x,u')| <= L|u-u'| and |f(x,u)| <= L(|u|+1) (same for g)
/// on a lattice of x in (0,1) and u in [-u_max, u_max].
LipschitzReport check_lipschitz(const Nonlinearity& nonlinearity, std::size_t x_points = 17,
                                std::size_t u_points = 41, double u_max = 10.0);

struct Problem {
  SpectralBasis basis;
  Nonlinearity nonlinearity;
  CovarianceSpec covariance;
  StatePair initial;
  double horizon = 1.0;
  std::string preset_name;
};

/// Throws std::invalid_argument if the horizon is not positive or sizes disagree.
void validate_problem(const Problem& problem);

/// F(u) = P_N f(., u(.)), evaluated by collocation.
Field eval_F(const Problem& problem, const Field& u_hat);

/// G(u) dW = P_N [g(., u(.)) dW(.)], evaluated by collocation; equals sigma0 * dW
/// exactly for additive noise.
Field eval_G_times_increment(const Problem& problem, const Field& u_hat,
                             std::span<const double> increment);

/// Scratch buffers for forcing evaluation inside a time loop.
struct ForcingWorkspace {
  std::vector<double> grid_u;
  std::vector<double> grid_noise;
  std::vector<double> grid_total;
};

/// out = tau F(u) + G(u) dW in coefficients, with a single inverse transform.
/// An empty increment means no noise.
void eval_forcing(const Problem& problem, std::span<const double> u_hat, double tau,
                  std::span<const double> increment, std::span<double> out,
                  ForcingWorkspace& workspace);

StatePair project_initial(const SpectralBasis& basis, const InitialProfile& u0,
                          const InitialProfile& v0);

struct PresetOverrides {
  std::optional<double> horizon;
  std::optional<double> sigma0;
  std::optional<double> sigma1;
  /// q_i = i^{-r}; r = 0 is white noise.
  std::optional<double> noise_decay;
};

/// sine_gordon_strong_white, sine_gordon_strong_trace, sine_gordon_weak_additive,
/// linear_homogeneous, linear_additive.
Problem preset(const std::string& name, std::size_t n_modes, const PresetOverrides& overrides = {});

const std::vector<std::string>& preset_names();

/// Sine-Gordon nonlinearity f = -sin(u), g = sigma0 + sigma1 u.
Nonlinearity sine_gordon_nonlinearity(double sigma0, double sigma1);

}  // namespace stochwave
