#include "stochwave/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sw = stochwave;
using std::numbers::pi;

namespace {

// Composite Simpson on [0, 1].
template <class F>
double simpson(F&& h, int intervals = 10000) {
  const double dx = 1.0 / intervals;
  double s = h(0.0) + h(1.0);
  for (int k = 1; k < intervals; ++k) s += (k % 2 ? 4.0 : 2.0) * h(k * dx);
  return s * dx / 3.0;
}

double e(std::size_t i, double x) {
  return std::sqrt(2.0) * std::sin(static_cast<double>(i) * pi * x);
}

double series(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * e(i + 1, x);
  return s;
}

sw::Problem custom_problem(std::size_t n, sw::Nonlinearity nl) {
  auto basis = sw::make_basis(n);
  auto initial = sw::zero_state(basis);
  return sw::Problem{basis, std::move(nl), sw::CovarianceSpec::white(n), initial, 1.0, "custom"};
}

sw::Nonlinearity pointwise(sw::PointwiseMap f, sw::PointwiseMap g) {
  sw::Nonlinearity nl;
  nl.f = std::move(f);
  nl.g = std::move(g);
  return nl;
}

}  // namespace

TEST(Model, SineGordonDriftVanishesAtZero) {
  const auto p = sw::preset("sine_gordon_strong_white", 16);
  const auto F = sw::eval_F(p, sw::Field{std::vector<double>(16, 0.0), 0.0});
  for (double c : F.coeffs) EXPECT_EQ(std::abs(c), 0.0);
}

TEST(Model, ConstantDriftOnThreeModes) {
  const auto p = custom_problem(
      3, pointwise([](double, double) { return 1.0; }, [](double, double) { return 0.0; }));
  const auto F = sw::eval_F(p, sw::Field{{0.3, -0.2, 0.1}, 0.0});
  EXPECT_NEAR(F.coeffs[0], 0.8535533905932737, 1e-14);
  EXPECT_NEAR(F.coeffs[1], 0.0, 1e-14);
  EXPECT_NEAR(F.coeffs[2], 0.1464466094067262, 1e-14);
}

TEST(Model, DriftMatchesQuadrature) {
  const std::size_t n = 8;
  const auto p = sw::preset("sine_gordon_strong_white", n);
  std::vector<double> c(n, 0.0);
  c[0] = 0.5;
  c[1] = -0.2;
  c[2] = 0.1;
  const auto F = sw::eval_F(p, sw::Field{c, 0.0});
  for (std::size_t i = 1; i <= n; ++i) {
    const double exact = simpson([&](double x) { return -std::sin(series(c, x)) * e(i, x); });
    EXPECT_NEAR(F.coeffs[i - 1], exact, 1e-3) << "mode " << i;
  }
}

TEST(Model, ConstantOneNoiseCoefficientReturnsIncrement) {
  auto nl = pointwise([](double, double) { return 0.0; }, [](double, double) { return 1.0; });
  const auto p = custom_problem(16, nl);
  std::vector<double> dw(16);
  for (std::size_t i = 0; i < 16; ++i) dw[i] = std::sin(1.7 * static_cast<double>(i)) * 0.1;
  const auto G = sw::eval_G_times_increment(p, sw::Field{std::vector<double>(16, 0.3), 0.0}, dw);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(G.coeffs[i], dw[i], 1e-12);
}

TEST(Model, ZeroNoiseCoefficientGivesZero) {
  const auto p = custom_problem(
      8, pointwise([](double, double) { return 0.0; }, [](double, double) { return 0.0; }));
  const auto G = sw::eval_G_times_increment(p, sw::Field{std::vector<double>(8, 1.0), 0.0},
                                            std::vector<double>(8, 0.5));
  for (double c : G.coeffs) EXPECT_EQ(c, 0.0);
}

TEST(Model, MultiplicativeNoiseMatchesQuadrature) {
  // g(u) = u with u = e_1 and dW = a e_1: the product is 2a sin^2(pi x).
  const std::size_t n = 32;
  const double a = 0.3;
  const auto p = sw::preset("sine_gordon_strong_white", n);
  std::vector<double> u(n, 0.0), dw(n, 0.0);
  u[0] = 1.0;
  dw[0] = a;
  const auto G = sw::eval_G_times_increment(p, sw::Field{u, 0.0}, dw);
  for (std::size_t i = 1; i <= n; ++i) {
    const double exact = simpson([&](double x) { return e(1, x) * a * e(1, x) * e(i, x); });
    EXPECT_NEAR(G.coeffs[i - 1], exact, 5e-5) << "mode " << i;
  }
}

TEST(Model, AdditiveShortcutMatchesCollocation) {
  const std::size_t n = 24;
  const auto shortcut = sw::preset("sine_gordon_weak_additive", n);
  auto general = shortcut;
  general.nonlinearity.additive_sigma.reset();
  general.nonlinearity.g = [](double, double) { return 1.0; };
  std::vector<double> u(n), dw(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::cos(0.3 * static_cast<double>(i)) / static_cast<double>(i + 1);
    dw[i] = std::sin(2.1 * static_cast<double>(i)) * 0.05;
  }
  const auto a = sw::eval_G_times_increment(shortcut, sw::Field{u, 0.0}, dw);
  const auto b = sw::eval_G_times_increment(general, sw::Field{u, 0.0}, dw);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a.coeffs[i], b.coeffs[i], 1e-12);
}

TEST(Model, ForcingCombinesDriftAndNoise) {
  const std::size_t n = 16;
  const auto p = sw::preset("sine_gordon_strong_white", n);
  std::vector<double> u(n), dw(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = 0.4 / static_cast<double>((i + 1) * (i + 1));
    dw[i] = 0.02 * std::cos(static_cast<double>(i));
  }
  const double tau = 0.125;
  const auto F = sw::eval_F(p, sw::Field{u, 0.0});
  const auto G = sw::eval_G_times_increment(p, sw::Field{u, 0.0}, dw);
  std::vector<double> out(n);
  sw::ForcingWorkspace ws;
  sw::eval_forcing(p, u, tau, dw, out, ws);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(out[i], tau * F.coeffs[i] + G.coeffs[i], 1e-14);
  sw::eval_forcing(p, u, tau, {}, out, ws);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(out[i], tau * F.coeffs[i], 1e-15);
}

TEST(Model, NonFiniteDriftRaises) {
  const auto p = custom_problem(
      4, pointwise([](double, double) { return std::numeric_limits<double>::quiet_NaN(); },
                   [](double, double) { return 0.0; }));
  EXPECT_THROW(sw::eval_F(p, sw::Field{std::vector<double>(4, 0.0), 0.0}), sw::NonFiniteError);
}

TEST(Model, LengthMismatchRaises) {
  const auto p = sw::preset("sine_gordon_strong_white", 4);
  EXPECT_THROW(sw::eval_F(p, sw::Field{std::vector<double>(3, 0.0), 0.0}), std::invalid_argument);
  EXPECT_THROW(sw::eval_G_times_increment(p, sw::Field{std::vector<double>(4, 0.0), 0.0},
                                          std::vector<double>(5, 0.0)),
               std::invalid_argument);
}

TEST(Model, WeakPresetInitialData) {
  const auto p = sw::preset("sine_gordon_weak_additive", 32);
  EXPECT_NEAR(p.initial.u.coeffs[0], 1.0 / std::sqrt(2.0), 1e-14);
  for (std::size_t i = 1; i < 32; ++i) EXPECT_NEAR(p.initial.u.coeffs[i], 0.0, 1e-14);
  for (double c : p.initial.v.coeffs) EXPECT_EQ(c, 0.0);
  ASSERT_TRUE(p.nonlinearity.additive_sigma.has_value());
  EXPECT_EQ(*p.nonlinearity.additive_sigma, 1.0);
  EXPECT_EQ(p.covariance.kind, sw::CovarianceSpec::Kind::White);
}

TEST(Model, StrongPresetInitialVelocity) {
  // <cos x, e_i> by adaptive quadrature
  const double expected[] = {0.7715544600283466,  0.1061573302192083,  0.23375817799576187,
                             0.05206386509310335, 0.1392402492533501,  0.0345867882751824,
                             0.09925948225481712, 0.025908099647328743};
  const auto p = sw::preset("sine_gordon_strong_white", 256);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(p.initial.v.coeffs[i], expected[i], 1e-4);
  for (double c : p.initial.u.coeffs) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(p.horizon, 1.0);
}

TEST(Model, TracePresetCovariance) {
  const auto p = sw::preset("sine_gordon_strong_trace", 8);
  EXPECT_EQ(p.covariance.kind, sw::CovarianceSpec::Kind::AlgebraicDecay);
  EXPECT_NEAR(p.covariance.q[1], std::pow(2.0, -1.1), 1e-15);
  EXPECT_DOUBLE_EQ(p.covariance.predicted_delta, 1.0);
}

TEST(Model, LinearHomogeneousHasNoNoise) {
  const auto p = sw::preset("linear_homogeneous", 16);
  for (double q : p.covariance.q) EXPECT_EQ(q, 0.0);
  const auto path = sw::sample_path(p.covariance, p.basis, 8, 0.125, 1, 0);
  for (double x : path.increments) EXPECT_EQ(x, 0.0);
  const auto G = sw::eval_G_times_increment(p, p.initial.u, std::vector<double>(16, 1.0));
  for (double c : G.coeffs) EXPECT_EQ(c, 0.0);
  EXPECT_TRUE(p.nonlinearity.drift_is_zero);
}

TEST(Model, OverridesApply) {
  sw::PresetOverrides o;
  o.horizon = 2.0;
  o.noise_decay = 2.0;
  o.sigma0 = 0.5;
  const auto p = sw::preset("sine_gordon_weak_additive", 8, o);
  EXPECT_EQ(p.horizon, 2.0);
  EXPECT_NEAR(p.covariance.q[2], 1.0 / 9.0, 1e-15);
  EXPECT_EQ(*p.nonlinearity.additive_sigma, 0.5);
}

TEST(Model, UnknownPresetRejected) {
  EXPECT_THROW(sw::preset("no_such_preset", 8), std::invalid_argument);
}

TEST(Model, AllPresetsBuild) {
  for (const auto& name : sw::preset_names()) {
    const auto p = sw::preset(name, 8);
    EXPECT_EQ(p.preset_name, name);
    EXPECT_NO_THROW(sw::validate_problem(p));
  }
}

TEST(Model, ValidateRejectsBadProblems) {
  auto p = sw::preset("linear_additive", 4);
  p.horizon = 0.0;
  EXPECT_THROW(sw::validate_problem(p), std::invalid_argument);
  p = sw::preset("linear_additive", 4);
  p.initial.v.coeffs.pop_back();
  EXPECT_THROW(sw::validate_problem(p), std::invalid_argument);
}

TEST(Model, ProjectInitial) {
  const auto basis = sw::make_basis(8);
  const auto zero =
      sw::project_initial(basis, [](double) { return 0.0; }, [](double) { return 0.0; });
  for (double c : zero.u.coeffs) EXPECT_EQ(c, 0.0);
  const auto third = sw::project_initial(
      basis, [](double x) { return e(3, x); }, [](double x) { return std::sin(pi * x); });
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_NEAR(third.u.coeffs[i], i == 2 ? 1.0 : 0.0, 1e-14);
    EXPECT_NEAR(third.v.coeffs[i], i == 0 ? 1.0 / std::sqrt(2.0) : 0.0, 1e-14);
  }
  EXPECT_EQ(third.v.sobolev_index, -1.0);
  EXPECT_THROW(sw::project_initial(
                   basis, [](double) { return INFINITY; }, [](double) { return 0.0; }),
               sw::NonFiniteError);
}

TEST(Model, SineGordonSatisfiesLipschitz) {
  for (double s1 : {0.0, 1.0, 2.5}) {
    const auto report = sw::check_lipschitz(sw::sine_gordon_nonlinearity(1.0, s1));
    EXPECT_TRUE(report.ok());
    EXPECT_TRUE(report.warnings.empty());
  }
}

TEST(Model, QuadraticDriftFailsLipschitz) {
  auto nl = pointwise([](double, double u) { return u * u; }, [](double, double) { return 0.0; });
  const auto report = sw::check_lipschitz(nl);
  EXPECT_FALSE(report.f_ok);
  EXPECT_TRUE(report.g_ok);
  EXPECT_EQ(report.warnings.size(), 1u);
  EXPECT_GT(report.f_worst_ratio, 1.0);
}

TEST(Model, CollocationConvergesToQuadrature) {
  // f(u) = -sin(u) for a fixed smooth u; the projection error shrinks with N.
  auto u = [](double x) { return 0.8 * std::sin(pi * x) * std::exp(x); };
  double previous = INFINITY;
  for (std::size_t n : {8u, 16u, 32u}) {
    const auto p = sw::preset("sine_gordon_strong_white", n);
    const auto u_hat = sw::project_initial(p.basis, u, [](double) { return 0.0; }).u;
    const auto F = sw::eval_F(p, u_hat);
    double err = 0.0;
    for (std::size_t i = 1; i <= 4; ++i) {
      const double exact = simpson([&](double x) { return -std::sin(u(x)) * e(i, x); });
      err = std::max(err, std::abs(F.coeffs[i - 1] - exact));
    }
    EXPECT_LT(err, previous) << "N=" << n;
    previous = err;
  }
  EXPECT_LT(previous, 1e-4);
}
