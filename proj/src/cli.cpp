#include "stochwave/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "stochwave/experiments.hpp"
#include "stochwave/model.hpp"
#include "stochwave/report.hpp"
#include "stochwave/selftest.hpp"

namespace stochwave {

namespace {

const std::vector<std::string> kCommands{"simulate", "strong-rate", "weak-rate", "table1",
                                         "selftest"};

struct RawOptions {
  std::string command;
  std::string config_file;
  std::string preset;
  std::size_t n_modes = 256;
  std::string schemes;
  std::string steps;
  std::string reference_scheme = "cn";
  std::size_t reference_steps = 2048;
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  std::string functional = "paper_phi";
  double horizon = 1.0;
  std::string output;
  bool sup_norm = false;
  bool variance_reduction = true;
  bool control_variate = true;
  bool emit_plot = false;
  bool timestamp = true;
  bool paper_scale = false;
  std::size_t threads = 0;
};

void build_app(CLI::App& app, RawOptions& o) {
  app.description("Exponential Euler and baseline integrators for stochastic wave equations");
  app.name("stochwave");
  app.add_option("command", o.command, "simulate | strong-rate | weak-rate | table1 | selftest")
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", o.config_file, "Config file of `key = value` lines");
  app.add_option("--preset", o.preset, "Problem preset")->check(CLI::IsMember(preset_names()));
  app.add_option("--n-modes", o.n_modes, "Galerkin dimension N")->check(CLI::PositiveNumber);
  app.add_option("--schemes", o.schemes, "Comma-separated schemes: ee, lie, cn");
  app.add_option("--steps", o.steps, "Comma-separated step counts");
  app.add_option("--reference-scheme", o.reference_scheme, "Scheme of the reference solution");
  app.add_option("--ref-steps", o.reference_steps, "Reference step count")
      ->check(CLI::PositiveNumber);
  app.add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "RNG seed (falls back to STOCHWAVE_SEED)");
  app.add_option("--functional", o.functional, "paper_phi | h_norm_sq | mode_k(K)");
  app.add_option("--horizon", o.horizon, "Final time T")->check(CLI::PositiveNumber);
  app.add_option("--output", o.output, "Output directory");
  app.add_flag("--sup-norm", o.sup_norm, "Also report the sup-over-grid strong error");
  app.add_flag("--variance-reduction,!--no-variance-reduction", o.variance_reduction,
               "Couple weak-study runs to the reference path");
  app.add_flag("--control-variate,!--no-control-variate", o.control_variate,
               "Linearised control variate in coupled weak studies");
  app.add_flag("--emit-plot", o.emit_plot, "Write a gnuplot script next to the CSV");
  app.add_flag("--timestamp,!--no-timestamp", o.timestamp, "Timestamp comment line in CSV files");
  app.add_flag("--paper-scale", o.paper_scale, "N = 1024, reference 4096 steps, 1000 samples");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected `key = value`");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(path + ":" + std::to_string(number) + ": empty key or value");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split(s)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 0)
      throw ConfigError("--steps: malformed step count '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("--steps: no step counts given");
  return out;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RawOptions o;
  CLI::App app("stochwave");
  build_app(app, o);

  // CLI11 parses a reversed argument vector.
  auto parse = [&app](std::vector<std::string> a) {
    std::reverse(a.begin(), a.end());
    app.parse(a);
  };

  try {
    parse(args);
    if (!o.config_file.empty()) {
      std::vector<std::string> combined = args;
      for (const auto& [key, value] : read_config_file(o.config_file)) {
        if (key == "command") {
          if (o.command.empty()) combined.insert(combined.begin(), value);
          continue;
        }
        if (key == "config") throw ConfigError("config files cannot include other config files");
        const CLI::Option* opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr) throw ConfigError("unknown config key '" + key + "'");
        if (opt->count() > 0) continue;
        combined.push_back("--" + key + "=" + value);
      }
      app.clear();
      parse(combined);
    }
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  if (o.command.empty())
    throw ConfigError(
        "missing required command (one of simulate, strong-rate, weak-rate, table1, selftest)");

  RunConfig c;
  c.command = o.command;
  const bool weak_like = c.command == "weak-rate" || c.command == "table1";
  c.preset = !o.preset.empty()
                 ? o.preset
                 : (weak_like ? "sine_gordon_weak_additive" : "sine_gordon_strong_white");
  c.paper_scale = o.paper_scale;
  const bool n_given = app.get_option("--n-modes")->count() > 0;
  const bool ref_given = app.get_option("--ref-steps")->count() > 0;
  const bool samples_given = app.get_option("--samples")->count() > 0;
  c.n_modes = (o.paper_scale && !n_given) ? 1024 : o.n_modes;
  c.reference_steps = (o.paper_scale && !ref_given) ? 4096 : o.reference_steps;
  c.samples = (o.paper_scale && !samples_given) ? 1000 : o.samples;

  try {
    if (c.command == "table1") {
      c.schemes = all_schemes();
    } else if (!o.schemes.empty()) {
      for (const auto& s : split(o.schemes)) c.schemes.push_back(parse_scheme(s));
      if (c.schemes.empty()) throw ConfigError("--schemes: no schemes given");
    } else if (c.command == "simulate") {
      c.schemes = {SchemeKind::ExponentialEuler};
    } else {
      c.schemes = all_schemes();
    }
    c.reference_scheme = parse_scheme(o.reference_scheme);
    (void)parse_functional(o.functional);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!o.steps.empty()) {
    c.steps = parse_counts(o.steps);
  } else if (c.command == "simulate") {
    c.steps = {256};
  } else if (weak_like) {
    c.steps = {8, 16, 32, 64};
  } else {
    c.steps = {32, 64, 128, 256};
  }

  c.seed = o.seed;
  if (app.get_option("--seed")->count() == 0) {
    if (const char* env = std::getenv("STOCHWAVE_SEED")) {
      try {
        std::size_t used = 0;
        c.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("STOCHWAVE_SEED: malformed value '") + env + "'");
      }
    }
  }
  c.functional = o.functional;
  if (app.get_option("--horizon")->count() > 0) c.horizon = o.horizon;
  c.output_given = !o.output.empty();
  c.output =
      c.output_given ? std::filesystem::path(o.output) : std::filesystem::path("stochwave-out");
  c.sup_norm = o.sup_norm;
  c.variance_reduction = o.variance_reduction;
  c.control_variate = o.control_variate;
  c.emit_plot = o.emit_plot;
  c.timestamp = o.timestamp;
  c.threads = o.threads;
  return c;
}

RunConfig parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_config(args);
}

namespace {

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + dir.string() +
                             "': " + ec.message());
  const auto probe = dir / ".stochwave-write-probe";
  {
    std::ofstream f(probe);
    if (!f) throw std::runtime_error("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream f(file);
  if (!f) throw std::runtime_error("cannot write '" + file.string() + "'");
  return f;
}

PresetOverrides overrides_for(const RunConfig& c) {
  PresetOverrides o;
  o.horizon = c.horizon;
  return o;
}

void print_problem_warnings(const Problem& problem, std::ostream& err) {
  for (const auto& w : check_lipschitz(problem.nonlinearity).warnings)
    err << "warning: " << w << '\n';
}

void write_study_files(const RunConfig& c, const RateReport& report, const std::string& stem,
                       std::ostream& out) {
  const auto csv = c.output / (stem + ".csv");
  {
    auto f = open_output(csv);
    write_rate_csv(f, report, c.timestamp);
  }
  out << "wrote " << csv.string() << '\n';
  if (c.emit_plot) {
    const auto gp = c.output / (stem + ".gp");
    auto f = open_output(gp);
    write_plot_script(f, report, csv.filename().string(), stem + ".png");
    out << "wrote " << gp.string() << '\n';
  }
}

int run_simulate(const RunConfig& c, std::ostream& out) {
  if (c.output_given) ensure_writable(c.output);
  const Problem problem = preset(c.preset, c.n_modes, overrides_for(c));
  const SchemeKind scheme = c.schemes.front();
  const std::size_t m = c.steps.front();
  Trajectory traj;
  if (m == 0) {
    traj = integrate(problem, scheme, 0, std::span<const double>{}, c.output_given);
  } else {
    const BrownianPath path = sample_path(problem.covariance, problem.basis, m,
                                          problem.horizon / static_cast<double>(m), c.seed, 0);
    traj = integrate(problem, scheme, m, path, c.output_given);
  }
  const double t = m == 0 ? 0.0 : problem.horizon;
  const auto& basis = problem.basis;
  char line[200];
  std::snprintf(line, sizeof line,
                "preset %s, scheme %s, N = %zu, steps = %zu, t = %g\n"
                "  paper_phi(u) = %.10g\n  h_norm_sq(u) = %.10g\n  ||X||_H      = %.10g\n",
                c.preset.c_str(), std::string(scheme_abbreviation(scheme)).c_str(), basis.size(), m,
                t, evaluate({Functional::Kind::PaperPhi, 1}, basis, traj.final_state.u),
                evaluate({Functional::Kind::HNormSq, 1}, basis, traj.final_state.u),
                h_norm(basis, traj.final_state));
  out << line;
  if (c.output_given) {
    const auto file = c.output / "trajectory.csv";
    auto f = open_output(file);
    write_trajectory_csv(f, traj);
    out << "wrote " << file.string() << '\n';
  }
  return 0;
}

StrongStudyConfig strong_config(const RunConfig& c) {
  StrongStudyConfig s;
  s.preset = c.preset;
  s.n_modes = c.n_modes;
  s.overrides = overrides_for(c);
  s.schemes = c.schemes;
  s.step_counts = c.steps;
  s.reference_scheme = c.reference_scheme;
  s.reference_steps = c.reference_steps;
  s.samples = c.samples;
  s.seed = c.seed;
  s.sup_norm = c.sup_norm;
  s.threads = c.threads;
  return s;
}

WeakStudyConfig weak_config(const RunConfig& c) {
  WeakStudyConfig w;
  w.preset = c.preset;
  w.n_modes = c.n_modes;
  w.overrides = overrides_for(c);
  w.schemes = c.schemes;
  w.step_counts = c.steps;
  w.reference_scheme = c.reference_scheme;
  w.reference_steps = c.reference_steps;
  w.functional = c.functional;
  w.samples = c.samples;
  w.seed = c.seed;
  w.variance_reduction = c.variance_reduction;
  w.control_variate = c.control_variate;
  w.threads = c.threads;
  return w;
}

int run_weak(const RunConfig& c, std::ostream& out, std::ostream& err, bool table) {
  ensure_writable(c.output);
  const WeakStudyConfig config = weak_config(c);
  const Problem problem = preset(config.preset, config.n_modes, config.overrides);
  print_problem_warnings(problem, err);
  const auto trace =
      regularity_trace(problem.basis, problem.covariance, problem.covariance.predicted_delta);
  if (!trace.plateaued) {
    err << "warning: partial sums of sum_i lambda_i^(beta-1) q_i have not plateaued at N = "
        << problem.basis.size() << " (upper half contributes " << trace.tail_fraction * 100.0
        << "%)\n";
  }
  const RateReport report = weak_study(problem, config);
  if (table) {
    print_table1(out, report);
    out << '\n';
  }
  print_summary(out, report);
  if (table) {
    const auto file = c.output / "table1.csv";
    auto f = open_output(file);
    write_table1_csv(f, report, c.timestamp);
    out << "wrote " << file.string() << '\n';
  }
  write_study_files(c, report, "weak_" + c.preset, out);
  return 0;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "selftest") {
      const SelftestReport report = run_selftest();
      print_selftest(out, report);
      return report.all_passed() ? 0 : 1;
    }
    if (c.command == "simulate") return run_simulate(c, out);
    if (c.command == "strong-rate") {
      ensure_writable(c.output);
      const StrongStudyConfig config = strong_config(c);
      const Problem problem = preset(config.preset, config.n_modes, config.overrides);
      print_problem_warnings(problem, err);
      const RateReport report = strong_study(problem, config);
      print_summary(out, report);
      write_study_files(c, report, "strong_" + c.preset, out);
      return 0;
    }
    if (c.command == "weak-rate") return run_weak(c, out, err, false);
    if (c.command == "table1") return run_weak(c, out, err, true);
    err << "error: unknown command '" << c.command << "'\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace stochwave
