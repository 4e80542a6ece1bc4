#include "stochwave/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stochwave {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed(double x, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", x);
  return buf;
}

std::string tau_label(double tau) {
  const double k = -std::log2(tau);
  if (std::abs(k - std::round(k)) < 1e-12) return "2^-" + std::to_string(std::lround(k));
  return sci(tau);
}

std::string timestamp_line() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated ") + buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  std::size_t used = 0;
  const double x = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("read_rate_csv: bad number '" + s + "'");
  return x;
}

}  // namespace

void write_rate_csv(std::ostream& os, const RateReport& report, bool timestamp) {
  if (timestamp) os << timestamp_line() << '\n';
  os << "scheme,tau,error,stderr,n_samples,predicted_rate,fitted_rate,residual\n";
  for (const auto& p : report.points) {
    const SchemeFit* f = report.fit_for(p.scheme);
    const double predicted = f ? f->predicted_rate : std::nan("");
    const double slope = f && f->fit ? f->fit->slope : std::nan("");
    const double residual = f && f->fit ? f->fit->residual : std::nan("");
    os << scheme_name(p.scheme) << ',' << num(p.tau) << ',' << num(p.error) << ','
       << num(p.standard_error) << ',' << p.n_samples << ',' << num(predicted) << ',' << num(slope)
       << ',' << num(residual) << '\n';
  }
}

std::vector<RateCsvRow> read_rate_csv(std::istream& is) {
  std::vector<RateCsvRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw std::invalid_argument("read_rate_csv: expected 8 columns");
    RateCsvRow r;
    r.scheme = cells[0];
    r.tau = parse_double(cells[1]);
    r.error = parse_double(cells[2]);
    r.standard_error = parse_double(cells[3]);
    r.n_samples = std::stoul(cells[4]);
    r.predicted_rate = parse_double(cells[5]);
    r.fitted_rate = parse_double(cells[6]);
    r.residual = parse_double(cells[7]);
    rows.push_back(r);
  }
  return rows;
}

void write_plot_script(std::ostream& os, const RateReport& report, const std::string& csv_file,
                       const std::string& image_file) {
  os << "# gnuplot script: " << report.study << " errors for " << report.preset << "\n";
  os << "set terminal pngcairo size 640,600\n";
  os << "set output '" << image_file << "'\n";
  os << "set datafile separator ','\n";
  os << "set logscale xy\n";
  os << "set xlabel 'tau'\n";
  os << "set ylabel '" << (report.study == "weak" ? "weak error" : "strong error") << "'\n";
  os << "set key left top\n";
  os << "set title '" << report.study << " errors, " << report.preset << "'\n";
  double anchor_tau = 1.0, anchor_err = 1.0;
  for (const auto& p : report.points) {
    if (p.error > 0.0) {
      anchor_tau = p.tau;
      anchor_err = p.error;
      break;
    }
  }
  os << "half(x) = " << num(anchor_err) << " * (x / " << num(anchor_tau) << ")**0.5\n";
  os << "one(x) = " << num(anchor_err) << " * (x / " << num(anchor_tau) << ")\n";
  os << "plot \\\n";
  for (const auto& f : report.fits) {
    const std::string name(scheme_name(f.scheme));
    os << "  '" << csv_file << "' using (strcol(1) eq '" << name
       << "' ? $2 : 1/0):3 with linespoints title '" << scheme_abbreviation(f.scheme) << "', \\\n";
  }
  os << "  half(x) with lines dashtype 2 title 'slope 1/2', \\\n";
  os << "  one(x) with lines dashtype 3 title 'slope 1'\n";
}

void print_summary(std::ostream& os, const RateReport& report) {
  os << report.study << " study: preset " << report.preset;
  if (!report.functional.empty()) os << ", functional " << report.functional;
  os << ", reference " << scheme_abbreviation(report.reference_scheme) << " with "
     << report.reference_steps << " steps, " << report.n_samples << " samples";
  if (report.failed_samples > 0) os << " (" << report.failed_samples << " failed)";
  os << '\n';
  if (report.study == "weak") {
    os << "  reference E[phi] = " << fixed(report.reference_estimate, 5) << " +- "
       << fixed(report.reference_stderr, 5) << (report.coupled ? ", coupled" : ", uncoupled")
       << (report.control_variate ? " with control variate" : "") << '\n';
  }
  os << "  scheme  tau      error        stderr";
  if (report.study == "weak") os << "       E[phi(u_M)]";
  os << '\n';
  for (const auto& p : report.points) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-6s  %-7s  %.4e   %.2e",
                  std::string(scheme_abbreviation(p.scheme)).c_str(), tau_label(p.tau).c_str(),
                  p.error, p.standard_error);
    os << line;
    if (report.study == "weak") os << "     " << fixed(p.estimate, 5);
    if (p.sup_error) os << "   sup " << sci(*p.sup_error);
    os << '\n';
  }
  for (const auto& f : report.fits) {
    os << "  " << scheme_abbreviation(f.scheme) << " fitted rate ";
    if (f.fit) {
      os << fixed(f.fit->slope, 3) << " (residual " << sci(f.fit->residual) << ")";
    } else {
      os << "n/a";
    }
    os << ", predicted " << fixed(f.predicted_rate, 3) << '\n';
  }
  for (const auto& w : report.warnings) os << "  warning: " << w << '\n';
}

void print_table1(std::ostream& os, const RateReport& report) {
  os << "Approximations of E[phi(u(1))]; reference " << fixed(report.reference_estimate, 5)
     << " (+- " << fixed(report.reference_stderr, 5) << ")\n";
  os << "  tau     Linear implicit Euler  Crank-Nicolson  Exponential Euler\n";
  std::vector<std::size_t> steps;
  for (const auto& p : report.points) {
    if (std::find(steps.begin(), steps.end(), p.steps) == steps.end()) steps.push_back(p.steps);
  }
  for (std::size_t m : steps) {
    const RatePoint* lie = report.point(SchemeKind::LinearImplicitEuler, m);
    const RatePoint* cn = report.point(SchemeKind::CrankNicolson, m);
    const RatePoint* ee = report.point(SchemeKind::ExponentialEuler, m);
    const double tau = lie ? lie->tau : cn ? cn->tau : ee->tau;
    auto cell = [](const RatePoint* p) { return p ? fixed(p->estimate, 5) : std::string("-"); };
    char line[160];
    std::snprintf(line, sizeof line, "  %-6s  %21s  %14s  %17s\n", tau_label(tau).c_str(),
                  cell(lie).c_str(), cell(cn).c_str(), cell(ee).c_str());
    os << line;
  }
}

void write_table1_csv(std::ostream& os, const RateReport& report, bool timestamp) {
  if (timestamp) os << timestamp_line() << '\n';
  os << "tau,linear_implicit_euler,crank_nicolson,exponential_euler,"
        "linear_implicit_euler_stderr,crank_nicolson_stderr,exponential_euler_stderr,reference\n";
  std::vector<std::size_t> steps;
  for (const auto& p : report.points) {
    if (std::find(steps.begin(), steps.end(), p.steps) == steps.end()) steps.push_back(p.steps);
  }
  const SchemeKind order[] = {SchemeKind::LinearImplicitEuler, SchemeKind::CrankNicolson,
                              SchemeKind::ExponentialEuler};
  for (std::size_t m : steps) {
    double tau = 0.0;
    std::string values, errors;
    for (SchemeKind s : order) {
      const RatePoint* p = report.point(s, m);
      if (p) tau = p->tau;
      values += ',' + (p ? num(p->estimate) : std::string("nan"));
      errors += ',' + (p ? num(p->estimate_stderr) : std::string("nan"));
    }
    os << num(tau) << values << errors << ',' << num(report.reference_estimate) << '\n';
  }
}

}  // namespace stochwave
