#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stochwave/experiments.hpp"

namespace stochwave {

/// One data row of the rate CSV:
///   scheme,tau,error,stderr,n_samples,predicted_rate,fitted_rate,residual
/// fitted_rate and residual repeat the scheme's fit on every row ("nan" when
/// the scheme could not be fitted). Numbers are written with 17 significant digits.
struct RateCsvRow {
  std::string scheme;
  double tau = 0.0;
  double error = 0.0;
  double standard_error = 0.0;
  std::size_t n_samples = 0;
  double predicted_rate = 0.0;
  double fitted_rate = 0.0;
  double residual = 0.0;
};

/// With `timestamp` set, a single leading "# generated ..." comment line is written.
void write_rate_csv(std::ostream& os, const RateReport& report, bool timestamp);
/// Skips '#' comment lines and the header.
std::vector<RateCsvRow> read_rate_csv(std::istream& is);

/// gnuplot script drawing error against tau on log-log axes, one series per
/// scheme, with guide lines of slope 1/2 and 1 anchored at the first point.
void write_plot_script(std::ostream& os, const RateReport& report, const std::string& csv_file,
                       const std::string& image_file);

/// Human-readable rate table with measured and predicted slopes.
void print_summary(std::ostream& os, const RateReport& report);

/// Rows tau, columns LIE / CN / EE estimates of E[phi(u_M)].
void print_table1(std::ostream& os, const RateReport& report);
void write_table1_csv(std::ostream& os, const RateReport& report, bool timestamp);

}  // namespace stochwave
