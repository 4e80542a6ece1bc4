#include "stochwave/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stochwave {

CovarianceSpec CovarianceSpec::white(std::size_t n_modes) {
  return CovarianceSpec{Kind::White, 0.0, std::vector<double>(n_modes, 1.0), 0.5};
}

CovarianceSpec CovarianceSpec::algebraic_decay(std::size_t n_modes, double r) {
  std::vector<double> q(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) q[i] = std::pow(static_cast<double>(i + 1), -r);
  return CovarianceSpec{Kind::AlgebraicDecay, r, std::move(q), std::min(1.0, 0.5 * (1.0 + r))};
}

CovarianceSpec CovarianceSpec::custom(std::vector<double> q, double predicted_delta) {
  for (double qi : q) {
    if (!(qi >= 0.0) || !std::isfinite(qi)) {
      throw std::invalid_argument(
          "CovarianceSpec: eigenvalues of Q must be finite and nonnegative");
    }
  }
  return CovarianceSpec{Kind::Custom, 0.0, std::move(q), predicted_delta};
}

std::string CovarianceSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::White:
      os << "white";
      break;
    case Kind::AlgebraicDecay:
      os << "algebraic_decay(" << decay_exponent << ")";
      break;
    case Kind::Custom:
      os << "custom";
      break;
  }
  return os.str();
}

RegularityTrace regularity_trace(const SpectralBasis& basis, const CovarianceSpec& covariance,
                                 double beta, double tolerance) {
  if (covariance.size() != basis.size()) {
    throw std::invalid_argument("regularity_trace: covariance and basis sizes differ");
  }
  RegularityTrace out;
  const std::size_t half = basis.size() / 2;
  double tail = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double term = std::exp((beta - 1.0) * std::log(basis.eigenvalues()[i])) * covariance.q[i];
    out.total += term;
    if (i >= half) tail += term;
  }
  out.tail_fraction = out.total > 0.0 ? tail / out.total : 0.0;
  out.plateaued = out.tail_fraction <= tolerance;
  return out;
}

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t sample_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample_index),
                    static_cast<std::uint32_t>(sample_index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

BrownianPath sample_path(const CovarianceSpec& covariance, const SpectralBasis& basis,
                         std::size_t n_steps, double dt, std::uint64_t seed,
                         std::uint64_t sample_index) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_path: dt must be positive");
  if (n_steps == 0) throw std::invalid_argument("sample_path: n_steps must be at least 1");
  if (covariance.size() != basis.size()) {
    throw std::invalid_argument("sample_path: covariance and basis sizes differ");
  }
  const std::size_t n = basis.size();
  BrownianPath path{n_steps, n, dt, seed, sample_index, std::vector<double>(n_steps * n, 0.0)};

  std::vector<double> scale(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    scale[i] = std::sqrt(covariance.q[i] * dt);
    any = any || scale[i] > 0.0;
  }
  if (!any) return path;

  auto rng = substream(seed, sample_index);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t m = 0; m < n_steps; ++m) {
    double* row = path.increments.data() + m * n;
    for (std::size_t i = 0; i < n; ++i) row[i] = scale[i] * normal(rng);
  }
  return path;
}

BrownianPath coarsen(const BrownianPath& path, std::size_t factor) {
  if (factor == 0 || path.n_steps % factor != 0) {
    throw std::invalid_argument("coarsen: factor " + std::to_string(factor) +
                                " does not divide n_steps " + std::to_string(path.n_steps));
  }
  const std::size_t n = path.n_modes;
  const std::size_t coarse_steps = path.n_steps / factor;
  BrownianPath out{coarse_steps,
                   n,
                   path.dt * static_cast<double>(factor),
                   path.seed,
                   path.sample_index,
                   std::vector<double>(coarse_steps * n, 0.0)};
  // Power-of-two blocks are summed as a balanced binary tree over aligned pairs,
  // so coarsening by 2^a and then 2^b reproduces coarsening by 2^(a+b) bit for bit.
  const bool pairwise = std::has_single_bit(factor);
  std::vector<double> block;
  for (std::size_t m = 0; m < coarse_steps; ++m) {
    double* dst = out.increments.data() + m * n;
    const double* src = path.increments.data() + m * factor * n;
    if (pairwise) {
      block.assign(src, src + factor * n);
      for (std::size_t len = factor; len > 1; len /= 2) {
        for (std::size_t k = 0; k < len / 2; ++k) {
          for (std::size_t i = 0; i < n; ++i) {
            block[k * n + i] = block[2 * k * n + i] + block[(2 * k + 1) * n + i];
          }
        }
      }
      std::copy(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(n), dst);
    } else {
      for (std::size_t k = 0; k < factor; ++k) {
        for (std::size_t i = 0; i < n; ++i) dst[i] += src[k * n + i];
      }
    }
  }
  return out;
}

std::vector<double> increment_on_grid(const SpectralBasis& basis,
                                      std::span<const double> increment_row) {
  return basis.to_grid(increment_row);
}

namespace {

void put_u64(std::ostream& os, std::uint64_t x) {
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((x >> (8 * b)) & 0xff);
  os.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  is.read(reinterpret_cast<char*>(bytes), 8);
  if (!is) throw std::runtime_error("read_path_binary: truncated file");
  std::uint64_t x = 0;
  for (int b = 0; b < 8; ++b) x |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return x;
}

void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_path_binary(const BrownianPath& path, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("write_path_binary: cannot open " + file.string());
  put_u64(os, path.n_modes);
  put_u64(os, path.n_steps);
  put_f64(os, path.dt);
  put_u64(os, path.seed);
  for (double x : path.increments) put_f64(os, x);
  if (!os) throw std::runtime_error("write_path_binary: write failed for " + file.string());
}

BrownianPath read_path_binary(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("read_path_binary: cannot open " + file.string());
  BrownianPath path;
  path.n_modes = get_u64(is);
  path.n_steps = get_u64(is);
  path.dt = get_f64(is);
  path.seed = get_u64(is);
  path.increments.resize(path.n_modes * path.n_steps);
  for (double& x : path.increments) x = get_f64(is);
  return path;
}

}  // namespace stochwave
