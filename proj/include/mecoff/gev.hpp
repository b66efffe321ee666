#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mecoff/error.hpp"
#include "mecoff/random.hpp"

namespace mecoff {

/// Generalized extreme value distribution, location mu, scale sigma > 0,
/// shape xi. Density is positive only where 1 + xi (z - mu) / sigma > 0.
struct GevParams {
  double mu = 0.0;
  double sigma = 1.0;
  double xi = 0.0;

  friend bool operator==(const GevParams&, const GevParams&) = default;
};

// |xi| below this is evaluated with the Gumbel (xi = 0) formulas.
inline constexpr double kGumbelShapeCutoff = 1e-9;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

inline bool is_gumbel(const GevParams& p) { return std::abs(p.xi) < kGumbelShapeCutoff; }

// Support endpoints; infinite on the open side.
inline double gev_lower_endpoint(const GevParams& p) {
  return (!is_gumbel(p) && p.xi > 0) ? p.mu - p.sigma / p.xi : -std::numeric_limits<double>::infinity();
}
inline double gev_upper_endpoint(const GevParams& p) {
  return (!is_gumbel(p) && p.xi < 0) ? p.mu - p.sigma / p.xi : std::numeric_limits<double>::infinity();
}

inline double gev_cdf(const GevParams& p, double z) {
  const double s = (z - p.mu) / p.sigma;
  if (is_gumbel(p)) return std::exp(-std::exp(-s));
  const double t = p.xi * s;
  if (t <= -1.0) return p.xi > 0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(t) / p.xi));
}

/// Upper-tail quantile: the z with Pr(Z >= z) = eps.
inline double gev_quantile(const GevParams& p, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error("gev_quantile: probability must lie in (0, 1)");
  const double y = -std::log1p(-eps);
  if (is_gumbel(p)) return p.mu - p.sigma * std::log(y);
  // mu - sigma/xi * (1 - y^-xi), written with expm1 to stay accurate near xi = 0.
  return p.mu + p.sigma * std::expm1(-p.xi * std::log(y)) / p.xi;
}

/// Mean; +infinity when xi >= 1.
inline double gev_mean(const GevParams& p) {
  if (is_gumbel(p)) return p.mu + p.sigma * kEulerGamma;
  if (p.xi >= 1.0) return std::numeric_limits<double>::infinity();
  return p.mu + p.sigma * (std::tgamma(1.0 - p.xi) - 1.0) / p.xi;
}

/// Inverse-transform draw.
inline double gev_sample(const GevParams& p, Rng& rng) { return gev_quantile(p, uniform_open01(rng)); }

/// Log-likelihood of i.i.d. observations; -infinity when sigma <= 0 or any
/// observation falls outside the support.
inline double gev_log_likelihood(const GevParams& p, std::span<const double> data) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (!(p.sigma > 0.0) || !std::isfinite(p.mu) || !std::isfinite(p.xi)) return ninf;
  const double log_sigma = std::log(p.sigma);
  double ll = 0.0;
  if (is_gumbel(p)) {
    for (double x : data) {
      const double s = (x - p.mu) / p.sigma;
      ll += -log_sigma - s - std::exp(-s);
    }
    return std::isfinite(ll) ? ll : ninf;
  }
  for (double x : data) {
    const double t = p.xi * (x - p.mu) / p.sigma;
    if (t <= -1.0) return ninf;
    const double log_t = std::log1p(t);
    ll += -log_sigma - (1.0 + 1.0 / p.xi) * log_t - std::exp(-log_t / p.xi);
  }
  return std::isfinite(ll) ? ll : ninf;
}

/// Realizations of a per-transfer random quantity (transfer time, energy per
/// bit) with the unit they are measured in.
struct SampleSet {
  std::vector<double> values;
  std::string unit;
};

struct BlockMaxima {
  std::vector<double> maxima;
  std::size_t block_size = 1;
};

/// Maximum of each consecutive block of k samples; a trailing partial block
/// is dropped.
inline BlockMaxima block_maxima(std::span<const double> samples, std::size_t k) {
  if (k < 1) throw Error("block_maxima: block size must be at least 1");
  if (samples.size() < k) {
    throw Error("block_maxima: " + std::to_string(samples.size()) + " samples cannot fill a block of " +
                std::to_string(k));
  }
  BlockMaxima out;
  out.block_size = k;
  const std::size_t blocks = samples.size() / k;
  out.maxima.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    double m = samples[b * k];
    for (std::size_t i = b * k + 1; i < (b + 1) * k; ++i) m = std::max(m, samples[i]);
    out.maxima.push_back(m);
  }
  return out;
}

}  // namespace mecoff
