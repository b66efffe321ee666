#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mecoff/error.hpp"
#include "mecoff/gev.hpp"

namespace mecoff {

// Raised when the likelihood search hits its iteration cap; carries the best
// parameters reached so callers may still use them.
class FitError : public Error {
 public:
  FitError(const std::string& what, GevParams best) : Error(what), best_(best) {}
  [[nodiscard]] const GevParams& best() const { return best_; }

 private:
  GevParams best_;
};

struct GevFitOptions {
  int max_iterations = 2000;
  double diameter_tolerance = 1e-8;
};

struct GevFitReport {
  GevParams params;
  GevParams start;
  double log_likelihood = 0.0;
  double start_log_likelihood = 0.0;
  int iterations = 0;
};

/// Probability-weighted-moment estimate (Hosking, Wallis & Wood 1985).
/// Requires at least three observations that are not all equal.
inline GevParams gev_pwm_estimate(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 3) throw Error("gev_pwm_estimate: need at least 3 observations");
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) throw Error("gev_pwm_estimate: degenerate input (all observations equal)");

  double b0 = 0, b1 = 0, b2 = 0;
  const double nm1 = static_cast<double>(n - 1), nm2 = static_cast<double>(n - 2);
  for (std::size_t j = 0; j < n; ++j) {
    const double jd = static_cast<double>(j);
    b0 += x[j];
    b1 += jd / nm1 * x[j];
    b2 += jd * (jd - 1.0) / (nm1 * nm2) * x[j];
  }
  b0 /= static_cast<double>(n);
  b1 /= static_cast<double>(n);
  b2 /= static_cast<double>(n);

  const double l2 = 2.0 * b1 - b0;
  const double c = l2 / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
  // Hosking's k is the negated shape; keep the start inside xi in (-0.9, 0.9).
  double k = std::clamp(7.8590 * c + 2.9554 * c * c, -0.9, 0.9);
  GevParams p;
  if (std::abs(k) < 1e-6) {
    p.sigma = l2 / std::log(2.0);
    p.mu = b0 - kEulerGamma * p.sigma;
    p.xi = 0.0;
    return p;
  }
  const double g = std::tgamma(1.0 + k);
  p.sigma = l2 * k / (g * (1.0 - std::pow(2.0, -k)));
  p.mu = b0 + p.sigma * (g - 1.0) / k;
  p.xi = -k;
  return p;
}

namespace detail {

struct SimplexResult {
  std::array<double, 3> x{};
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Downhill simplex (Nelder-Mead) on R^3. Stops when every vertex lies within
// `tol` of the best one or after `max_iter` iterations.
inline SimplexResult nelder_mead(const std::function<double(const std::array<double, 3>&)>& f,
                                 const std::array<double, 3>& x0, const std::array<double, 3>& step, int max_iter,
                                 double tol) {
  constexpr int n = 3;
  std::array<std::array<double, 3>, n + 1> v{};
  std::array<double, n + 1> fv{};
  v[0] = x0;
  fv[0] = f(x0);
  for (int i = 0; i < n; ++i) {
    v[i + 1] = x0;
    v[i + 1][i] += step[i];
    fv[i + 1] = f(v[i + 1]);
    if (!std::isfinite(fv[i + 1])) {
      v[i + 1][i] = x0[i] - step[i];
      fv[i + 1] = f(v[i + 1]);
    }
  }

  auto diameter = [&](const std::array<int, n + 1>& idx) {
    double d = 0;
    for (int i = 1; i <= n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += std::pow(v[idx[i]][j] - v[idx[0]][j], 2);
      d = std::max(d, std::sqrt(s));
    }
    return d;
  };

  SimplexResult res;
  std::array<int, n + 1> idx{0, 1, 2, 3};
  for (int it = 0;; ++it) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    res.iterations = it;
    if (diameter(idx) < tol) {
      res.converged = true;
      break;
    }
    if (it >= max_iter) break;

    std::array<double, 3> centroid{};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) centroid[j] += v[idx[i]][j] / n;
    }
    auto along = [&](double t) {
      std::array<double, 3> p{};
      for (int j = 0; j < n; ++j) p[j] = centroid[j] + t * (v[idx[n]][j] - centroid[j]);
      return p;
    };
    const int worst = idx[n];
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[idx[0]]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        v[worst] = xe;
        fv[worst] = fe;
      } else {
        v[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[idx[n - 1]]) {
      v[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[worst])) {
      v[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      for (int j = 0; j < n; ++j) v[idx[i]][j] = v[idx[0]][j] + 0.5 * (v[idx[i]][j] - v[idx[0]][j]);
      fv[idx[i]] = f(v[idx[i]]);
    }
  }
  res.x = v[idx[0]];
  res.value = fv[idx[0]];
  return res;
}

}  // namespace detail

/// Maximum-likelihood GEV fit by downhill simplex from the PWM estimate.
///
/// The search runs on standardized data (zero mean, unit deviation), where
/// the diameter tolerance is scale free, and restarts once from the first
/// converged point. Support violations count as +infinity negative
/// log-likelihood.
inline GevFitReport fit_gev_mle_report(const BlockMaxima& maxima, const GevFitOptions& opts = {}) {
  const auto& x = maxima.maxima;
  if (x.size() < 10) throw Error("fit_gev_mle: need at least 10 block maxima, got " + std::to_string(x.size()));
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw Error("fit_gev_mle: degenerate input (all maxima equal)");
  for (double v : x) {
    if (!std::isfinite(v)) throw Error("fit_gev_mle: non-finite observation");
  }

  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean) / sd;

  auto to_original = [&](const GevParams& s) { return GevParams{mean + sd * s.mu, sd * s.sigma, s.xi}; };

  GevFitReport report;
  GevParams start = gev_pwm_estimate(z);
  report.start = to_original(start);
  report.start_log_likelihood = gev_log_likelihood(report.start, x);

  // Pull an infeasible moment start toward the Gumbel limit, whose support is
  // the whole line.
  for (int i = 0; i < 60 && !std::isfinite(gev_log_likelihood(start, z)); ++i) start.xi *= 0.5;
  if (!std::isfinite(gev_log_likelihood(start, z))) {
    start.sigma = std::sqrt(6.0) / 3.14159265358979323846;
    start.mu = -kEulerGamma * start.sigma;
    start.xi = 0.0;
  }

  auto nll = [&](const std::array<double, 3>& p) {
    const double ll = gev_log_likelihood(GevParams{p[0], p[1], p[2]}, z);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };

  std::array<double, 3> point{start.mu, start.sigma, start.xi};
  int used = 0;
  detail::SimplexResult res;
  for (int pass = 0; pass < 2; ++pass) {
    const std::array<double, 3> step{0.1 * point[1], 0.1 * point[1], 0.1};
    res = detail::nelder_mead(nll, point, step, opts.max_iterations - used, opts.diameter_tolerance);
    used += res.iterations;
    point = res.x;
    if (!res.converged) break;
  }
  report.iterations = used;
  report.params = to_original(GevParams{point[0], point[1], point[2]});
  report.log_likelihood = gev_log_likelihood(report.params, x);
  if (!res.converged) {
    throw FitError("fit_gev_mle: no convergence within " + std::to_string(opts.max_iterations) + " iterations",
                   report.params);
  }
  return report;
}

inline GevParams fit_gev_mle(const BlockMaxima& maxima, const GevFitOptions& opts = {}) {
  return fit_gev_mle_report(maxima, opts).params;
}

}  // namespace mecoff
