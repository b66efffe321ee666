#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "mecoff/error.hpp"

namespace mecoff {

enum class RowSense { less_equal, greater_equal, equal };

struct LpRow {
  std::vector<double> coeffs;
  RowSense sense = RowSense::less_equal;
  double rhs = 0;
};

/// minimize cost . x  subject to the rows and x >= 0.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<LpRow> rows;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0;
  // Row multipliers y with cost - A^T y >= 0 at the optimum: y >= 0 on
  // greater-equal rows, y <= 0 on less-equal rows.
  std::vector<double> duals;
  int pivots = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  double& obj(std::size_t c) { return at(m_, c); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= n_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Loads cost into the objective row and prices out the basic columns.
  void set_objective(const std::vector<double>& cost) {
    for (std::size_t c = 0; c < n_; ++c) obj(c) = cost[c];
    obj(n_) = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) obj(c) -= cb * at(r, c);
    }
  }

  // Bland's rule: lowest-index improving column, lowest-index leaving basic
  // variable among ratio ties.
  LpStatus run(const std::vector<bool>& allowed, int max_pivots, int& pivots, double tol) {
    for (;;) {
      std::size_t enter = n_;
      for (std::size_t c = 0; c < n_; ++c) {
        if (allowed[c] && obj(c) < -tol) {
          enter = c;
          break;
        }
      }
      if (enter == n_) return LpStatus::optimal;
      if (pivots >= max_pivots) return LpStatus::iteration_limit;

      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double coef = at(r, enter);
        if (coef <= tol) continue;
        const double ratio = rhs(r) / coef;
        if (ratio < best - tol) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + tol && basis_[r] < basis_[leave]) {
          leave = r;
        }
      }
      if (leave == m_) return LpStatus::unbounded;
      pivot(leave, enter);
      ++pivots;
    }
  }

  std::size_t m_, n_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Two-phase dense tableau simplex with Bland's anti-cycling rule.
inline LpResult solve_lp(const LinearProgram& lp, int max_pivots = 100000, double tol = 1e-9) {
  const std::size_t n = lp.cost.size();
  const std::size_t m = lp.rows.size();
  for (const auto& row : lp.rows) {
    if (row.coeffs.size() != n) throw Error("solve_lp: row width does not match the cost vector");
  }

  // Flip rows with negative right-hand side so every rhs is nonnegative.
  std::vector<double> sign(m, 1.0);
  std::vector<RowSense> sense(m);
  for (std::size_t i = 0; i < m; ++i) {
    sense[i] = lp.rows[i].sense;
    if (lp.rows[i].rhs < 0) {
      sign[i] = -1.0;
      if (sense[i] == RowSense::less_equal) sense[i] = RowSense::greater_equal;
      else if (sense[i] == RowSense::greater_equal) sense[i] = RowSense::less_equal;
    }
  }

  // Column layout: originals, one slack/surplus per inequality, artificials.
  std::vector<std::size_t> slack_col(m, SIZE_MAX), unit_col(m);
  std::size_t cols = n;
  for (std::size_t i = 0; i < m; ++i) {
    if (sense[i] != RowSense::equal) slack_col[i] = cols++;
  }
  const std::size_t first_art = cols;
  for (std::size_t i = 0; i < m; ++i) {
    if (sense[i] == RowSense::less_equal) unit_col[i] = slack_col[i];
    else unit_col[i] = cols++;
  }

  detail::Tableau t(m, cols);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign[i] * lp.rows[i].coeffs[j];
    t.rhs(i) = sign[i] * lp.rows[i].rhs;
    if (slack_col[i] != SIZE_MAX) t.at(i, slack_col[i]) = sense[i] == RowSense::less_equal ? 1.0 : -1.0;
    t.at(i, unit_col[i]) = 1.0;
    t.basis_[i] = unit_col[i];
  }

  double rhs_scale = 0;
  for (std::size_t i = 0; i < m; ++i) rhs_scale += t.rhs(i);

  LpResult res;
  std::vector<bool> allowed(cols, true);
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t c = first_art; c < cols; ++c) phase1[c] = 1.0;
  t.set_objective(phase1);
  auto st = t.run(allowed, max_pivots, res.pivots, tol);
  if (st == LpStatus::iteration_limit) {
    res.status = st;
    return res;
  }
  if (-t.obj(cols) > 1e-7 * std::max(1.0, rhs_scale)) {
    res.status = LpStatus::infeasible;
    return res;
  }

  // Drive zero-level artificials out of the basis where a real column allows.
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis_[r] < first_art) continue;
    for (std::size_t c = 0; c < first_art; ++c) {
      if (std::abs(t.at(r, c)) > tol) {
        t.pivot(r, c);
        ++res.pivots;
        break;
      }
    }
  }

  for (std::size_t c = first_art; c < cols; ++c) allowed[c] = false;
  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.cost[j];
  t.set_objective(phase2);
  st = t.run(allowed, max_pivots, res.pivots, tol);
  res.status = st;
  if (st != LpStatus::optimal) return res;

  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis_[r] < n) res.x[t.basis_[r]] = t.rhs(r);
  }
  res.objective = 0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.cost[j] * res.x[j];
  res.duals.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) res.duals[i] = -sign[i] * t.obj(unit_col[i]);
  return res;
}

}  // namespace mecoff
