#include "ia/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace ia {

namespace {

constexpr double kOptTol = 1e-9;    // reduced-cost threshold for entering
constexpr double kFeasTol = 1e-9;   // phase-one residual allowed
constexpr double kDenomTol = 1e-11; // smallest acceptable pivot magnitude
constexpr double kBlandTol = 1e-12;

// Dense tableau: m constraint rows plus a reduced-cost row, shared by both
// phases. Column order: structural, slacks, artificials, rhs.
struct Tableau {
  int m = 0;
  int cols = 0;  // excluding rhs
  std::vector<std::vector<double>> a;  // m rows of cols+1
  std::vector<double> z;               // cols+1, entry j = z_j - c_j
  std::vector<int> basis;              // per row
  std::vector<char> allowed;           // per column, false once banned
  long iterations = 0;

  double& rhs(int i) { return a[i][cols]; }

  void pivot(int r, int e) {
    std::vector<double>& pr = a[r];
    const double inv = 1.0 / pr[e];
    for (int j = 0; j <= cols; ++j) pr[j] *= inv;
    pr[e] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = a[i][e];
      if (f == 0.0) continue;
      std::vector<double>& ri = a[i];
      for (int j = 0; j <= cols; ++j) ri[j] -= f * pr[j];
      ri[e] = 0.0;
      if (ri[cols] < 0.0 && ri[cols] > -kDenomTol) ri[cols] = 0.0;
    }
    const double f = z[e];
    if (f != 0.0) {
      for (int j = 0; j <= cols; ++j) z[j] -= f * pr[j];
      z[e] = 0.0;
    }
    basis[r] = e;
    ++iterations;
  }

  // returns optimal / unbounded / iteration_limit
  SimplexStatus run(long bland_after, long max_iter) {
    while (true) {
      if (iterations >= max_iter) return SimplexStatus::iteration_limit;
      const bool bland = iterations >= bland_after;
      int enter = -1;
      if (bland) {
        for (int j = 0; j < cols; ++j)
          if (allowed[j] && z[j] < -kBlandTol) {
            enter = j;
            break;
          }
      } else {
        double best = -kOptTol;
        for (int j = 0; j < cols; ++j)
          if (allowed[j] && z[j] < best) {
            best = z[j];
            enter = j;
          }
      }
      if (enter < 0) return SimplexStatus::optimal;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double d = a[i][enter];
        if (d <= kDenomTol) continue;
        const double ratio = a[i][cols] / d;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return SimplexStatus::unbounded;
      pivot(leave, enter);
    }
  }
};

}  // namespace

SimplexResult simplex_maximize(const SimplexProblem& p) {
  const int n = p.num_vars;
  const int m_eq = static_cast<int>(p.eq_rows.size());
  const int m_le = static_cast<int>(p.le_rows.size());
  const int m = m_eq + m_le;

  SimplexResult res;

  auto base_tableau = [&](bool with_artificials) {
    Tableau t;
    t.m = m;
    t.cols = n + m_le;  // artificial columns appended on demand
    t.basis.assign(m, -1);
    t.a.assign(m, {});
    for (int i = 0; i < m; ++i) {
      std::vector<double>& row = t.a[i];
      row.assign(t.cols + 1, 0.0);
      const bool is_eq = i < m_eq;
      const std::vector<double>& src = is_eq ? p.eq_rows[i] : p.le_rows[i - m_eq];
      for (int j = 0; j < n; ++j) row[j] = src[j];
      if (!is_eq) row[n + (i - m_eq)] = 1.0;
      row[t.cols] = is_eq ? p.eq_rhs[i] : p.le_rhs[i - m_eq];
      if (row[t.cols] < 0.0)
        for (int j = 0; j <= t.cols; ++j) row[j] = -row[j];
    }
    if (with_artificials) {
      // natural slack basis where available, artificial column otherwise
      std::vector<int> art_rows;
      for (int i = 0; i < m; ++i) {
        const int slack = n + (i - m_eq);
        if (i >= m_eq && t.a[i][slack] > 0.0)
          t.basis[i] = slack;
        else
          art_rows.push_back(i);
      }
      const int first_art = t.cols;
      t.cols += static_cast<int>(art_rows.size());
      for (int i = 0; i < m; ++i) t.a[i].insert(t.a[i].end() - 1, art_rows.size(), 0.0);
      for (int k = 0; k < static_cast<int>(art_rows.size()); ++k) {
        t.a[art_rows[k]][first_art + k] = 1.0;
        t.basis[art_rows[k]] = first_art + k;
      }
    }
    t.allowed.assign(t.cols, 1);
    return t;
  };

  const long bland_after = 1000 + 10L * (m + n + m_le);
  const long max_iter = 50000 + 500L * (m + n + m_le);

  Tableau t;
  bool have_basis = false;

  // try the caller's basis first; a failed hint is not an error
  if (static_cast<int>(p.basis_hint.size()) == m) {
    t = base_tableau(false);
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      const int col = p.basis_hint[i];
      if (col < 0 || col >= t.cols || std::abs(t.a[i][col]) < kDenomTol) {
        ok = false;
        break;
      }
      t.z.assign(t.cols + 1, 0.0);  // unused during factorization
      t.pivot(i, col);
    }
    if (ok)
      for (int i = 0; i < m; ++i)
        if (t.a[i][t.cols] < -kFeasTol) ok = false;
    if (ok) {
      for (int i = 0; i < m; ++i)
        if (t.rhs(i) < 0.0) t.rhs(i) = 0.0;
      have_basis = true;
      t.iterations = 0;
    }
  }

  if (!have_basis) {
    t = base_tableau(true);
    const int n_core = n + m_le;
    // phase one: maximize minus the artificial sum
    t.z.assign(t.cols + 1, 0.0);
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] < n_core) continue;
      for (int j = 0; j <= t.cols; ++j) t.z[j] -= t.a[i][j];
    }
    for (int j = n_core; j < t.cols; ++j) t.z[j] += 1.0;

    SimplexStatus st = t.run(bland_after, max_iter);
    if (st == SimplexStatus::iteration_limit) {
      res.status = st;
      return res;
    }
    if (-t.z[t.cols] > kFeasTol) {  // artificial mass left: no feasible point
      res.status = SimplexStatus::infeasible;
      return res;
    }
    // drive artificials out of the basis when possible, ban them either way
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] < n_core) continue;
      int col = -1;
      for (int j = 0; j < n_core; ++j)
        if (std::abs(t.a[i][j]) > kDenomTol) {
          col = j;
          break;
        }
      if (col >= 0) t.pivot(i, col);
    }
    for (int j = n_core; j < t.cols; ++j) t.allowed[j] = 0;
    t.iterations = 0;
  }

  // phase two with the real objective
  t.z.assign(t.cols + 1, 0.0);
  for (int j = 0; j < n; ++j) t.z[j] = -p.objective[j];
  for (int i = 0; i < m; ++i) {
    const int b = t.basis[i];
    const double cb = (b < n) ? p.objective[b] : 0.0;
    if (cb == 0.0) continue;
    for (int j = 0; j <= t.cols; ++j) t.z[j] += cb * t.a[i][j];
  }
  for (int i = 0; i < m; ++i) t.z[t.basis[i]] = 0.0;

  SimplexStatus st = t.run(bland_after, max_iter);
  res.status = st;
  res.iterations = t.iterations;
  if (st != SimplexStatus::optimal) return res;

  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (t.basis[i] < n) res.x[t.basis[i]] = std::max(0.0, t.a[i][t.cols]);
  res.value = 0.0;
  for (int j = 0; j < n; ++j) res.value += p.objective[j] * res.x[j];
  return res;
}

}  // namespace ia
