#include "beliefzones/metrics.hpp"

#include <algorithm>
#include <limits>

namespace bz {

static int intersection_size(const std::vector<int>& a,
                             const std::vector<int>& b) {
  size_t i = 0, j = 0;
  int count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (b[j] < a[i])
      ++j;
    else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

static std::vector<int> union_of(const std::vector<std::vector<int>>& sets) {
  std::vector<int> u;
  for (const auto& s : sets) u.insert(u.end(), s.begin(), s.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

static double f1_of(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

FamilyScores family_metrics(const std::vector<std::vector<int>>& reported,
                            const std::vector<std::vector<int>>& truth) {
  if (truth.empty()) throw validation_error("truth family must be nonempty");
  FamilyScores s;
  if (reported.empty()) {
    s.undefined_precision = true;
  } else {
    double acc = 0.0;
    for (const auto& z : reported) {
      int best = 0;
      for (const auto& t : truth) best = std::max(best, intersection_size(z, t));
      acc += (double)best / (double)z.size();
    }
    s.precision = acc / (double)reported.size();
  }
  double acc = 0.0;
  for (const auto& t : truth) {
    int best = 0;
    for (const auto& z : reported) best = std::max(best, intersection_size(z, t));
    acc += (double)best / (double)t.size();
  }
  s.recall = acc / (double)truth.size();
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

FamilyScores node_metrics(const std::vector<std::vector<int>>& reported,
                          const std::vector<std::vector<int>>& truth) {
  if (truth.empty()) throw validation_error("truth family must be nonempty");
  std::vector<int> u = union_of(reported), t = union_of(truth);
  int inter = intersection_size(u, t);
  FamilyScores s;
  if (u.empty())
    s.undefined_precision = true;
  else
    s.precision = (double)inter / (double)u.size();
  s.recall = t.empty() ? 0.0 : (double)inter / (double)t.size();
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

// square min-cost assignment with potentials; cost[i][j] row i to column j
static std::vector<int> solve_assignment(
    const std::vector<std::vector<double>>& cost) {
  int n = (int)cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, n), way(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    p[n] = i;
    int j0 = n;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 0; j < n; ++j)
        if (!used[j]) {
          double cur = cost[i0][j] - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != n);
    while (j0 != n) {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    }
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 0; j < n; ++j)
    if (p[j] >= 0 && p[j] < n) row_to_col[p[j]] = j;
  return row_to_col;
}

MatchResult hungarian_match(const std::vector<std::vector<int>>& reported,
                            const std::vector<std::vector<int>>& truth) {
  MatchResult out;
  int nr = (int)reported.size(), nt = (int)truth.size();
  if (nr == 0 || nt == 0) {
    out.assignment.assign(nr, -1);
    return out;
  }
  int n = std::max(nr, nt);
  std::vector<std::vector<double>> jac(nr, std::vector<double>(nt, 0.0));
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 1.0));
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      jac[i][j] = jaccard(reported[i], truth[j]);
      cost[i][j] = 1.0 - jac[i][j];
    }
  std::vector<int> row_to_col = solve_assignment(cost);
  out.assignment.assign(nr, -1);
  double sum = 0.0;
  for (int i = 0; i < nr; ++i) {
    int j = row_to_col[i];
    if (j >= 0 && j < nt) {
      out.assignment[i] = j;
      sum += jac[i][j];
    }
  }
  out.mean_jaccard = sum / (double)std::min(nr, nt);
  return out;
}

static double best_match_mean(const std::vector<std::vector<int>>& prev,
                              const std::vector<std::vector<int>>& post) {
  if (prev.empty())
    throw validation_error("churn/stability need a nonempty previous atlas");
  double acc = 0.0;
  for (const auto& z : prev) {
    double best = 0.0;
    for (const auto& w : post) best = std::max(best, jaccard(z, w));
    acc += best;
  }
  return acc / (double)prev.size();
}

double churn(const std::vector<std::vector<int>>& prev,
             const std::vector<std::vector<int>>& post) {
  return 1.0 - best_match_mean(prev, post);
}

double stability(const std::vector<std::vector<int>>& prev,
                 const std::vector<std::vector<int>>& post) {
  return best_match_mean(prev, post);
}

double churn_tau(const std::vector<std::vector<int>>& prev,
                 const std::vector<std::vector<int>>& post, double tau) {
  if (prev.empty())
    throw validation_error("churn/stability need a nonempty previous atlas");
  int unmatched = 0;
  for (const auto& z : prev) {
    double best = 0.0;
    for (const auto& w : post) best = std::max(best, jaccard(z, w));
    if (best < tau) ++unmatched;
  }
  return (double)unmatched / (double)prev.size();
}

CollapseResult false_collapse_rate(const std::vector<std::vector<int>>& truth,
                                   const std::vector<std::vector<int>>& post,
                                   const std::vector<double>& phi, double theta,
                                   double tau, double retention) {
  if (truth.empty()) throw validation_error("truth family must be nonempty");
  int denom = 0, num = 0;
  for (const auto& t : truth) {
    if (t.empty()) continue;
    int kept = 0;
    for (int v : t)
      if (phi[v] >= theta) ++kept;
    if ((double)kept / (double)t.size() < retention) continue;
    ++denom;
    double best = 0.0;
    for (const auto& z : post) best = std::max(best, jaccard(t, z));
    if (best < tau) ++num;
  }
  CollapseResult out;
  if (denom == 0) {
    out.undefined = true;
    return out;
  }
  out.rate = (double)num / (double)denom;
  return out;
}

double coverage(const std::vector<std::vector<int>>& sets, int v_theta_size) {
  if (v_theta_size <= 0) return 0.0;
  return (double)union_of(sets).size() / (double)v_theta_size;
}

double mean_pairwise_jaccard(const std::vector<std::vector<int>>& sets) {
  int n = (int)sets.size();
  if (n < 2) return 0.0;
  double acc = 0.0;
  int pairs = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      acc += jaccard(sets[i], sets[j]);
      ++pairs;
    }
  return acc / (double)pairs;
}

std::vector<std::vector<int>> atlas_sets(const Atlas& a) {
  std::vector<std::vector<int>> sets;
  sets.reserve(a.zones.size());
  for (const ScoredZone& z : a.zones) sets.push_back(z.zone.members);
  return sets;
}

} // namespace bz
