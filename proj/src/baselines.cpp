#include "beliefzones/baselines.hpp"

#include <algorithm>

#include "beliefzones/zones.hpp"

namespace bz {

SignedMatrices unsigned_view(const SignedMatrices& m) {
  SignedMatrices u;
  u.n = m.n;
  u.supp_raw.resize(m.n);
  u.contr_raw.resize(m.n);
  u.supp_hat.resize(m.n);
  u.contr_hat.resize(m.n);
  u.supp_in.resize(m.n);
  u.contr_in.resize(m.n);
  u.supp_row_sum.assign(m.n, 0.0);
  u.contr_row_sum.assign(m.n, 0.0);
  for (int i = 0; i < m.n; ++i) {
    const Row& a = m.supp_raw[i];
    const Row& b = m.contr_raw[i];
    Row merged;
    merged.reserve(a.size() + b.size());
    size_t ia = 0, ib = 0;
    while (ia < a.size() || ib < b.size()) {
      if (ib == b.size() || (ia < a.size() && a[ia].first < b[ib].first))
        merged.push_back(a[ia++]);
      else if (ia == a.size() || b[ib].first < a[ia].first)
        merged.push_back(b[ib++]);
      else {
        merged.emplace_back(a[ia].first, a[ia].second + b[ib].second);
        ++ia;
        ++ib;
      }
    }
    double sum = 0.0;
    for (const auto& [col, w] : merged) sum += w;
    u.supp_row_sum[i] = sum;
    double div = std::max(1.0, sum);
    Row capped = merged;
    for (auto& [col, w] : capped) w /= div;
    u.supp_raw[i] = std::move(merged);
    u.supp_hat[i] = std::move(capped);
  }
  for (int i = 0; i < m.n; ++i)
    for (const auto& [col, w] : u.supp_hat[i]) u.supp_in[col].emplace_back(i, w);
  return u;
}

namespace {

struct LevelGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj; // symmetric, no self
  std::vector<double> self_w;
  std::vector<double> k; // weighted degree, self loops counted twice
  double m2 = 0.0;       // sum of k
};

// one pass of local moves until stable; returns whether anything moved
bool local_moves(const LevelGraph& g, const LouvainParams& lp,
                 std::vector<int>& comm) {
  std::vector<double> ctot(g.n, 0.0);
  for (int u = 0; u < g.n; ++u) ctot[comm[u]] += g.k[u];
  double m = g.m2 / 2.0;
  std::vector<double> wc(g.n, 0.0);
  std::vector<int> touched;
  bool moved_any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (int u = 0; u < g.n; ++u) {
      touched.clear();
      for (const auto& [v, w] : g.adj[u]) {
        int c = comm[v];
        if (wc[c] == 0.0) touched.push_back(c);
        wc[c] += w;
      }
      int c0 = comm[u];
      ctot[c0] -= g.k[u];
      std::sort(touched.begin(), touched.end());
      auto gain = [&](int c) {
        return wc[c] / m - lp.resolution * ctot[c] * g.k[u] / (2.0 * m * m);
      };
      double stay = gain(c0);
      int best = c0;
      double best_gain = stay;
      for (int c : touched)
        if (c != c0 && (gain(c) > best_gain ||
                        (gain(c) == best_gain && c < best))) {
          best = c;
          best_gain = gain(c);
        }
      if (best != c0 && best_gain - stay > lp.min_gain) {
        comm[u] = best;
        moved = true;
        moved_any = true;
      }
      ctot[comm[u]] += g.k[u];
      for (int c : touched) wc[c] = 0.0;
    }
  }
  return moved_any;
}

// contract communities (relabeled in smallest-member order) into a new level
LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& comm,
                     std::vector<int>& relabel, int& n_comm) {
  relabel.assign(g.n, -1);
  n_comm = 0;
  for (int u = 0; u < g.n; ++u)
    if (relabel[comm[u]] < 0) relabel[comm[u]] = n_comm++;
  LevelGraph h;
  h.n = n_comm;
  h.adj.resize(n_comm);
  h.self_w.assign(n_comm, 0.0);
  h.k.assign(n_comm, 0.0);
  std::vector<double> acc(n_comm, 0.0);
  std::vector<int> touched;
  for (int cu = 0; cu < n_comm; ++cu) h.adj[cu].reserve(4);
  // scratch accumulation per source community, scanning members in order
  std::vector<std::vector<int>> members(n_comm);
  for (int u = 0; u < g.n; ++u) members[relabel[comm[u]]].push_back(u);
  for (int cu = 0; cu < n_comm; ++cu) {
    touched.clear();
    double self_acc = 0.0;
    for (int u : members[cu]) {
      self_acc += 2.0 * g.self_w[u];
      for (const auto& [v, w] : g.adj[u]) {
        int cv = relabel[comm[v]];
        if (cv == cu) {
          self_acc += w;
        } else {
          if (acc[cv] == 0.0) touched.push_back(cv);
          acc[cv] += w;
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int cv : touched) {
      h.adj[cu].emplace_back(cv, acc[cv]);
      acc[cv] = 0.0;
    }
    h.self_w[cu] = self_acc / 2.0;
  }
  for (int c = 0; c < n_comm; ++c) {
    double deg = 2.0 * h.self_w[c];
    for (const auto& [v, w] : h.adj[c]) deg += w;
    h.k[c] = deg;
    h.m2 += deg;
  }
  return h;
}

} // namespace

std::vector<std::vector<int>> louvain_communities(const SignedProjection& p,
                                                  const LouvainParams& lp) {
  int n = p.nv();
  if (n == 0) return {};
  std::vector<int> assign(n);
  for (int i = 0; i < n; ++i) assign[i] = i;
  LevelGraph g;
  g.n = n;
  g.adj.resize(n);
  g.self_w.assign(n, 0.0);
  g.k.assign(n, 0.0);
  for (int u = 0; u < n; ++u)
    for (const auto& nb : p.adj[u]) g.adj[u].emplace_back(nb.v, nb.wpos + nb.wneg);
  for (int u = 0; u < n; ++u) {
    for (const auto& [v, w] : g.adj[u]) g.k[u] += w;
    g.m2 += g.k[u];
  }
  if (g.m2 > 0.0) {
    for (;;) {
      std::vector<int> comm(g.n);
      for (int i = 0; i < g.n; ++i) comm[i] = i;
      if (!local_moves(g, lp, comm)) break;
      std::vector<int> relabel;
      int n_comm = 0;
      LevelGraph h = aggregate(g, comm, relabel, n_comm);
      for (int i = 0; i < n; ++i) assign[i] = relabel[comm[assign[i]]];
      if (n_comm == g.n) break;
      g = std::move(h);
    }
  }
  std::vector<std::vector<int>> sets(
      *std::max_element(assign.begin(), assign.end()) + 1);
  for (int i = 0; i < n; ++i) sets[assign[i]].push_back(p.verts[i]);
  sets.erase(std::remove_if(sets.begin(), sets.end(),
                            [](const auto& s) { return s.empty(); }),
             sets.end());
  for (auto& s : sets) std::sort(s.begin(), s.end());
  std::sort(sets.begin(), sets.end());
  return sets;
}

std::vector<Zone> zones_from_sets(const std::vector<std::vector<int>>& sets,
                                  const std::vector<double>& phi) {
  std::vector<Zone> zones;
  for (const auto& s : sets) {
    if (s.empty()) continue;
    Zone z;
    z.members = s;
    std::sort(z.members.begin(), z.members.end());
    double sum = 0.0, mn = phi[z.members[0]];
    for (int v : z.members) {
      sum += phi[v];
      mn = std::min(mn, phi[v]);
    }
    z.mean_phi = sum / (double)z.members.size();
    z.min_phi = mn;
    zones.push_back(std::move(z));
  }
  return zones;
}

Atlas baseline_unsign_cl(const SignedMatrices& m,
                         const std::vector<double>& phi, double theta,
                         const GovernanceParams& gp, const LouvainParams& lp) {
  std::vector<int> keep = threshold_nodes(phi, theta);
  if (keep.empty()) {
    Atlas a;
    a.mode = gp.mode;
    return a;
  }
  SignedProjection proj = signed_projection(m, keep);
  std::vector<Zone> zones = zones_from_sets(louvain_communities(proj, lp), phi);
  return atlas_update(zones, phi, m, gp, &proj);
}

ConfidenceState baseline_unsign_pro(const BeliefGraph& g,
                                    const SignedMatrices& unsigned_m,
                                    const PropagationParams& pp) {
  PropagationParams p2 = pp;
  p2.eta = 0.0;
  return propagate(g, unsigned_m, p2);
}

} // namespace bz
