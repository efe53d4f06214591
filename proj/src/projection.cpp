#include "beliefzones/projection.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace bz {

int SignedProjection::edge_count() const {
  int c = 0;
  for (const auto& lst : adj) c += (int)lst.size();
  return c / 2;
}

SignedProjection signed_projection(const SignedMatrices& m,
                                   const std::vector<int>& keep) {
  SignedProjection p;
  p.verts = keep;
  std::sort(p.verts.begin(), p.verts.end());
  p.verts.erase(std::unique(p.verts.begin(), p.verts.end()), p.verts.end());
  for (int i = 0; i < (int)p.verts.size(); ++i) {
    int g = p.verts[i];
    if (g < 0 || g >= m.n)
      throw validation_error("projection vertex out of range");
    p.local.emplace(g, i);
  }
  p.adj.assign(p.verts.size(), {});
  p.wdeg.assign(p.verts.size(), 0.0);

  // ordered map keeps pair iteration deterministic
  std::map<std::pair<int, int>, std::pair<double, double>> acc;
  auto add = [&](const std::vector<Row>& rows, bool positive) {
    for (int u = 0; u < m.n; ++u) {
      auto iu = p.local.find(u);
      if (iu == p.local.end()) continue;
      for (const auto& [v, w] : rows[u]) {
        auto iv = p.local.find(v);
        if (iv == p.local.end()) continue;
        auto key = std::minmax(iu->second, iv->second);
        auto& slot = acc[{key.first, key.second}];
        (positive ? slot.first : slot.second) += w;
      }
    }
  };
  add(m.supp_raw, true);
  add(m.contr_raw, false);

  for (const auto& [key, w] : acc) {
    auto [a, b] = key;
    auto [wp, wn] = w;
    if (!(wp + wn > 0.0)) continue;
    int sign = (wp >= wn) ? 1 : -1;
    p.adj[a].push_back({b, sign, wp, wn});
    p.adj[b].push_back({a, sign, wp, wn});
    p.wdeg[a] += wp + wn;
    p.wdeg[b] += wp + wn;
  }
  for (auto& lst : p.adj)
    std::sort(lst.begin(), lst.end(),
              [](const SignedProjection::Nbr& x, const SignedProjection::Nbr& y) {
                return x.v < y.v;
              });
  return p;
}

std::vector<std::vector<int>> components(const SignedProjection& p) {
  std::vector<int> all(p.nv());
  for (int i = 0; i < p.nv(); ++i) all[i] = i;
  return components_within(p, all);
}

std::vector<std::vector<int>> components_within(const SignedProjection& p,
                                                const std::vector<int>& subset) {
  std::vector<char> in(p.nv(), 0), seen(p.nv(), 0);
  for (int v : subset) in[v] = 1;
  std::vector<std::vector<int>> comps;
  for (int s : subset) {
    if (seen[s]) continue;
    std::vector<int> comp;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      comp.push_back(u);
      for (const auto& nb : p.adj[u]) {
        if (in[nb.v] && !seen[nb.v]) {
          seen[nb.v] = 1;
          q.push(nb.v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

std::vector<int> bfs_ball(const SignedProjection& p,
                          const std::vector<int>& sources, int hops) {
  std::vector<int> dist(p.nv(), -1);
  std::queue<int> q;
  std::vector<int> srcs = sources;
  std::sort(srcs.begin(), srcs.end());
  for (int g : srcs) {
    auto it = p.local.find(g);
    if (it == p.local.end())
      throw validation_error("bfs_ball: source not in projection");
    if (dist[it->second] < 0) {
      dist[it->second] = 0;
      q.push(it->second);
    }
  }
  std::vector<int> out;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    out.push_back(p.verts[u]);
    if (dist[u] == hops) continue;
    for (const auto& nb : p.adj[u]) {
      if (dist[nb.v] < 0) {
        dist[nb.v] = dist[u] + 1;
        q.push(nb.v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace bz
