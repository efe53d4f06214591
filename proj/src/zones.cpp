#include "beliefzones/zones.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace bz {

BalanceResult balance_test(const SignedProjection& p,
                           const std::vector<int>& comp) {
  BalanceResult res;
  std::vector<char> in(p.nv(), 0);
  std::vector<int> color(p.nv(), -1), parent(p.nv(), -1), depth(p.nv(), 0);
  for (int v : comp) in[v] = 1;

  std::queue<int> q;
  int root = comp.empty() ? -1 : comp[0];
  if (root >= 0) {
    color[root] = 0;
    q.push(root);
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const auto& nb : p.adj[u]) {
      if (!in[nb.v]) continue;
      int want = (nb.sign > 0) ? color[u] : 1 - color[u];
      if (color[nb.v] < 0) {
        color[nb.v] = want;
        parent[nb.v] = u;
        depth[nb.v] = depth[u] + 1;
        q.push(nb.v);
      } else if (color[nb.v] != want) {
        // conflict edge (u, nb.v): walk both tree paths to their meeting
        // point; the closed walk carries an odd number of negative edges
        int a = u, b = nb.v;
        std::vector<int> pa, pb;
        while (depth[a] > depth[b]) {
          pa.push_back(a);
          a = parent[a];
        }
        while (depth[b] > depth[a]) {
          pb.push_back(b);
          b = parent[b];
        }
        while (a != b) {
          pa.push_back(a);
          pb.push_back(b);
          a = parent[a];
          b = parent[b];
        }
        pa.push_back(a); // the meeting vertex, once
        res.balanced = false;
        res.cycle.clear();
        for (int v : pa) res.cycle.push_back(p.verts[v]);
        for (auto it = pb.rbegin(); it != pb.rend(); ++it)
          res.cycle.push_back(p.verts[*it]);
        std::reverse(res.cycle.begin(), res.cycle.end()); // starts at nb.v side
        return res;
      }
    }
  }
  res.balanced = true;
  res.side.reserve(comp.size());
  for (int v : comp) res.side.push_back(color[v]);
  return res;
}

int cycle_sign_product(const SignedProjection& p,
                       const std::vector<int>& cycle) {
  int prod = 1;
  for (size_t i = 0; i < cycle.size(); ++i) {
    int ga = cycle[i];
    int gb = cycle[(i + 1) % cycle.size()];
    auto ita = p.local.find(ga);
    auto itb = p.local.find(gb);
    if (ita == p.local.end() || itb == p.local.end())
      throw validation_error("cycle vertex not in projection");
    bool found = false;
    for (const auto& nb : p.adj[ita->second]) {
      if (nb.v == itb->second) {
        prod *= nb.sign;
        found = true;
        break;
      }
    }
    if (!found) throw validation_error("cycle edge not in projection");
  }
  return prod;
}

double quantile_threshold(const std::vector<double>& phi, double q) {
  if (phi.empty()) throw validation_error("quantile of empty vector");
  if (!(q >= 0.0 && q <= 1.0)) throw validation_error("quantile q must lie in [0,1]");
  std::vector<double> s = phi;
  std::sort(s.begin(), s.end());
  if (s.size() == 1) return s[0];
  double h = q * (double)(s.size() - 1);
  size_t lo = (size_t)h;
  if (lo >= s.size() - 1) return s.back();
  double frac = h - (double)lo;
  return s[lo] + frac * (s[lo + 1] - s[lo]);
}

std::vector<int> threshold_nodes(const std::vector<double>& phi, double theta) {
  std::vector<int> out;
  for (int i = 0; i < (int)phi.size(); ++i)
    if (phi[i] >= theta) out.push_back(i);
  return out;
}

static double wdeg_within(const SignedProjection& p, int v,
                          const std::vector<char>& in) {
  double d = 0.0;
  for (const auto& nb : p.adj[v])
    if (in[nb.v]) d += nb.wpos + nb.wneg;
  return d;
}

std::vector<Zone> extract_zones(const SignedProjection& p,
                                const std::vector<double>& phi,
                                const ClosureHook& closure) {
  std::vector<std::vector<int>> work = components(p);
  std::vector<std::vector<int>> accepted; // local index lists

  std::vector<char> in(p.nv(), 0);
  while (!work.empty()) {
    std::vector<int> comp = std::move(work.back());
    work.pop_back();
    if (comp.empty()) continue;
    BalanceResult res = balance_test(p, comp);
    if (res.balanced) {
      accepted.push_back(std::move(comp));
      continue;
    }
    for (int v : comp) in[v] = 1;
    int pick = -1;
    double pick_phi = 0.0, pick_deg = 0.0;
    for (int gid : res.cycle) {
      int v = p.local.at(gid);
      double ph = phi[gid];
      double dg = wdeg_within(p, v, in);
      if (pick < 0 || ph < pick_phi ||
          (ph == pick_phi && (dg < pick_deg ||
                              (dg == pick_deg && p.verts[v] < p.verts[pick])))) {
        pick = v;
        pick_phi = ph;
        pick_deg = dg;
      }
    }
    for (int v : comp) in[v] = 0;
    std::vector<int> rest;
    rest.reserve(comp.size() - 1);
    for (int v : comp)
      if (v != pick) rest.push_back(v);
    for (auto& sub : components_within(p, rest)) work.push_back(std::move(sub));
  }

  std::vector<Zone> zones;
  for (const auto& comp : accepted) {
    std::vector<int> members;
    members.reserve(comp.size());
    for (int v : comp) members.push_back(p.verts[v]);
    std::sort(members.begin(), members.end());
    if (closure) {
      std::vector<int> closed = closure(members);
      std::sort(closed.begin(), closed.end());
      closed.erase(std::unique(closed.begin(), closed.end()), closed.end());
      if (closed != members) {
        std::vector<int> locals;
        for (int gid : closed) {
          auto it = p.local.find(gid);
          if (it == p.local.end())
            throw validation_error("closure returned a vertex outside the projection");
          locals.push_back(it->second);
        }
        std::sort(locals.begin(), locals.end());
        bool ok = true;
        for (const auto& sub : components_within(p, locals))
          if (!balance_test(p, sub).balanced) {
            ok = false;
            break;
          }
        if (!ok) continue; // closure broke balance, drop the candidate
        members = std::move(closed);
      }
    }
    Zone z;
    z.members = std::move(members);
    zones.push_back(std::move(z));
  }

  // keep only inclusion-maximal member sets (relevant once closures overlap)
  std::vector<char> drop(zones.size(), 0);
  for (size_t i = 0; i < zones.size(); ++i) {
    for (size_t j = 0; j < zones.size() && !drop[i]; ++j) {
      if (i == j || drop[j]) continue;
      const auto &a = zones[i].members, &b = zones[j].members;
      if (a.size() > b.size()) continue;
      if (a.size() == b.size() && !(i > j)) continue; // equal sets: drop later
      if (std::includes(b.begin(), b.end(), a.begin(), a.end())) drop[i] = 1;
    }
  }
  std::vector<Zone> kept;
  for (size_t i = 0; i < zones.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(zones[i]));

  for (Zone& z : kept) {
    double mn = 1.0, sum = 0.0;
    for (int gid : z.members) {
      mn = std::min(mn, phi[gid]);
      sum += phi[gid];
    }
    z.min_phi = z.members.empty() ? 0.0 : mn;
    z.mean_phi = z.members.empty() ? 0.0 : sum / (double)z.members.size();
  }
  std::sort(kept.begin(), kept.end(), [](const Zone& a, const Zone& b) {
    return a.members.front() < b.members.front();
  });
  return kept;
}

double zone_density(const Zone& z, const SignedProjection& p) {
  size_t k = z.members.size();
  if (k < 2) return 0.0;
  std::vector<char> in(p.nv(), 0);
  for (int gid : z.members) in[p.local.at(gid)] = 1;
  int m_z = 0;
  for (int gid : z.members) {
    int v = p.local.at(gid);
    for (const auto& nb : p.adj[v])
      if (in[nb.v] && nb.v > v) ++m_z;
  }
  return 2.0 * (double)m_z / ((double)k * (double)(k - 1));
}

double zone_quality(const Zone& z, const SignedProjection& p) {
  return z.mean_phi * zone_density(z, p);
}

} // namespace bz
