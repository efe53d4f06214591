#include "beliefzones/atlas.hpp"

#include <algorithm>
#include <cmath>

#include "beliefzones/csv.hpp"

namespace bz {

std::string scoring_mode_name(ScoringMode m) {
  switch (m) {
    case ScoringMode::raw: return "raw";
    case ScoringMode::normalized: return "normalized";
    case ScoringMode::quality: return "quality";
  }
  return "raw";
}

ScoringMode scoring_mode_from(const std::string& name) {
  if (name == "raw") return ScoringMode::raw;
  if (name == "normalized") return ScoringMode::normalized;
  if (name == "quality") return ScoringMode::quality;
  throw validation_error("unknown scoring mode '" + name + "'");
}

void validate_params(const GovernanceParams& gp) {
  if (!(gp.tau >= 0.0 && gp.tau <= 1.0))
    throw validation_error("tau must lie in [0,1]");
  if (!(gp.tau_keep > 0.0 && gp.tau_keep <= 1.0))
    throw validation_error("tau_keep must lie in (0,1]");
  if (!(gp.tau < gp.tau_keep))
    throw validation_error("tau must be strictly below tau_keep");
  if (gp.k && *gp.k < 0) throw validation_error("k must be >= 0");
  if (gp.lambda_gov < 0.0 || gp.rho_gov < 0.0)
    throw validation_error("governance penalties must be >= 0");
  if (gp.hops < 0) throw validation_error("hops must be >= 0");
  if (!(gp.delta_score >= 0.0) || !(gp.delta_mass >= 0.0))
    throw validation_error("hysteresis margins must be >= 0");
}

std::pair<double, double> boundary_flows(const std::vector<int>& members,
                                         const SignedMatrices& m) {
  std::vector<char> in(m.n, 0);
  for (int v : members) {
    if (v < 0 || v >= m.n) throw validation_error("zone member out of range");
    in[v] = 1;
  }
  double cut_minus = 0.0, loss_plus = 0.0;
  for (int u : members) {
    for (const auto& [v, w] : m.contr_raw[u])
      if (!in[v]) cut_minus += w;
    for (const auto& [v, w] : m.supp_raw[u])
      if (!in[v]) loss_plus += w;
  }
  return {cut_minus, loss_plus};
}

double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() && b.empty())
    throw validation_error("jaccard of two empty sets is undefined");
  size_t i = 0, j = 0, inter = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (b[j] < a[i])
      ++j;
    else {
      ++inter;
      ++i;
      ++j;
    }
  }
  size_t uni = a.size() + b.size() - inter;
  return (double)inter / (double)uni;
}

static ScoredZone score_zone(const Zone& z, const std::vector<double>& phi,
                             const SignedMatrices& m,
                             const GovernanceParams& gp,
                             const SignedProjection* proj) {
  ScoredZone s;
  s.zone = z;
  for (int v : z.members) s.mass += phi[v];
  auto [cm, lp] = boundary_flows(z.members, m);
  s.cut_minus = cm;
  s.loss_plus = lp;
  double sz = (double)z.members.size();
  switch (gp.mode) {
    case ScoringMode::raw:
      s.score = s.mass - gp.lambda_gov * cm - gp.rho_gov * lp;
      break;
    case ScoringMode::normalized:
      s.score = (sz > 0.0)
                    ? s.mass / sz - gp.lambda_gov * cm / sz - gp.rho_gov * lp / sz
                    : 0.0;
      break;
    case ScoringMode::quality: {
      if (!proj)
        throw validation_error("quality scoring requires the projection");
      s.score = zone_quality(z, *proj);
      break;
    }
  }
  return s;
}

// total order used as the base rank: score desc, then mass desc, cut- asc,
// members lexicographic
static bool rank_less(const ScoredZone& a, const ScoredZone& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.mass != b.mass) return a.mass > b.mass;
  if (a.cut_minus != b.cut_minus) return a.cut_minus < b.cut_minus;
  return a.zone.members < b.zone.members;
}

// ties within eps re-break by mass desc, cut- asc, members lexicographic
static bool tie_less(const ScoredZone& a, const ScoredZone& b) {
  if (a.mass != b.mass) return a.mass > b.mass;
  if (a.cut_minus != b.cut_minus) return a.cut_minus < b.cut_minus;
  return a.zone.members < b.zone.members;
}

static void sort_by_policy(std::vector<ScoredZone>& zs, double eps_tie) {
  std::sort(zs.begin(), zs.end(), rank_less);
  // regroup adjacent eps-ties by the tie chain; exact sort first keeps this
  // pass deterministic
  size_t i = 0;
  while (i < zs.size()) {
    size_t j = i + 1;
    while (j < zs.size() && std::abs(zs[j - 1].score - zs[j].score) <= eps_tie)
      ++j;
    if (j - i > 1) std::sort(zs.begin() + i, zs.begin() + j, tie_less);
    i = j;
  }
}

static std::vector<Zone> drop_non_maximal(const std::vector<Zone>& cands) {
  std::vector<char> drop(cands.size(), 0);
  for (size_t i = 0; i < cands.size(); ++i) {
    for (size_t j = 0; j < cands.size() && !drop[i]; ++j) {
      if (i == j || drop[j]) continue;
      const auto &a = cands[i].members, &b = cands[j].members;
      if (a.size() > b.size()) continue;
      if (a == b) {
        if (i > j) drop[i] = 1;
        continue;
      }
      if (std::includes(b.begin(), b.end(), a.begin(), a.end())) drop[i] = 1;
    }
  }
  std::vector<Zone> kept;
  for (size_t i = 0; i < cands.size(); ++i)
    if (!drop[i]) kept.push_back(cands[i]);
  return kept;
}

static Atlas greedy_accept(std::vector<ScoredZone> ranked,
                           const GovernanceParams& gp) {
  Atlas atlas;
  atlas.mode = gp.mode;
  for (ScoredZone& s : ranked) {
    bool ok = true;
    for (const ScoredZone& kept : atlas.zones) {
      if (!(jaccard(s.zone.members, kept.zone.members) < gp.tau)) {
        ok = false;
        break;
      }
    }
    if (ok) atlas.zones.push_back(std::move(s));
  }
  if (gp.k && (int)atlas.zones.size() > *gp.k) atlas.zones.resize(*gp.k);
  return atlas;
}

Atlas atlas_update(const std::vector<Zone>& candidates,
                   const std::vector<double>& phi, const SignedMatrices& m,
                   const GovernanceParams& gp, const SignedProjection* proj) {
  validate_params(gp);
  std::vector<ScoredZone> scored;
  for (const Zone& z : drop_non_maximal(candidates))
    scored.push_back(score_zone(z, phi, m, gp, proj));
  sort_by_policy(scored, gp.eps_tie);
  return greedy_accept(std::move(scored), gp);
}

Atlas atlas_refresh(const Atlas& prev, const std::vector<Zone>& candidates,
                    const std::vector<double>& phi, const SignedMatrices& m,
                    const GovernanceParams& gp, const SignedProjection* proj) {
  validate_params(gp);
  std::vector<ScoredZone> scored;
  std::vector<char> incumbent;
  for (const Zone& z : drop_non_maximal(candidates)) {
    ScoredZone s = score_zone(z, phi, m, gp, proj);
    double best = 0.0;
    for (const ScoredZone& pz : prev.zones)
      best = std::max(best, jaccard(z.members, pz.zone.members));
    scored.push_back(std::move(s));
    incumbent.push_back(best >= gp.tau_keep ? 1 : 0);
  }

  // base rank first, then let incumbents resist marginal challengers: a
  // non-incumbent outranks an incumbent only on a clear score or mass gain.
  // Insertion sort keeps this deterministic without requiring the relation to
  // be a strict weak order.
  std::vector<int> order(scored.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return rank_less(scored[a], scored[b]); });
  auto before = [&](int a, int b) {
    bool ia = incumbent[a], ib = incumbent[b];
    if (ia == ib) {
      if (std::abs(scored[a].score - scored[b].score) <= gp.eps_tie)
        return tie_less(scored[a], scored[b]);
      return rank_less(scored[a], scored[b]);
    }
    const ScoredZone& chall = ia ? scored[b] : scored[a];
    const ScoredZone& inc = ia ? scored[a] : scored[b];
    bool displaces = chall.score > inc.score + gp.delta_score ||
                     chall.mass >= inc.mass + gp.delta_mass;
    if (displaces) {
      if (std::abs(scored[a].score - scored[b].score) <= gp.eps_tie)
        return tie_less(scored[a], scored[b]);
      return rank_less(scored[a], scored[b]);
    }
    return ia; // incumbent first
  };
  for (size_t i = 1; i < order.size(); ++i) {
    int key = order[i];
    size_t j = i;
    while (j > 0 && before(key, order[j - 1])) {
      order[j] = order[j - 1];
      --j;
    }
    order[j] = key;
  }
  std::vector<ScoredZone> ranked;
  ranked.reserve(order.size());
  for (int idx : order) ranked.push_back(std::move(scored[idx]));
  return greedy_accept(std::move(ranked), gp);
}

std::vector<int> local_refresh_region(const std::vector<double>& prev_phi,
                                      const std::vector<double>& new_phi,
                                      double theta,
                                      const SignedProjection& full_proj,
                                      int hops) {
  if (prev_phi.size() != new_phi.size())
    throw validation_error("phi vectors differ in length");
  std::vector<int> crossed;
  for (size_t i = 0; i < prev_phi.size(); ++i)
    if ((prev_phi[i] >= theta) != (new_phi[i] >= theta))
      crossed.push_back((int)i);
  if (crossed.empty()) return {};
  return bfs_ball(full_proj, crossed, hops);
}

Atlas local_refresh(const Atlas& prev, const std::vector<double>& prev_phi,
                    const std::vector<double>& new_phi, double theta,
                    const SignedMatrices& m, const GovernanceParams& gp) {
  validate_params(gp);
  std::vector<int> all(m.n);
  for (int i = 0; i < m.n; ++i) all[i] = i;
  SignedProjection full = signed_projection(m, all);
  std::vector<int> region = local_refresh_region(prev_phi, new_phi, theta,
                                                 full, gp.hops);
  if (region.empty()) return prev;

  std::vector<char> in_region(m.n, 0);
  for (int v : region) in_region[v] = 1;

  std::vector<Zone> candidates;
  for (const ScoredZone& s : prev.zones) {
    bool touched = false;
    for (int v : s.zone.members)
      if (in_region[v]) {
        touched = true;
        break;
      }
    if (!touched) candidates.push_back(s.zone); // carried over
  }
  std::vector<int> kept;
  for (int v : region)
    if (new_phi[v] >= theta) kept.push_back(v);
  SignedProjection local = signed_projection(m, kept);
  for (Zone& z : extract_zones(local, new_phi))
    candidates.push_back(std::move(z));

  const SignedProjection* proj = nullptr;
  SignedProjection theta_proj;
  if (gp.mode == ScoringMode::quality) {
    theta_proj = signed_projection(m, threshold_nodes(new_phi, theta));
    proj = &theta_proj;
  }
  return atlas_refresh(prev, candidates, new_phi, m, gp, proj);
}

std::vector<ZoneReportRow> zone_report(const Atlas& atlas) {
  std::vector<ZoneReportRow> rows;
  for (int i = 0; i < atlas.size(); ++i) {
    const ScoredZone& s = atlas.zones[i];
    ZoneReportRow r;
    r.zone_id = i;
    r.size = s.zone.size();
    r.score = s.score;
    r.scoring_mode = scoring_mode_name(atlas.mode);
    r.mean_phi = s.zone.mean_phi;
    r.min_phi = s.zone.min_phi;
    r.cut_minus = s.cut_minus;
    r.loss_plus = s.loss_plus;
    double nn = 0.0;
    for (int j = 0; j < atlas.size(); ++j)
      if (j != i)
        nn = std::max(nn, jaccard(s.zone.members, atlas.zones[j].zone.members));
    r.nn_jaccard = nn;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string atlas_report_csv(const Atlas& atlas) {
  std::string out =
      "zone_id,size,score,scoring_mode,mean_phi,min_phi,cut_minus,loss_plus,"
      "nn_jaccard\n";
  for (const ZoneReportRow& r : zone_report(atlas)) {
    out += std::to_string(r.zone_id);
    out += ',';
    out += std::to_string(r.size);
    out += ',';
    out += fmt_double(r.score);
    out += ',';
    out += r.scoring_mode;
    out += ',';
    out += fmt_double(r.mean_phi);
    out += ',';
    out += fmt_double(r.min_phi);
    out += ',';
    out += fmt_double(r.cut_minus);
    out += ',';
    out += fmt_double(r.loss_plus);
    out += ',';
    out += fmt_double(r.nn_jaccard);
    out += '\n';
  }
  return out;
}

} // namespace bz
