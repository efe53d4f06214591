#include "beliefzones/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "beliefzones/csv.hpp"

namespace bz {

using nlohmann::json;
using nlohmann::ordered_json;

ShockSpec parse_shock(const std::string& json_text, const BeliefGraph& g,
                      const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw validation_error("malformed JSON in " + origin + ": " + e.what());
  }
  if (!root.is_object() || !root.contains("targets") ||
      !root.contains("kappa") || !root.contains("rho_shock"))
    throw validation_error(
        "shock file " + origin +
        " must be an object with 'targets', 'kappa' and 'rho_shock'");
  for (const auto& item : root.items())
    if (item.key() != "targets" && item.key() != "kappa" &&
        item.key() != "rho_shock")
      throw validation_error("unknown key '" + item.key() + "' in " + origin);
  if (!root["targets"].is_object())
    throw validation_error("'targets' must map node ids to strengths in " +
                           origin);
  ShockSpec s;
  if (!root["kappa"].is_number() || !root["rho_shock"].is_number())
    throw validation_error("kappa/rho_shock must be numeric in " + origin);
  s.kappa = root["kappa"].get<double>();
  s.rho_shock = root["rho_shock"].get<double>();
  for (const auto& item : root["targets"].items()) {
    if (!item.value().is_number())
      throw validation_error("non-numeric strength for '" + item.key() +
                             "' in " + origin);
    s.targets.emplace_back(g.node_of(item.key()), item.value().get<double>());
  }
  std::sort(s.targets.begin(), s.targets.end());
  return s;
}

ShockSpec load_shock(const std::string& path, const BeliefGraph& g) {
  return parse_shock(read_file(path), g, path);
}

std::string serialize_shock(const ShockSpec& s, const BeliefGraph& g) {
  ordered_json root;
  ordered_json targets = ordered_json::object();
  std::vector<std::pair<int, double>> sorted = s.targets;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [u, str] : sorted) targets[g.ids[u]] = str;
  root["targets"] = std::move(targets);
  root["kappa"] = s.kappa;
  root["rho_shock"] = s.rho_shock;
  return root.dump();
}

ShockSpec batch_shocks(const std::vector<ShockSpec>& events) {
  if (events.empty()) throw validation_error("empty shock batch");
  ShockSpec out;
  out.kappa = events[0].kappa;
  out.rho_shock = events[0].rho_shock;
  std::map<int, double> acc;
  for (const ShockSpec& e : events) {
    if (e.kappa != out.kappa || e.rho_shock != out.rho_shock)
      throw validation_error("mixed kappa/rho_shock across batched shocks");
    for (const auto& [u, s] : e.targets) acc[u] += s;
  }
  for (const auto& [u, s] : acc) out.targets.emplace_back(u, std::min(1.0, s));
  return out;
}

static void validate_shock(const ShockSpec& spec, const BeliefGraph& g) {
  if (!(spec.kappa >= 0.0 && spec.kappa < 1.0))
    throw validation_error("kappa must lie in [0,1)");
  if (!(spec.rho_shock >= 0.0))
    throw validation_error("rho_shock must be >= 0");
  for (const auto& [u, s] : spec.targets) {
    if (u < 0 || u >= g.n())
      throw validation_error("shock target out of range");
    if (!(s >= 0.0 && s <= 1.0))
      throw validation_error("shock strength must lie in [0,1] at node '" +
                             g.ids[u] + "'");
  }
}

static ConfidenceState passthrough_state(const std::vector<double>& phi,
                                         double r) {
  ConfidenceState st;
  st.phi = phi;
  st.t_star = 0;
  st.converged = true;
  st.r = r;
  return st;
}

ShockResult apply_shock(const BeliefGraph& g, const SignedMatrices& m,
                        const ShockSpec& spec, const PropagationParams& pp,
                        const std::vector<double>* warm) {
  validate_params(pp);
  validate_shock(spec, g);
  double r_pre = contraction_factor(m, pp.alpha, pp.eta, pp.exec);

  double max_s = 0.0;
  for (const auto& [u, s] : spec.targets) max_s = std::max(max_s, s);

  ShockResult out;
  if (max_s <= 0.0) { // identity shock: nothing moves, no gate needed
    out.graph = g;
    out.matrices = m;
    out.state = warm ? passthrough_state(*warm, r_pre)
                     : propagate(g, m, pp, nullptr, r_pre);
    for (const auto& [u, s] : spec.targets) out.applied.emplace_back(u, 0.0);
    out.accepted = true;
    return out;
  }
  if (!(r_pre < 1.0))
    throw validation_error("pre-shock graph is not contractive (r >= 1)");

  std::vector<int> rows;
  for (const auto& [u, s] : spec.targets) rows.push_back(u);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  for (int halving = 0; halving <= kMaxHalvings; ++halving) {
    double scale = std::ldexp(1.0, -halving);
    if (max_s * scale < kMinStrength) break;

    BeliefGraph g2 = g;
    // existing shock-typed contradiction rows, for merging repeat shocks
    std::map<std::pair<int, int>, size_t> shock_edge;
    for (size_t i = 0; i < g2.edges.size(); ++i) {
      const TypedEdge& e = g2.edges[i];
      if (e.type == "shock" && e.sign == -1) shock_edge[{e.src, e.dst}] = i;
    }
    for (const auto& [u, s_raw] : spec.targets) {
      double s = s_raw * scale;
      if (s <= 0.0) continue;
      double factor = 1.0 - spec.kappa * s;
      for (TypedEdge& e : g2.edges)
        if (e.src == u && e.sign > 0) e.weight *= factor;
      double denom = 1.0 + m.supp_row_sum[u]; // pre-shock support mass
      for (const auto& [v, w_pre] : m.supp_raw[u]) {
        double delta = spec.rho_shock * s * w_pre / denom;
        if (delta <= 0.0) continue;
        auto it = shock_edge.find({u, v});
        if (it != shock_edge.end())
          g2.edges[it->second].weight += delta;
        else {
          g2.add_edge(u, v, "shock", -1, delta);
          shock_edge[{u, v}] = g2.edges.size() - 1;
        }
      }
    }
    g2.sort_edges();
    SignedMatrices m2 = m;
    rebuild_rows(m2, g2, rows);
    double r_new = contraction_factor(m2, pp.alpha, pp.eta, pp.exec);
    if (r_new < 1.0) {
      out.graph = std::move(g2);
      out.matrices = std::move(m2);
      out.state = propagate(out.graph, out.matrices, pp, warm, r_new);
      for (const auto& [u, s] : spec.targets)
        out.applied.emplace_back(u, s * scale);
      out.accepted = true;
      out.halvings = halving;
      return out;
    }
  }

  out.graph = g;
  out.matrices = m;
  out.state = warm ? passthrough_state(*warm, r_pre)
                   : propagate(g, m, pp, nullptr, r_pre);
  for (const auto& [u, s] : spec.targets) out.applied.emplace_back(u, 0.0);
  out.accepted = false;
  out.halvings = kMaxHalvings;
  out.reason = "shock rejected: contractivity not recoverable within " +
               std::to_string(kMaxHalvings) + " halvings";
  return out;
}

bool EditDelta::empty() const {
  return add_nodes.empty() && add_edges.empty() && remove_nodes.empty() &&
         remove_edges.empty() && set_psi.empty() && set_weight.empty() &&
         retype.empty();
}

static void validate_kind(const EditDelta& d) {
  auto forbid = [&](bool bad, const char* what) {
    if (bad)
      throw validation_error(std::string("edit payload '") + what +
                             "' not allowed for this edit kind");
  };
  switch (d.kind) {
    case EditKind::expansion:
      forbid(!d.remove_nodes.empty() || !d.remove_edges.empty(), "remove");
      forbid(!d.set_psi.empty() || !d.set_weight.empty() || !d.retype.empty(),
             "update");
      break;
    case EditKind::contraction:
      forbid(!d.add_nodes.empty() || !d.add_edges.empty(), "add");
      forbid(!d.set_psi.empty() || !d.set_weight.empty() || !d.retype.empty(),
             "update");
      break;
    case EditKind::revision:
      forbid(!d.add_nodes.empty() || !d.add_edges.empty(), "add");
      forbid(!d.remove_nodes.empty() || !d.remove_edges.empty(), "remove");
      break;
    case EditKind::credibility_handback:
      forbid(!d.add_nodes.empty() || !d.add_edges.empty(), "add");
      forbid(!d.remove_nodes.empty() || !d.remove_edges.empty(), "remove");
      forbid(!d.set_weight.empty() || !d.retype.empty(), "structural");
      break;
    case EditKind::structural_handback:
      forbid(!d.add_nodes.empty(), "add_nodes");
      forbid(!d.remove_nodes.empty() || !d.remove_edges.empty(), "remove");
      forbid(!d.set_psi.empty(), "set_psi");
      break;
  }
}

// single edge matching a key; ambiguous or missing keys are errors
static size_t find_edge(const BeliefGraph& g, const EdgeKey& k) {
  int src = g.node_of(k.src), dst = g.node_of(k.dst);
  size_t found = g.edges.size();
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const TypedEdge& e = g.edges[i];
    if (e.src == src && e.dst == dst && e.type == k.type) {
      if (found != g.edges.size())
        throw validation_error("ambiguous edge key " + k.src + " -> " + k.dst +
                               " type '" + k.type + "'");
      found = i;
    }
  }
  if (found == g.edges.size())
    throw validation_error("no edge " + k.src + " -> " + k.dst + " type '" +
                           k.type + "'");
  return found;
}

BeliefGraph apply_edit_scaled(const BeliefGraph& g, const EditDelta& d,
                              double gamma) {
  validate_kind(d);
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw validation_error("edit scale must lie in (0,1]");
  bool full = gamma == 1.0;

  std::vector<char> node_removed(g.n(), 0);
  for (const std::string& id : d.remove_nodes) node_removed[g.node_of(id)] = 1;

  std::vector<char> edge_removed(g.edges.size(), 0);
  for (const EdgeKey& k : d.remove_edges) {
    int src = g.node_of(k.src), dst = g.node_of(k.dst);
    bool any = false;
    for (size_t i = 0; i < g.edges.size(); ++i) {
      const TypedEdge& e = g.edges[i];
      if (e.src == src && e.dst == dst && e.type == k.type) {
        edge_removed[i] = 1;
        any = true;
      }
    }
    if (!any)
      throw validation_error("no edge " + k.src + " -> " + k.dst + " type '" +
                             k.type + "' to remove");
  }

  std::vector<double> weight(g.edges.size());
  for (size_t i = 0; i < g.edges.size(); ++i) weight[i] = g.edges[i].weight;
  std::vector<std::pair<std::string, int>> retyped(g.edges.size(),
                                                   {std::string(), 0});
  std::vector<char> has_retype(g.edges.size(), 0);

  for (const WeightSet& ws : d.set_weight) {
    if (!(ws.weight >= 0.0) || !std::isfinite(ws.weight))
      throw validation_error("edge weight must be finite and >= 0");
    size_t i = find_edge(g, ws.key);
    weight[i] = g.edges[i].weight + gamma * (ws.weight - g.edges[i].weight);
  }
  for (const Retype& rt : d.retype) {
    size_t i = find_edge(g, rt.key);
    if (rt.new_sign != -1 && rt.new_sign != 0 && rt.new_sign != 1)
      throw validation_error("unknown sign in retype");
    retyped[i] = {rt.new_type, rt.new_sign};
    has_retype[i] = 1;
  }

  std::vector<double> psi(g.psi);
  for (const PsiSet& ps : d.set_psi) {
    if (!(ps.psi >= 0.0 && ps.psi <= 1.0))
      throw validation_error("psi must lie in [0,1]");
    psi[g.node_of(ps.id)] = ps.psi;
  }

  std::vector<NodeSpec> nodes;
  for (int i = 0; i < g.n(); ++i) {
    if (full && node_removed[i]) continue;
    nodes.push_back(NodeSpec{g.ids[i], psi[i], g.authority[i]});
  }
  for (const NodeAdd& na : d.add_nodes) {
    if (g.index.count(na.id))
      throw validation_error("node '" + na.id + "' already exists");
    nodes.push_back(NodeSpec{na.id, na.psi, na.authority});
  }

  std::vector<EdgeSpec> edges;
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const TypedEdge& e = g.edges[i];
    bool removal = edge_removed[i] || node_removed[e.src] || node_removed[e.dst];
    if (full && removal) continue;
    double w = weight[i];
    if (removal) w = (1.0 - gamma) * g.edges[i].weight; // damped removal
    EdgeSpec es;
    es.src = g.ids[e.src];
    es.dst = g.ids[e.dst];
    es.type = has_retype[i] ? retyped[i].first : e.type;
    es.sign = has_retype[i] ? retyped[i].second : e.sign;
    es.weight = w;
    edges.push_back(std::move(es));
  }
  for (const EdgeAdd& ea : d.add_edges) {
    if (!(ea.weight >= 0.0) || !std::isfinite(ea.weight))
      throw validation_error("edge weight must be finite and >= 0");
    EdgeSpec es;
    es.src = ea.src;
    es.dst = ea.dst;
    es.type = ea.type;
    es.sign = ea.sign;
    es.weight = gamma * ea.weight;
    edges.push_back(std::move(es));
  }

  return build_graph(std::move(nodes), edges);
}

BeliefGraph apply_edit(const BeliefGraph& g, const EditDelta& d) {
  return apply_edit_scaled(g, d, 1.0);
}

// warm-start values carried over by node id; new nodes fall back to b
static std::vector<double> remap_warm(const std::vector<double>& warm,
                                      const BeliefGraph& old_g,
                                      const BeliefGraph& new_g,
                                      const std::vector<double>& fallback) {
  std::vector<double> out(new_g.n());
  for (int i = 0; i < new_g.n(); ++i) {
    auto it = old_g.index.find(new_g.ids[i]);
    out[i] = (it != old_g.index.end()) ? warm[it->second] : fallback[i];
  }
  return out;
}

static std::vector<Zone> remap_zones(const Atlas& prev,
                                     const BeliefGraph& old_g,
                                     const BeliefGraph& new_g) {
  std::vector<Zone> out;
  for (const ScoredZone& s : prev.zones) {
    Zone z;
    for (int v : s.zone.members) {
      auto it = new_g.index.find(old_g.ids[v]);
      if (it != new_g.index.end()) z.members.push_back(it->second);
    }
    std::sort(z.members.begin(), z.members.end());
    if (!z.members.empty()) out.push_back(std::move(z));
  }
  return out;
}

UpdateResult update_and_refresh(const BeliefGraph& g, const SignedMatrices& m,
                                const EditDelta& d, double theta,
                                const GovernanceParams& gp,
                                const PropagationParams& pp, const Atlas& prev,
                                const std::vector<double>* warm) {
  validate_params(pp);
  validate_params(gp);

  UpdateResult out;
  if (d.empty()) { // identity edit: everything passes through
    out.graph = g;
    out.matrices = m;
    double r = contraction_factor(m, pp.alpha, pp.eta, pp.exec);
    out.state = warm ? passthrough_state(*warm, r)
                     : propagate(g, m, pp, nullptr, r);
    out.atlas = prev;
    out.accepted = true;
    return out;
  }
  validate_kind(d);

  for (int halving = 0; halving <= kMaxHalvings; ++halving) {
    double gamma = std::ldexp(1.0, -halving);
    if (gamma < kMinStrength) break;
    BeliefGraph g2 = apply_edit_scaled(g, d, gamma);
    SignedMatrices m2 = build_signed_matrices(g2);
    double r = contraction_factor(m2, pp.alpha, pp.eta, pp.exec);
    if (!(r < 1.0)) continue;

    std::vector<double> b2 = build_prior(g2, m2, pp);
    ConfidenceState st;
    if (warm) {
      std::vector<double> w2 = remap_warm(*warm, g, g2, b2);
      st = propagate_b(b2, m2, authority_clamps(g2), pp, &w2, r);
    } else {
      st = propagate_b(b2, m2, authority_clamps(g2), pp, nullptr, r);
    }

    SignedProjection proj =
        signed_projection(m2, threshold_nodes(st.phi, theta));
    std::vector<Zone> cands = extract_zones(proj, st.phi);
    Atlas prev2;
    prev2.mode = prev.mode;
    for (Zone& z : remap_zones(prev, g, g2)) {
      ScoredZone sz;
      sz.zone = std::move(z);
      prev2.zones.push_back(std::move(sz));
    }
    const SignedProjection* pr =
        (gp.mode == ScoringMode::quality) ? &proj : nullptr;
    out.atlas = atlas_refresh(prev2, cands, st.phi, m2, gp, pr);
    out.graph = std::move(g2);
    out.matrices = std::move(m2);
    out.state = std::move(st);
    out.applied_scale = gamma;
    out.accepted = true;
    out.halvings = halving;
    return out;
  }

  out.graph = g;
  out.matrices = m;
  double r = contraction_factor(m, pp.alpha, pp.eta, pp.exec);
  out.state = warm ? passthrough_state(*warm, r) : propagate(g, m, pp, nullptr, r);
  out.atlas = prev;
  out.applied_scale = 0.0;
  out.accepted = false;
  out.halvings = kMaxHalvings;
  out.reason = "edit rejected: contractivity not recoverable within " +
               std::to_string(kMaxHalvings) + " halvings";
  return out;
}

ReasoningResult run_reasoning(const BeliefGraph& g, const SignedMatrices& m,
                              const Atlas& atlas,
                              const std::vector<double>& phi,
                              Reasoner& reasoner, double theta,
                              const GovernanceParams& gp,
                              const PropagationParams& pp) {
  // zone rank for conflict resolution: higher score, then mass, lower cut-,
  // lexicographic members
  auto zone_beats = [&](int a, int b) {
    const ScoredZone &za = atlas.zones[a], &zb = atlas.zones[b];
    if (za.score != zb.score) return za.score > zb.score;
    if (za.mass != zb.mass) return za.mass > zb.mass;
    if (za.cut_minus != zb.cut_minus) return za.cut_minus < zb.cut_minus;
    return za.zone.members < zb.zone.members;
  };

  std::map<int, std::pair<int, double>> psi_by_node; // node -> (zone, value)
  std::map<std::tuple<int, int, std::string>, std::pair<int, double>> weight_by_key;
  std::map<std::tuple<int, int, std::string>, std::pair<int, EdgeAdd>> add_by_key;

  for (int zi = 0; zi < atlas.size(); ++zi) {
    const Zone& zone = atlas.zones[zi].zone;
    ReasonerProposal prop = reasoner.propose(zone, g, phi);
    std::vector<char> in(g.n(), 0);
    for (int v : zone.members) in[v] = 1;
    auto check = [&](int node) {
      if (node < 0 || node >= g.n() || !in[node])
        throw rejection_error(
            "reasoner proposal for zone " + std::to_string(zi) +
            " references out-of-zone node '" +
            (node >= 0 && node < g.n() ? g.ids[node] : std::to_string(node)) +
            "'");
    };
    for (const auto& [node, value] : prop.psi_updates) {
      check(node);
      auto it = psi_by_node.find(node);
      if (it == psi_by_node.end() || zone_beats(zi, it->second.first))
        psi_by_node[node] = {zi, value};
    }
    for (const auto& es : prop.edge_sets) {
      check(es.src);
      check(es.dst);
      auto key = std::make_tuple(es.src, es.dst, es.type);
      auto it = weight_by_key.find(key);
      if (it == weight_by_key.end() || zone_beats(zi, it->second.first))
        weight_by_key[key] = {zi, es.weight};
    }
    for (const EdgeAdd& ea : prop.edge_adds) {
      check(g.node_of(ea.src));
      check(g.node_of(ea.dst));
      auto key = std::make_tuple(g.node_of(ea.src), g.node_of(ea.dst), ea.type);
      auto it = add_by_key.find(key);
      if (it == add_by_key.end() || zone_beats(zi, it->second.first))
        add_by_key[key] = {zi, ea};
    }
  }

  EditDelta d;
  for (const auto& [node, zv] : psi_by_node)
    d.set_psi.push_back(PsiSet{g.ids[node], zv.second});
  for (const auto& [key, zv] : weight_by_key) {
    WeightSet ws;
    ws.key = EdgeKey{g.ids[std::get<0>(key)], g.ids[std::get<1>(key)],
                     std::get<2>(key)};
    ws.weight = zv.second;
    d.set_weight.push_back(std::move(ws));
  }
  for (const auto& [key, zv] : add_by_key) d.add_edges.push_back(zv.second);
  d.kind = (d.set_weight.empty() && d.add_edges.empty())
               ? EditKind::credibility_handback
               : EditKind::structural_handback;
  if (!d.set_psi.empty() && d.kind == EditKind::structural_handback) {
    // mixed handback: split into two sequential zone-scoped edits
    EditDelta cred;
    cred.kind = EditKind::credibility_handback;
    cred.set_psi = std::move(d.set_psi);
    d.set_psi.clear();
    BeliefGraph g1 = apply_edit(g, cred);
    SignedMatrices m1 = build_signed_matrices(g1);
    UpdateResult ur =
        update_and_refresh(g1, m1, d, theta, gp, pp, atlas, &phi);
    ReasoningResult rr;
    rr.graph = std::move(ur.graph);
    rr.matrices = std::move(ur.matrices);
    rr.state = std::move(ur.state);
    rr.atlas = std::move(ur.atlas);
    rr.changed = true;
    rr.accepted = ur.accepted;
    rr.reason = ur.reason;
    return rr;
  }

  ReasoningResult rr;
  if (d.empty()) {
    rr.graph = g;
    rr.matrices = m;
    rr.state = passthrough_state(
        phi, contraction_factor(m, pp.alpha, pp.eta, pp.exec));
    rr.atlas = atlas;
    rr.changed = false;
    return rr;
  }
  UpdateResult ur = update_and_refresh(g, m, d, theta, gp, pp, atlas, &phi);
  rr.graph = std::move(ur.graph);
  rr.matrices = std::move(ur.matrices);
  rr.state = std::move(ur.state);
  rr.atlas = std::move(ur.atlas);
  rr.changed = true;
  rr.accepted = ur.accepted;
  rr.reason = ur.reason;
  return rr;
}

} // namespace bz
