#include "beliefzones/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "beliefzones/csv.hpp"

namespace bz {

using nlohmann::json;
using nlohmann::ordered_json;

void validate_config(const GeneratorConfig& c) {
  if (c.family != "g1" && c.family != "g2" && c.family != "g3")
    throw validation_error("unknown graph family '" + c.family + "'");
  if (c.n < 1) throw validation_error("n must be >= 1");
  if (!(c.w_sigma >= 0.0)) throw validation_error("w_sigma must be >= 0");
  if (!(c.pareto_alpha > 0.0))
    throw validation_error("pareto_alpha must be > 0");
  if (c.family == "g1" || c.family == "g3") {
    if (c.d < 0 || c.d >= c.n)
      throw validation_error("out-degree d must satisfy 0 <= d < n");
    if (!(c.rho_minus >= 0.0 && c.rho_minus <= 1.0))
      throw validation_error("rho_minus must lie in [0,1]");
  }
  if (c.family == "g2") {
    if (c.k_zones < 1) throw validation_error("k_zones must be >= 1");
    int s = resolved_zone_size(c);
    if (s < 1) throw validation_error("zone_size must be >= 1");
    if ((long long)c.k_zones * s > c.n)
      throw validation_error("k_zones * zone_size exceeds n");
    for (double p : {c.p_in, c.p_out_pos, c.p_out_neg})
      if (!(p >= 0.0 && p <= 1.0))
        throw validation_error("edge probabilities must lie in [0,1]");
    if (c.p_out_pos + c.p_out_neg > 1.0)
      throw validation_error("p_out_pos + p_out_neg must be <= 1");
  }
  if (c.family == "g3") {
    long long cyc = resolved_cycles(c);
    if (cyc < 0) throw validation_error("cycles must be >= 0");
    if (3 * cyc > c.n)
      throw validation_error("3 * cycles exceeds n (" + std::to_string(cyc) +
                             " cycles, n=" + std::to_string(c.n) + ")");
  }
}

int resolved_zone_size(const GeneratorConfig& c) {
  return c.zone_size > 0 ? c.zone_size : std::max(120, c.n / 10);
}

int resolved_cycles(const GeneratorConfig& c) {
  return c.cycles >= 0 ? c.cycles : std::max(50, c.n / 20);
}

std::string node_label(int i, int n) {
  int width = 1;
  for (int m = n - 1; m >= 10; m /= 10) ++width;
  std::string s = std::to_string(i);
  return std::string(width - (int)s.size(), '0') + s;
}

static double draw_weight(Rng& rng, const GeneratorConfig& c) {
  if (c.weights == WeightDist::trunc_normal)
    return rng.trunc_normal(c.w_mu, c.w_sigma);
  return rng.log_normal(c.w_mu, c.w_sigma);
}

static double draw_psi(Rng& rng, const GeneratorConfig& c) {
  double u = rng.uniform();
  if (c.psi == PsiDist::uniform) return u;
  return 1.0 - std::pow(1.0 - u, 1.0 / c.pareto_alpha);
}

static std::vector<NodeSpec> draw_nodes(Rng& rng, const GeneratorConfig& c) {
  std::vector<NodeSpec> nodes;
  nodes.reserve(c.n);
  for (int i = 0; i < c.n; ++i)
    nodes.push_back(NodeSpec{node_label(i, c.n), draw_psi(rng, c), {}});
  return nodes;
}

static void push_edge(std::vector<EdgeSpec>& out, const GeneratorConfig& c,
                      int u, int v, int sign, double w) {
  EdgeSpec e;
  e.src = node_label(u, c.n);
  e.dst = node_label(v, c.n);
  e.type = sign < 0 ? "contradict" : "support";
  e.sign = sign;
  e.weight = w;
  out.push_back(std::move(e));
}

static void g1_edges(Rng& rng, const GeneratorConfig& c,
                     std::vector<EdgeSpec>& out) {
  std::vector<char> taken(c.n, 0);
  std::vector<int> picked;
  picked.reserve(c.d);
  for (int u = 0; u < c.n; ++u) {
    picked.clear();
    for (int j = 0; j < c.d; ++j) {
      int v;
      do {
        v = (int)rng.below((std::uint64_t)c.n);
      } while (v == u || taken[v]);
      taken[v] = 1;
      picked.push_back(v);
      int sign = rng.uniform() < c.rho_minus ? -1 : 1;
      push_edge(out, c, u, v, sign, draw_weight(rng, c));
    }
    for (int v : picked) taken[v] = 0;
  }
}

BeliefGraph gen_g1(const GeneratorConfig& c) {
  validate_config(c);
  Rng rng(derive_stream(c.seed, kStreamGenerator));
  std::vector<NodeSpec> nodes = draw_nodes(rng, c);
  std::vector<EdgeSpec> edges;
  edges.reserve((size_t)c.n * c.d);
  g1_edges(rng, c, edges);
  return build_graph(std::move(nodes), edges);
}

std::pair<BeliefGraph, GroundTruth> gen_g2(const GeneratorConfig& c) {
  validate_config(c);
  if (c.family != "g2") throw validation_error("gen_g2 needs family g2");
  int s = resolved_zone_size(c);
  Rng rng(derive_stream(c.seed, kStreamGenerator));
  std::vector<NodeSpec> nodes = draw_nodes(rng, c);
  std::vector<EdgeSpec> edges;
  auto block = [&](int v) { return v < c.k_zones * s ? v / s : -1; };
  for (int u = 0; u < c.n; ++u) {
    int bu = block(u);
    for (int v = 0; v < c.n; ++v) {
      if (v == u) continue;
      if (bu >= 0 && block(v) == bu) {
        if (rng.uniform() < c.p_in)
          push_edge(edges, c, u, v, 1, draw_weight(rng, c));
      } else {
        double x = rng.uniform();
        if (x < c.p_out_pos)
          push_edge(edges, c, u, v, 1, draw_weight(rng, c));
        else if (x < c.p_out_pos + c.p_out_neg)
          push_edge(edges, c, u, v, -1, draw_weight(rng, c));
      }
    }
  }
  GroundTruth truth;
  truth.zones.resize(c.k_zones);
  for (int j = 0; j < c.k_zones; ++j)
    for (int i = j * s; i < (j + 1) * s; ++i) truth.zones[j].push_back(i);
  return {build_graph(std::move(nodes), edges), std::move(truth)};
}

BeliefGraph gen_g3(const GeneratorConfig& c) {
  validate_config(c);
  int cyc = resolved_cycles(c);
  Rng rng(derive_stream(c.seed, kStreamGenerator));
  std::vector<NodeSpec> nodes = draw_nodes(rng, c);
  std::vector<EdgeSpec> edges;
  edges.reserve((size_t)c.n * c.d + 3 * (size_t)cyc);
  g1_edges(rng, c, edges);
  std::vector<int> perm(c.n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = c.n - 1; i >= 1; --i)
    std::swap(perm[i], perm[(int)rng.below((std::uint64_t)i + 1)]);
  for (int t = 0; t < cyc; ++t) {
    int a = perm[3 * t], b = perm[3 * t + 1], cth = perm[3 * t + 2];
    push_edge(edges, c, a, b, -1, draw_weight(rng, c));
    push_edge(edges, c, b, cth, -1, draw_weight(rng, c));
    push_edge(edges, c, cth, a, -1, draw_weight(rng, c));
  }
  return build_graph(std::move(nodes), edges);
}

Generated generate(const GeneratorConfig& c) {
  Generated out;
  if (c.family == "g1") {
    out.graph = gen_g1(c);
  } else if (c.family == "g2") {
    auto [g, t] = gen_g2(c);
    out.graph = std::move(g);
    out.truth = std::move(t);
  } else if (c.family == "g3") {
    out.graph = gen_g3(c);
  } else {
    throw validation_error("unknown graph family '" + c.family + "'");
  }
  return out;
}

std::string serialize_truth(const GroundTruth& t, const BeliefGraph& g) {
  std::vector<std::vector<int>> zones = t.zones;
  for (auto& z : zones) std::sort(z.begin(), z.end());
  std::sort(zones.begin(), zones.end());
  ordered_json root;
  root["zones"] = ordered_json::array();
  for (const auto& z : zones) {
    ordered_json members = ordered_json::array();
    for (int v : z) {
      if (v < 0 || v >= g.n())
        throw validation_error("truth zone member out of range");
      members.push_back(g.ids[v]);
    }
    root["zones"].push_back(std::move(members));
  }
  return root.dump();
}

GroundTruth parse_truth(const std::string& json_text, const BeliefGraph& g,
                        const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw validation_error("malformed JSON in " + origin + ": " + e.what());
  }
  if (!root.is_object() || !root.contains("zones") ||
      !root["zones"].is_array())
    throw validation_error("truth file " + origin +
                           " must be an object with a 'zones' array");
  for (const auto& item : root.items())
    if (item.key() != "zones")
      throw validation_error("unknown key '" + item.key() + "' in " + origin);
  GroundTruth t;
  for (const auto& zj : root["zones"]) {
    if (!zj.is_array())
      throw validation_error("each truth zone must be an array in " + origin);
    std::vector<int> z;
    for (const auto& idj : zj) {
      if (!idj.is_string())
        throw validation_error("truth zone members must be node ids in " +
                               origin);
      z.push_back(g.node_of(idj.get<std::string>()));
    }
    std::sort(z.begin(), z.end());
    t.zones.push_back(std::move(z));
  }
  return t;
}

GroundTruth load_truth(const std::string& path, const BeliefGraph& g) {
  return parse_truth(read_file(path), g, path);
}

} // namespace bz
