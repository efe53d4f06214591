#include "beliefzones/graph.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "beliefzones/csv.hpp"

namespace bz {

using nlohmann::json;
using nlohmann::ordered_json;

int BeliefGraph::add_node(const std::string& id, double psi_v,
                          std::optional<double> auth) {
  if (id.empty()) throw validation_error("node id must be non-empty");
  if (!ids.empty() && !(ids.back() < id))
    throw validation_error("node ids must be added in ascending order: '" +
                           id + "' after '" + ids.back() + "'");
  if (psi_v < 0.0 || psi_v > 1.0 || !std::isfinite(psi_v))
    throw validation_error("psi out of [0,1] for node '" + id + "'");
  if (auth && (*auth < 0.0 || *auth > 1.0 || !std::isfinite(*auth)))
    throw validation_error("authority out of [0,1] for node '" + id + "'");
  int idx = (int)ids.size();
  ids.push_back(id);
  psi.push_back(psi_v);
  authority.push_back(auth);
  index.emplace(id, idx);
  return idx;
}

void BeliefGraph::add_edge(int src, int dst, const std::string& type, int sign,
                           double weight) {
  if (src < 0 || src >= n() || dst < 0 || dst >= n())
    throw validation_error("edge endpoint out of range");
  if (src == dst)
    throw validation_error("self-loop rejected at node '" + ids[src] + "'");
  if (sign != -1 && sign != 0 && sign != 1)
    throw validation_error("unknown sign " + std::to_string(sign) +
                           " on edge " + ids[src] + " -> " + ids[dst]);
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw validation_error("edge weight must be finite and >= 0 on " +
                           ids[src] + " -> " + ids[dst]);
  edges.push_back(TypedEdge{src, dst, type, sign, weight});
}

void BeliefGraph::sort_edges() {
  std::stable_sort(edges.begin(), edges.end(),
                   [&](const TypedEdge& a, const TypedEdge& b) {
                     if (ids[a.src] != ids[b.src]) return ids[a.src] < ids[b.src];
                     if (ids[a.dst] != ids[b.dst]) return ids[a.dst] < ids[b.dst];
                     return a.type < b.type;
                   });
}

int BeliefGraph::node_of(const std::string& id) const {
  auto it = index.find(id);
  if (it == index.end())
    throw validation_error("unknown node id '" + id + "'");
  return it->second;
}

BeliefGraph build_graph(std::vector<NodeSpec> nodes,
                        const std::vector<EdgeSpec>& edges) {
  std::sort(nodes.begin(), nodes.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
  for (size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i].id == nodes[i - 1].id)
      throw validation_error("duplicate node id '" + nodes[i].id + "'");
  BeliefGraph g;
  for (const auto& nd : nodes) g.add_node(nd.id, nd.psi, nd.authority);
  for (const auto& e : edges)
    g.add_edge(g.node_of(e.src), g.node_of(e.dst), e.type, e.sign, e.weight);
  g.sort_edges();
  return g;
}

static double require_number(const json& j, const char* field,
                             const std::string& ctx) {
  if (!j.contains(field) || !j[field].is_number())
    throw validation_error("missing or non-numeric field '" +
                           std::string(field) + "' in " + ctx);
  return j[field].get<double>();
}

static std::string require_string(const json& j, const char* field,
                                  const std::string& ctx) {
  if (!j.contains(field) || !j[field].is_string())
    throw validation_error("missing or non-string field '" +
                           std::string(field) + "' in " + ctx);
  return j[field].get<std::string>();
}

BeliefGraph parse_graph(const std::string& json_text,
                        const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw validation_error("malformed JSON in " + origin + ": " + e.what());
  }
  if (!root.is_object() || !root.contains("nodes") || !root.contains("edges"))
    throw validation_error("graph file " + origin +
                           " must be an object with 'nodes' and 'edges'");
  for (const auto& item : root.items())
    if (item.key() != "nodes" && item.key() != "edges")
      throw validation_error("unknown key '" + item.key() + "' in " + origin);
  if (!root["nodes"].is_array() || !root["edges"].is_array())
    throw validation_error("'nodes' and 'edges' must be arrays in " + origin);

  std::vector<NodeSpec> nodes;
  for (size_t i = 0; i < root["nodes"].size(); ++i) {
    const json& jn = root["nodes"][i];
    std::string ctx = origin + " nodes[" + std::to_string(i) + "]";
    if (!jn.is_object()) throw validation_error(ctx + " is not an object");
    for (const auto& item : jn.items())
      if (item.key() != "id" && item.key() != "psi" && item.key() != "authority")
        throw validation_error("unknown key '" + item.key() + "' in " + ctx);
    NodeSpec ns;
    ns.id = require_string(jn, "id", ctx);
    ns.psi = require_number(jn, "psi", ctx);
    if (jn.contains("authority") && !jn["authority"].is_null()) {
      if (!jn["authority"].is_number())
        throw validation_error("non-numeric authority in " + ctx);
      ns.authority = jn["authority"].get<double>();
    }
    nodes.push_back(std::move(ns));
  }

  std::vector<EdgeSpec> edges;
  for (size_t i = 0; i < root["edges"].size(); ++i) {
    const json& je = root["edges"][i];
    std::string ctx = origin + " edges[" + std::to_string(i) + "]";
    if (!je.is_object()) throw validation_error(ctx + " is not an object");
    for (const auto& item : je.items())
      if (item.key() != "src" && item.key() != "dst" && item.key() != "type" &&
          item.key() != "sign" && item.key() != "weight")
        throw validation_error("unknown key '" + item.key() + "' in " + ctx);
    EdgeSpec es;
    es.src = require_string(je, "src", ctx);
    es.dst = require_string(je, "dst", ctx);
    es.type = require_string(je, "type", ctx);
    if (!je.contains("sign") || !je["sign"].is_number_integer())
      throw validation_error("missing or non-integer 'sign' in " + ctx);
    es.sign = je["sign"].get<int>();
    es.weight = require_number(je, "weight", ctx);
    edges.push_back(std::move(es));
  }

  try {
    return build_graph(std::move(nodes), edges);
  } catch (const validation_error& e) {
    throw validation_error(origin + ": " + e.what());
  }
}

BeliefGraph load_graph(const std::string& path) {
  return parse_graph(read_file(path), path);
}

std::string serialize_graph(const BeliefGraph& g) {
  ordered_json root;
  root["nodes"] = ordered_json::array();
  for (int i = 0; i < g.n(); ++i) {
    ordered_json jn;
    jn["id"] = g.ids[i];
    jn["psi"] = g.psi[i];
    if (g.authority[i])
      jn["authority"] = *g.authority[i];
    else
      jn["authority"] = nullptr;
    root["nodes"].push_back(std::move(jn));
  }
  std::vector<int> order(g.edges.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const TypedEdge &ea = g.edges[a], &eb = g.edges[b];
    if (g.ids[ea.src] != g.ids[eb.src]) return g.ids[ea.src] < g.ids[eb.src];
    if (g.ids[ea.dst] != g.ids[eb.dst]) return g.ids[ea.dst] < g.ids[eb.dst];
    return ea.type < eb.type;
  });
  root["edges"] = ordered_json::array();
  for (int idx : order) {
    const TypedEdge& e = g.edges[idx];
    ordered_json je;
    je["src"] = g.ids[e.src];
    je["dst"] = g.ids[e.dst];
    je["type"] = e.type;
    je["sign"] = e.sign;
    je["weight"] = e.weight;
    root["edges"].push_back(std::move(je));
  }
  return root.dump();
}

void save_graph(const BeliefGraph& g, const std::string& path) {
  write_file_atomic(path, serialize_graph(g));
}

} // namespace bz
