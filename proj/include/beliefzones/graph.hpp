#pragma once
// Belief graph core: directed, typed, signed, weighted edges over nodes that
// carry an external credibility psi in [0,1] and an optional authority value
// used to pin confidences during propagation.
//
// File format (JSON):
//   {"nodes":[{"id":str,"psi":float,"authority":float|null}],
//    "edges":[{"src":str,"dst":str,"type":str,"sign":-1|0|1,"weight":float}]}
// Canonical serialization sorts nodes by id and edges by (src,dst,type);
// floats are written with shortest round-trip formatting, so save(load(f))
// reproduces weights bit-for-bit.
//
// After load, nodes get dense indices 0..n-1 in sorted id order; the original
// string ids stay in a side table for reporting. Parallel edges are kept as a
// multiset; edges with sign 0 are preserved inertly (they never enter the
// support/contradiction matrices). Self-loops are rejected at load.

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bz {

// input/usage problems: bad files, bad parameters, missing nodes (CLI exit 2)
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// domain rejections: exhausted shock/edit backtracking, isolation breaches
// (CLI exit 3)
struct rejection_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TypedEdge {
  int src = 0;
  int dst = 0;
  std::string type;
  int sign = 0; // +1 support, -1 contradiction, 0 inert
  double weight = 0.0;
};

struct BeliefGraph {
  std::vector<std::string> ids; // dense index -> original id, ascending
  std::vector<double> psi;
  std::vector<std::optional<double>> authority;
  std::vector<TypedEdge> edges; // kept sorted by (src,dst,type)
  std::unordered_map<std::string, int> index;

  int n() const { return (int)ids.size(); }

  // append-only builder; ids must arrive in strictly ascending order so the
  // dense-index invariant holds without a reindex pass
  int add_node(const std::string& id, double psi_v,
               std::optional<double> auth = std::nullopt);
  void add_edge(int src, int dst, const std::string& type, int sign,
                double weight);
  void sort_edges(); // canonical (src id, dst id, type) order, stable

  int node_of(const std::string& id) const; // validation_error if absent
};

// constructs a graph from unordered parts: sorts nodes by id, remaps edges
struct NodeSpec {
  std::string id;
  double psi = 0.0;
  std::optional<double> authority;
};
struct EdgeSpec {
  std::string src, dst, type;
  int sign = 0;
  double weight = 0.0;
};
BeliefGraph build_graph(std::vector<NodeSpec> nodes,
                        const std::vector<EdgeSpec>& edges);

BeliefGraph parse_graph(const std::string& json_text,
                        const std::string& origin = "<memory>");
BeliefGraph load_graph(const std::string& path);
std::string serialize_graph(const BeliefGraph& g);
void save_graph(const BeliefGraph& g, const std::string& path);

} // namespace bz
