#pragma once
// Undirected signed projection over a kept vertex set: for each unordered
// pair, w+ and w- sum the raw aggregated weights in both directions; an edge
// exists iff w+ + w- > 0 and its sign is +1 iff w+ >= w- (ties positive).
// Vertices with no surviving edge stay in the projection as isolated points.

#include <unordered_map>
#include <vector>

#include "beliefzones/matrices.hpp"

namespace bz {

struct SignedProjection {
  // global dense node ids, ascending; all other state is local-indexed
  std::vector<int> verts;
  std::unordered_map<int, int> local; // global -> local

  struct Nbr {
    int v = 0; // local index of the neighbor
    int sign = 0;
    double wpos = 0.0, wneg = 0.0;
  };
  std::vector<std::vector<Nbr>> adj; // per local vertex, neighbor ascending
  std::vector<double> wdeg;          // sum of wpos+wneg over incident edges

  int nv() const { return (int)verts.size(); }
  int edge_count() const;
  bool has_vertex(int global) const { return local.count(global) > 0; }
};

SignedProjection signed_projection(const SignedMatrices& m,
                                   const std::vector<int>& keep);

// connected components as sorted local index lists, ordered by smallest member
std::vector<std::vector<int>> components(const SignedProjection& p);

// components of the subgraph induced on `subset` (local indices)
std::vector<std::vector<int>> components_within(const SignedProjection& p,
                                                const std::vector<int>& subset);

// undirected BFS ball: all vertices within `hops` of `sources` (global ids);
// returns sorted global ids, sources included
std::vector<int> bfs_ball(const SignedProjection& p,
                          const std::vector<int>& sources, int hops);

} // namespace bz
