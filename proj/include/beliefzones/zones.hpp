#pragma once
// Reasoning-zone extraction: structural balance testing by BFS parity
// coloring with an explicit odd-negative-cycle certificate, confidence
// thresholding, and the repair loop that removes certificate vertices until
// every remaining component is balanced.

#include <functional>
#include <vector>

#include "beliefzones/projection.hpp"

namespace bz {

struct Zone {
  std::vector<int> members; // global dense ids, ascending
  double mean_phi = 0.0;
  double min_phi = 0.0;
  int size() const { return (int)members.size(); }
};

struct BalanceResult {
  bool balanced = false;
  std::vector<int> side;  // parity 0/1 per component member (balanced case),
                          // indexed by position in the sorted component
  std::vector<int> cycle; // closed walk as global ids (unbalanced case); the
                          // edge from back() to front() closes the cycle and
                          // the sign product over the walk is -1
};

// comp: local indices into p, sorted; must be connected within p
BalanceResult balance_test(const SignedProjection& p,
                           const std::vector<int>& comp);

// sign product along the closed walk given by global ids (test support)
int cycle_sign_product(const SignedProjection& p, const std::vector<int>& cycle);

// linear-interpolation quantile of the phi values, q in [0,1]
double quantile_threshold(const std::vector<double>& phi, double q);

// nodes with phi >= theta, ascending
std::vector<int> threshold_nodes(const std::vector<double>& phi, double theta);

// optional closure applied to each balanced candidate; if it changes the set
// the closed set is re-checked and dropped when unbalanced. Members are
// global ids and must stay inside the projection.
using ClosureHook = std::function<std::vector<int>(const std::vector<int>&)>;

// extracts maximal balanced zones from the projection (already induced on the
// thresholded vertex set). Unbalanced components repeatedly lose the
// certificate vertex with minimum phi (ties: minimum weighted degree within
// the component, then smallest id); removed vertices never return. Output is
// inclusion-maximal and sorted by smallest member id.
std::vector<Zone> extract_zones(const SignedProjection& p,
                                const std::vector<double>& phi,
                                const ClosureHook& closure = {});

// fraction of realized undirected edges inside the zone; singletons are 0
double zone_density(const Zone& z, const SignedProjection& p);

// mean confidence times density
double zone_quality(const Zone& z, const SignedProjection& p);

} // namespace bz
