#pragma once
// Per-sign aggregation of typed edges into sparse support/contradiction
// matrices, plus the row cap used before propagation: each row is divided by
// max(1, row sum), separately per sign, so normalized row sums never exceed 1
// and all-zero rows pass through unchanged.
//
// Rows are indexed by edge source; the transposed views (in-edges) are what
// the propagation gather kernel reads, since a node's update sums normalized
// weights over its incoming edges. Entries are aggregated in canonical edge
// order so matrices are bit-identical under input edge permutations.

#include <utility>
#include <vector>

#include "beliefzones/graph.hpp"

namespace bz {

using Row = std::vector<std::pair<int, double>>; // (col, weight), col ascending

struct SignedMatrices {
  int n = 0;
  std::vector<Row> supp_raw, contr_raw; // aggregated typed edges, uncapped
  std::vector<Row> supp_hat, contr_hat; // row-capped
  std::vector<Row> supp_in, contr_in;   // capped, transposed (in-edges)
  std::vector<double> supp_row_sum, contr_row_sum; // raw row sums

  bool has_entries() const;
};

SignedMatrices build_signed_matrices(const BeliefGraph& g);

// re-aggregates and re-caps only the given source rows, then refreshes the
// transposed views; rows not listed are left untouched (bit-identical)
void rebuild_rows(SignedMatrices& m, const BeliefGraph& g,
                  const std::vector<int>& rows);

} // namespace bz
