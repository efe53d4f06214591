#include "beliefzones/matrices.hpp"

#include <algorithm>

namespace bz {

bool SignedMatrices::has_entries() const {
  for (const Row& r : supp_raw)
    if (!r.empty()) return true;
  for (const Row& r : contr_raw)
    if (!r.empty()) return true;
  return false;
}

// edges arrive in canonical (src,dst,type) order; aggregate consecutive
// entries with the same (src,dst) per sign
static void aggregate_row(const BeliefGraph& g, int u, Row& supp, Row& contr,
                          const std::vector<std::pair<size_t, size_t>>& span) {
  supp.clear();
  contr.clear();
  auto [lo, hi] = span[u];
  for (size_t i = lo; i < hi; ++i) {
    const TypedEdge& e = g.edges[i];
    if (e.sign == 0) continue;
    Row& row = (e.sign > 0) ? supp : contr;
    if (!row.empty() && row.back().first == e.dst)
      row.back().second += e.weight;
    else
      row.emplace_back(e.dst, e.weight);
  }
}

static void cap_row(const Row& raw, Row& hat, double& raw_sum) {
  raw_sum = 0.0;
  for (const auto& [c, w] : raw) raw_sum += w;
  double div = std::max(1.0, raw_sum);
  hat = raw;
  for (auto& [c, w] : hat) w /= div;
}

static void rebuild_in_views(SignedMatrices& m) {
  m.supp_in.assign(m.n, {});
  m.contr_in.assign(m.n, {});
  for (int u = 0; u < m.n; ++u) {
    for (const auto& [v, w] : m.supp_hat[u]) m.supp_in[v].emplace_back(u, w);
    for (const auto& [v, w] : m.contr_hat[u]) m.contr_in[v].emplace_back(u, w);
  }
}

// spans of the canonical edge list per source row; assumes sorted edges
static std::vector<std::pair<size_t, size_t>> row_spans(const BeliefGraph& g) {
  std::vector<std::pair<size_t, size_t>> span(g.n(), {0, 0});
  size_t i = 0;
  while (i < g.edges.size()) {
    size_t j = i;
    int u = g.edges[i].src;
    while (j < g.edges.size() && g.edges[j].src == u) ++j;
    span[u] = {i, j};
    i = j;
  }
  return span;
}

SignedMatrices build_signed_matrices(const BeliefGraph& g) {
  SignedMatrices m;
  m.n = g.n();
  m.supp_raw.assign(m.n, {});
  m.contr_raw.assign(m.n, {});
  m.supp_hat.assign(m.n, {});
  m.contr_hat.assign(m.n, {});
  m.supp_row_sum.assign(m.n, 0.0);
  m.contr_row_sum.assign(m.n, 0.0);
  auto span = row_spans(g);
  for (int u = 0; u < m.n; ++u) {
    aggregate_row(g, u, m.supp_raw[u], m.contr_raw[u], span);
    cap_row(m.supp_raw[u], m.supp_hat[u], m.supp_row_sum[u]);
    cap_row(m.contr_raw[u], m.contr_hat[u], m.contr_row_sum[u]);
  }
  rebuild_in_views(m);
  return m;
}

void rebuild_rows(SignedMatrices& m, const BeliefGraph& g,
                  const std::vector<int>& rows) {
  auto span = row_spans(g);
  for (int u : rows) {
    if (u < 0 || u >= m.n) throw validation_error("rebuild_rows: row out of range");
    aggregate_row(g, u, m.supp_raw[u], m.contr_raw[u], span);
    cap_row(m.supp_raw[u], m.supp_hat[u], m.supp_row_sum[u]);
    cap_row(m.contr_raw[u], m.contr_hat[u], m.contr_row_sum[u]);
  }
  rebuild_in_views(m);
}

} // namespace bz
