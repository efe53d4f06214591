#include <random>

#include "beliefzones/generators.hpp"
#include "beliefzones/matrices.hpp"
#include "doctest.h"

using namespace bz;

static BeliefGraph graph_of(const std::vector<EdgeSpec>& edges, int n) {
  std::vector<NodeSpec> nodes;
  for (int i = 0; i < n; ++i)
    nodes.push_back({node_label(i, n), 0.5, std::nullopt});
  return build_graph(nodes, edges);
}

TEST_CASE("aggregation sums per sign and skips inert edges") {
  BeliefGraph g = graph_of({{"0", "1", "t", 1, 2.0},
                            {"0", "1", "u", -1, 1.0},
                            {"0", "1", "v", -1, 2.0},
                            {"0", "2", "w", 0, 5.0}},
                           3);
  SignedMatrices m = build_signed_matrices(g);
  REQUIRE(m.n == 3);
  REQUIRE(m.supp_raw[0].size() == 1);
  CHECK(m.supp_raw[0][0] == std::pair<int, double>{1, 2.0});
  REQUIRE(m.contr_raw[0].size() == 1);
  CHECK(m.contr_raw[0][0] == std::pair<int, double>{1, 3.0});
  CHECK(m.supp_row_sum[0] == 2.0);
  CHECK(m.contr_row_sum[0] == 3.0);
  CHECK(m.supp_raw[2].empty());
}

TEST_CASE("row cap divides by max(1, row sum)") {
  BeliefGraph g = graph_of({{"0", "1", "t", 1, 1.0},
                            {"0", "2", "t", 1, 3.0},
                            {"1", "2", "t", 1, 0.2},
                            {"1", "0", "u", 1, 0.3}},
                           3);
  SignedMatrices m = build_signed_matrices(g);
  // row 0 sums to 4: capped to 0.25 / 0.75
  CHECK(m.supp_hat[0][0].second == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.supp_hat[0][1].second == doctest::Approx(0.75).epsilon(1e-15));
  // row 1 sums to 0.5: untouched
  CHECK(m.supp_hat[1][0].second == 0.3);
  CHECK(m.supp_hat[1][1].second == 0.2);
}

TEST_CASE("transposed views match a manual transpose") {
  GeneratorConfig c;
  c.family = "g1";
  c.n = 60;
  c.d = 5;
  c.seed = 7;
  BeliefGraph g = gen_g1(c);
  SignedMatrices m = build_signed_matrices(g);
  std::vector<std::vector<std::pair<int, double>>> tr(m.n);
  for (int u = 0; u < m.n; ++u)
    for (const auto& [v, w] : m.supp_hat[u]) tr[v].push_back({u, w});
  for (int v = 0; v < m.n; ++v) {
    REQUIRE(m.supp_in[v].size() == tr[v].size());
    for (size_t i = 0; i < tr[v].size(); ++i) {
      CHECK(m.supp_in[v][i].first == tr[v][i].first);
      CHECK(m.supp_in[v][i].second == tr[v][i].second);
    }
  }
}

TEST_CASE("row sums of capped matrices never exceed 1") {
  GeneratorConfig c;
  c.family = "g3";
  c.n = 200;
  c.seed = 3;
  BeliefGraph g = gen_g3(c);
  SignedMatrices m = build_signed_matrices(g);
  for (int u = 0; u < m.n; ++u) {
    double s = 0.0, ct = 0.0;
    for (const auto& [v, w] : m.supp_hat[u]) s += w;
    for (const auto& [v, w] : m.contr_hat[u]) ct += w;
    CHECK(s <= 1.0 + 1e-12);
    CHECK(ct <= 1.0 + 1e-12);
  }
}

TEST_CASE("rebuild_rows only touches the listed rows") {
  GeneratorConfig c;
  c.family = "g1";
  c.n = 80;
  c.d = 4;
  c.seed = 11;
  BeliefGraph g = gen_g1(c);
  SignedMatrices m = build_signed_matrices(g);

  // bump every weight on row 5's out-edges
  BeliefGraph g2 = g;
  for (auto& e : g2.edges)
    if (e.src == 5) e.weight *= 3.0;
  SignedMatrices inc = m;
  rebuild_rows(inc, g2, {5});
  SignedMatrices full = build_signed_matrices(g2);

  REQUIRE(inc.n == full.n);
  for (int u = 0; u < inc.n; ++u) {
    REQUIRE(inc.supp_hat[u].size() == full.supp_hat[u].size());
    for (size_t i = 0; i < inc.supp_hat[u].size(); ++i) {
      CHECK(inc.supp_hat[u][i].first == full.supp_hat[u][i].first);
      CHECK(inc.supp_hat[u][i].second == full.supp_hat[u][i].second);
    }
    REQUIRE(inc.contr_in[u].size() == full.contr_in[u].size());
    for (size_t i = 0; i < inc.supp_in[u].size(); ++i)
      CHECK(inc.supp_in[u][i].second == full.supp_in[u][i].second);
  }
  CHECK(inc.supp_row_sum[5] == full.supp_row_sum[5]);
}

TEST_CASE("empty graph yields empty matrices") {
  BeliefGraph g = parse_graph("{\"nodes\":[],\"edges\":[]}");
  SignedMatrices m = build_signed_matrices(g);
  CHECK(m.n == 0);
  CHECK_FALSE(m.has_entries());
}
