// Acceptance gate: eleven end-to-end criteria over the full pipeline, one
// PASS/FAIL line each, nonzero exit when anything fails. Oracles (dense SVD,
// cycle enumeration) live in oracles.hpp and are independent of the library
// code paths they check. Budgets are wall-clock seconds per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "beliefzones/baselines.hpp"
#include "beliefzones/dynamics.hpp"
#include "beliefzones/generators.hpp"
#include "beliefzones/metrics.hpp"
#include "beliefzones/protocols.hpp"
#include "beliefzones/svg.hpp"
#include "oracles.hpp"

using namespace bz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<int> all_nodes(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// 1. contractive grid points reach the same fixed point from all-zeros and
// all-ones starts, within 1e-5 in the max norm
Outcome criterion1() {
  const std::vector<double> alphas = {0.2, 0.4, 0.6, 0.8};
  const std::vector<double> etas = {0.0, 0.5, 1.0};
  int points = 0, bad = 0;
  double worst = 0.0;
  for (int seed = 1; seed <= 50; ++seed) {
    GeneratorConfig c;
    c.family = "g1";
    c.n = 500;
    c.seed = (std::uint64_t)seed;
    BeliefGraph g = gen_g1(c);
    SignedMatrices m = build_signed_matrices(g);
    for (double eta : etas) {
      double sigma = contraction_factor(m, 1.0, eta);
      for (double alpha : alphas) {
        double r = alpha * sigma;
        if (!(r < 1.0)) continue;
        PropagationParams pp;
        pp.alpha = alpha;
        pp.eta = eta;
        std::vector<double> b = build_prior(g, m, pp);
        std::vector<double> zeros(g.n(), 0.0), ones(g.n(), 1.0);
        ConfidenceState lo = propagate_b(b, m, {}, pp, &zeros, r);
        ConfidenceState hi = propagate_b(b, m, {}, pp, &ones, r);
        double diff = 0.0;
        for (int i = 0; i < g.n(); ++i)
          diff = std::max(diff, std::abs(lo.phi[i] - hi.phi[i]));
        worst = std::max(worst, diff);
        ++points;
        if (!lo.converged || !hi.converged || diff > 1e-5) ++bad;
      }
    }
  }
  Outcome o;
  o.pass = bad == 0 && points > 0;
  o.detail = std::to_string(points) + " contractive grid points over 50 graphs, max init gap " +
             fmt(worst) + " (bound 1e-5)";
  return o;
}

// 2. iteration counts stay finite over the (alpha, eta) grid and their means
// rise with alpha, allowing CI overlap
Outcome criterion2() {
  ProtocolConfig cfg = default_config("p1");
  cfg.seeds = 30;
  ProtocolResult res = run_protocol(cfg);
  bool all_finite = true;
  for (const MetricRow& row : res.rows)
    if (!row.converged.value_or(false) ||
        row.t_star.value_or(cfg.prop.t_max) >= cfg.prop.t_max)
      all_finite = false;

  struct Cell {
    double mean = 0.0, ci = 0.0;
  };
  std::map<std::pair<double, double>, Cell> cells; // (eta, alpha)
  for (const SummaryRow& s : res.summary)
    if (s.metric == "t_star" && s.alpha && s.eta)
      cells[{*s.eta, *s.alpha}] = {s.mean, s.ci95};
  bool monotone = true;
  std::string chain;
  for (double eta : cfg.etas) {
    for (size_t i = 0; i + 1 < cfg.alphas.size(); ++i) {
      Cell a = cells.at({eta, cfg.alphas[i]});
      Cell b = cells.at({eta, cfg.alphas[i + 1]});
      if (b.mean + b.ci < a.mean - a.ci) monotone = false;
    }
    chain += " eta=" + fmt(eta) + ":";
    for (double alpha : cfg.alphas)
      chain += " " + fmt(cells.at({eta, alpha}).mean);
  }
  Outcome o;
  o.pass = all_finite && monotone;
  o.detail = std::string(all_finite ? "all runs converged" : "non-finite t*") +
             "; mean t* by alpha" + chain +
             (monotone ? "" : "; monotonicity violated beyond CI overlap");
  return o;
}

// 3. balance_test against exhaustive cycle-sign enumeration
Outcome criterion3() {
  Rng rng(777);
  int comps = 0, unbalanced = 0, disagree = 0, bad_cert = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    int n = 2 + (int)rng.below(11);
    std::vector<NodeSpec> nodes;
    for (int i = 0; i < n; ++i)
      nodes.push_back({node_label(i, n), 0.5, std::nullopt});
    std::vector<EdgeSpec> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.uniform() < 0.3) {
          int sign = rng.uniform() < 0.35 ? -1 : 1;
          edges.push_back({node_label(u, n), node_label(v, n), "t", sign,
                           0.5 + rng.uniform()});
        }
    BeliefGraph g = build_graph(nodes, edges);
    SignedMatrices m = build_signed_matrices(g);
    SignedProjection p = signed_projection(m, all_nodes(n));
    for (const std::vector<int>& comp : components(p)) {
      ++comps;
      BalanceResult br = balance_test(p, comp);
      bool truth = oracle::balanced_by_cycles(p, comp);
      if (br.balanced != truth) {
        ++disagree;
        continue;
      }
      if (br.balanced) {
        if (!oracle::coloring_respects_signs(p, comp, br.side)) ++bad_cert;
      } else {
        ++unbalanced;
        if (cycle_sign_product(p, br.cycle) != -1) ++bad_cert;
      }
    }
  }
  Outcome o;
  o.pass = disagree == 0 && bad_cert == 0;
  o.detail = "1000 projections, " + std::to_string(comps) + " components (" +
             std::to_string(unbalanced) + " unbalanced), " +
             std::to_string(disagree) + " disagreements, " +
             std::to_string(bad_cert) + " bad certificates";
  return o;
}

// 4. clean planted blocks with theta below the weakest in-block confidence
// are recovered exactly
Outcome criterion4() {
  int bad = 0;
  double worst_p = 1.0, worst_r = 1.0;
  for (int seed = 1; seed <= 30; ++seed) {
    GeneratorConfig c;
    c.family = "g2";
    c.n = 2000;
    c.seed = (std::uint64_t)seed;
    c.p_out_pos = 0.0;
    c.p_out_neg = 0.0;
    auto [g, truth] = gen_g2(c);
    SignedMatrices m = build_signed_matrices(g);
    PropagationParams pp; // (0.6, 1.0) defaults
    ConfidenceState st = propagate(g, m, pp);
    double min_phi = 1.0;
    for (const auto& z : truth.zones)
      for (int v : z) min_phi = std::min(min_phi, st.phi[v]);
    if (!(min_phi > 0.0)) {
      ++bad;
      continue;
    }
    double theta = 0.5 * min_phi;
    SignedProjection proj =
        signed_projection(m, threshold_nodes(st.phi, theta));
    std::vector<Zone> zs = extract_zones(proj, st.phi);
    GovernanceParams gp;
    Atlas atlas = atlas_update(zs, st.phi, m, gp);
    FamilyScores fs = family_metrics(atlas_sets(atlas), truth.zones);
    worst_p = std::min(worst_p, fs.precision);
    worst_r = std::min(worst_r, fs.recall);
    if (fs.precision != 1.0 || fs.recall != 1.0) ++bad;
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = "30 seeds, min precision " + fmt(worst_p) + ", min recall " +
             fmt(worst_r) + " (both must be exactly 1)";
  return o;
}

// 5. threshold sweep: unsigned Louvain lands in [0.75, 0.95] zone F1 at its
// best threshold and the method ordering reproduces
Outcome criterion5() {
  ProtocolConfig cfg = default_config("p2");
  cfg.seeds = 30;
  ProtocolResult res = run_protocol(cfg);
  std::map<std::string, double> star_q;
  for (const SummaryRow& s : res.summary)
    if (s.flag == "q_star" && s.q) star_q[s.method] = *s.q;
  auto zone_f1_at_star = [&](const std::string& method) {
    auto it = star_q.find(method);
    if (it == star_q.end())
      throw validation_error("no starred threshold for " + method);
    for (const SummaryRow& s : res.summary)
      if (s.method == method && s.metric == "zone_f1" && s.q &&
          *s.q == it->second)
        return s.mean;
    throw validation_error("no zone_f1 summary for " + method);
  };
  double uc = zone_f1_at_star("unsign_cl");
  double up = zone_f1_at_star("unsign_pro");
  double sg = zone_f1_at_star("signed");
  bool in_band = uc >= 0.75 && uc <= 0.95;
  bool signed_below = sg < uc;
  bool ordering = uc > up && up > sg;
  Outcome o;
  o.pass = in_band && signed_below && ordering;
  o.detail = "zone F1 at best threshold: unsign_cl " + fmt(uc) + " (q=" +
             fmt(star_q["unsign_cl"]) + "), unsign_pro " + fmt(up) +
             ", signed " + fmt(sg) + "; band [0.75,0.95] " +
             (in_band ? "ok" : "violated") + ", ordering " +
             (ordering ? "ok" : "violated");
  return o;
}

// 6. churn under 5% jitter is a proper fraction, exactly zero without
// jitter, and the histogram renders
Outcome criterion6() {
  ProtocolConfig cfg = default_config("p3");
  cfg.seeds = 30;
  ProtocolResult res = run_protocol(cfg);
  std::vector<double> churns;
  bool in_range = true;
  for (const MetricRow& row : res.rows) {
    if (!row.churn) continue;
    churns.push_back(*row.churn);
    if (*row.churn < 0.0 || *row.churn > 1.0) in_range = false;
  }
  double mean = 0.0;
  for (double v : churns) mean += v;
  if (!churns.empty()) mean /= (double)churns.size();

  ProtocolConfig zero = cfg;
  zero.jitter = 0.0;
  ProtocolResult rz = run_protocol(zero);
  bool zero_exact = !rz.rows.empty();
  for (const MetricRow& row : rz.rows)
    if (!row.churn || *row.churn != 0.0) zero_exact = false;

  HistogramPanel panel;
  panel.title = "churn under weight jitter";
  panel.x_label = "churn";
  panel.values = churns;
  panel.lo = 0.0;
  panel.hi = 1.0;
  std::string svg = histogram_svg(panel);
  bool svg_ok = svg.rfind("<svg", 0) == 0 &&
                svg.find("<rect") != std::string::npos &&
                svg.find("</svg>") != std::string::npos;

  Outcome o;
  o.pass = in_range && zero_exact && svg_ok && !churns.empty() && mean >= 0.0 &&
           mean <= 1.0;
  o.detail = "mean churn " + fmt(mean) + " over " +
             std::to_string(churns.size()) + " seeds, zero-jitter churn " +
             (zero_exact ? "exactly 0" : "nonzero") + ", histogram " +
             (svg_ok ? "rendered" : "broken");
  return o;
}

// 7. accepted shocked runs stay contractive; stability is exactly 1 with no
// shock and at least 0.5 at the heaviest shock
Outcome criterion7() {
  ProtocolConfig cfg = default_config("p4");
  cfg.seeds = 30;
  ProtocolResult res = run_protocol(cfg);
  bool all_contractive = true, m0_exact = true;
  std::vector<double> s04;
  int rejected = 0;
  for (const MetricRow& row : res.rows) {
    if (row.flags.find("rejected") != std::string::npos) {
      ++rejected;
      continue;
    }
    if (!row.r || !(*row.r < 1.0)) all_contractive = false;
    if (row.m && *row.m == 0.0) {
      if (!row.stability_v || *row.stability_v != 1.0) m0_exact = false;
    }
    if (row.m && *row.m == 0.4 && row.stability_v)
      s04.push_back(*row.stability_v);
  }
  double mean04 = 0.0;
  for (double v : s04) mean04 += v;
  if (!s04.empty()) mean04 /= (double)s04.size();
  Outcome o;
  o.pass = all_contractive && m0_exact && !s04.empty() && mean04 >= 0.5;
  o.detail = std::string("post-shock r<1 ") +
             (all_contractive ? "on all accepted runs" : "violated") + ", " +
             std::to_string(rejected) + " rejected; S_J(m=0) " +
             (m0_exact ? "exactly 1" : "not 1") + "; mean S_J(m=0.4) " +
             fmt(mean04) + " (needs >= 0.5)";
  return o;
}

// 8. larger priors never lower any fixed-point confidence (eta = 0)
Outcome criterion8() {
  Rng rng(4242);
  int bad = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    GeneratorConfig c;
    c.family = "g1";
    c.n = 100;
    c.d = 3 + rep % 5;
    c.seed = (std::uint64_t)(1000 + rep);
    BeliefGraph g = gen_g1(c);
    SignedMatrices m = build_signed_matrices(g);
    PropagationParams pp;
    pp.alpha = 0.6;
    pp.eta = 0.0;
    std::vector<double> b1(g.n()), b2(g.n());
    for (int i = 0; i < g.n(); ++i) {
      b1[i] = rng.uniform();
      b2[i] = std::min(1.0, b1[i] + 0.5 * rng.uniform());
    }
    ConfidenceState s1 = propagate_b(b1, m, {}, pp);
    ConfidenceState s2 = propagate_b(b2, m, {}, pp);
    for (int i = 0; i < g.n(); ++i) {
      double gap = s1.phi[i] - s2.phi[i];
      worst = std::max(worst, gap);
      if (gap > 1e-9) {
        ++bad;
        break;
      }
    }
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = "200 prior pairs, worst monotonicity violation " + fmt(worst) +
             " (allowed 1e-9)";
  return o;
}

// 9. credibility prior is scale-invariant and propagation leaves weights
// untouched even with the prior blended off
Outcome criterion9() {
  GeneratorConfig c;
  c.family = "g1";
  c.n = 80;
  c.d = 5;
  c.seed = 3;
  BeliefGraph g = gen_g1(c);
  SignedMatrices m = build_signed_matrices(g);
  PropagationParams pp;
  pp.alpha = 0.5;
  pp.eta = 0.5;
  pp.prior = PriorMode::credibility;
  ConfidenceState base = propagate(g, m, pp);
  double worst = 0.0;
  for (double scale : {0.5, 2.0}) {
    BeliefGraph gs = g;
    for (double& p : gs.psi) p *= scale;
    ConfidenceState st = propagate(gs, m, pp);
    for (int i = 0; i < g.n(); ++i)
      worst = std::max(worst, std::abs(st.phi[i] - base.phi[i]));
  }

  PropagationParams off = pp;
  off.lambda = 0.0;
  off.b0 = {0.5};
  std::string before = serialize_graph(g);
  ConfidenceState st = propagate(g, m, off);
  double theta = quantile_threshold(st.phi, 0.75);
  SignedProjection proj = signed_projection(m, threshold_nodes(st.phi, theta));
  std::vector<Zone> zs = extract_zones(proj, st.phi);
  GovernanceParams gp;
  Atlas atlas = atlas_update(zs, st.phi, m, gp, &proj);
  (void)atlas;
  std::string after = serialize_graph(g);

  Outcome o;
  o.pass = worst < 1e-12 && before == after;
  o.detail = "max confidence shift under psi scaling " + fmt(worst) +
             " (allowed 1e-12); weights " +
             (before == after ? "bit-identical" : "drifted") +
             " through a lambda=0 pipeline run";
  return o;
}

// 10. governance is deterministic: update is idempotent, kept zones respect
// the overlap cap, refresh on unchanged inputs is the identity
Outcome criterion10() {
  Rng rng(31337);
  int bad = 0;
  auto same = [](const Atlas& a, const Atlas& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i) {
      if (a.zones[i].zone.members != b.zones[i].zone.members) return false;
      if (a.zones[i].score != b.zones[i].score) return false;
    }
    return true;
  };
  for (int rep = 0; rep < 100; ++rep) {
    GeneratorConfig c;
    c.family = "g1";
    c.n = 12 + (int)rng.below(20);
    c.d = 3;
    c.rho_minus = 0.4;
    c.seed = (std::uint64_t)(rep + 1);
    BeliefGraph g = gen_g1(c);
    SignedMatrices m = build_signed_matrices(g);
    std::vector<double> phi(g.n());
    for (double& v : phi) v = rng.uniform();
    int k = 1 + (int)rng.below(6);
    std::vector<std::vector<int>> sets;
    for (int s = 0; s < k; ++s) {
      std::set<int> members;
      int sz = 1 + (int)rng.below(5);
      while ((int)members.size() < sz)
        members.insert((int)rng.below((std::uint64_t)g.n()));
      sets.emplace_back(members.begin(), members.end());
    }
    std::vector<Zone> cands = zones_from_sets(sets, phi);
    GovernanceParams gp;
    gp.mode = rep % 3 == 0   ? ScoringMode::raw
              : rep % 3 == 1 ? ScoringMode::normalized
                             : ScoringMode::quality;
    if (rep % 4 == 0) gp.k.reset();
    SignedProjection proj = signed_projection(m, all_nodes(g.n()));
    Atlas a1 = atlas_update(cands, phi, m, gp, &proj);
    for (int i = 0; i < a1.size(); ++i)
      for (int j = i + 1; j < a1.size(); ++j)
        if (!(jaccard(a1.zones[i].zone.members, a1.zones[j].zone.members) <
              gp.tau))
          ++bad;
    std::vector<Zone> kept;
    for (const ScoredZone& sz : a1.zones) kept.push_back(sz.zone);
    Atlas a2 = atlas_update(kept, phi, m, gp, &proj);
    if (!same(a1, a2)) ++bad;
    Atlas a3 = atlas_refresh(a1, cands, phi, m, gp, &proj);
    if (!same(a1, a3)) ++bad;
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = "100 random candidate families, " + std::to_string(bad) +
             " determinism violations";
  return o;
}

// 11. the power-iteration norm estimate tracks a dense SVD within 1%
Outcome criterion11() {
  int bad = 0, checked = 0;
  double worst = 0.0;
  const double etas[] = {0.0, 0.5, 1.0};
  for (int rep = 0; rep < 100; ++rep) {
    GeneratorConfig c;
    c.family = "g1";
    c.n = 50;
    c.d = 3 + rep % 6;
    c.rho_minus = 0.2 + 0.05 * (rep % 7);
    c.seed = (std::uint64_t)(rep + 7);
    BeliefGraph g = gen_g1(c);
    SignedMatrices m = build_signed_matrices(g);
    double eta = etas[rep % 3];
    double est = contraction_factor(m, 1.0, eta);
    double exact = oracle::svd_sigma_max(oracle::dense_matrix(m, eta));
    if (exact < 1e-9) {
      if (est > 1e-9) ++bad;
      continue;
    }
    double rel = std::abs(est - exact) / exact;
    worst = std::max(worst, rel);
    ++checked;
    if (rel > 0.01) ++bad;
  }
  Outcome o;
  o.pass = bad == 0 && checked > 0;
  o.detail = std::to_string(checked) + " matrices, worst relative error " +
             fmt(worst) + " (allowed 0.01)";
  return o;
}

} // namespace

int main() {
  using clock_t = std::chrono::steady_clock;
  struct Entry {
    const char* name;
    Outcome (*fn)();
    double budget_s;
  };
  const Entry entries[] = {
      {"unique fixed point on contractive grid points", criterion1, 60},
      {"iteration counts finite and rising with alpha", criterion2, 600},
      {"balance test matches cycle enumeration", criterion3, 60},
      {"exact recovery of clean planted blocks", criterion4, 120},
      {"threshold sweep band and method ordering", criterion5, 1800},
      {"churn bounded, zero without jitter", criterion6, 900},
      {"shock safety and stability floor", criterion7, 900},
      {"confidence monotone in the prior", criterion8, 60},
      {"prior scale invariance, weights untouched", criterion9, 60},
      {"atlas governance deterministic and idempotent", criterion10, 60},
      {"norm estimate within 1% of dense SVD", criterion11, 60},
  };
  int failures = 0;
  int idx = 0;
  for (const Entry& e : entries) {
    ++idx;
    clock_t::time_point t0 = clock_t::now();
    Outcome out;
    try {
      out = e.fn();
    } catch (const std::exception& ex) {
      out.pass = false;
      out.detail = std::string("exception: ") + ex.what();
    }
    double secs =
        std::chrono::duration<double>(clock_t::now() - t0).count();
    bool in_budget = secs < e.budget_s;
    bool pass = out.pass && in_budget;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s: %s [%.1fs%s]\n",
                pass ? "PASS" : "FAIL", idx, e.name, out.detail.c_str(), secs,
                in_budget ? "" : ", over budget");
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
