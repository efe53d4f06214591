// Command line front end: generate / propagate / zones / atlas / shock /
// eval / plot. Exit codes: 0 ok, 2 usage or validation problem, 3 domain
// rejection (lost contractivity, isolation breach). Outputs are written
// atomically after the computation succeeds, so failed runs leave no
// partial files.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beliefzones/baselines.hpp"
#include "beliefzones/csv.hpp"
#include "beliefzones/dynamics.hpp"
#include "beliefzones/generators.hpp"
#include "beliefzones/metrics.hpp"
#include "beliefzones/protocols.hpp"
#include "beliefzones/svg.hpp"

using namespace bz;

namespace {

struct PropFlags {
  double alpha = 0.6, eta = 1.0, epsilon = 1e-6, lambda = 1.0, b0 = -1.0;
  int t_max = 2000;
  std::string prior = "structure";
  bool parallel = false;
};

void add_prop_flags(CLI::App* cmd, PropFlags& pf) {
  cmd->add_option("--alpha", pf.alpha, "damping in (0,1)")
      ->capture_default_str();
  cmd->add_option("--eta", pf.eta, "contradiction penalty >= 0")
      ->capture_default_str();
  cmd->add_option("--epsilon", pf.epsilon, "stop tolerance")
      ->capture_default_str();
  cmd->add_option("--t-max", pf.t_max, "iteration cap")->capture_default_str();
  cmd->add_option("--prior", pf.prior, "prior mode: structure or credibility")
      ->capture_default_str();
  cmd->add_option("--lambda", pf.lambda, "credibility prior blend in [0,1]")
      ->capture_default_str();
  cmd->add_option("--b0", pf.b0, "credibility floor, broadcast to all nodes");
  cmd->add_flag("--parallel", pf.parallel, "use the OpenMP kernels");
}

PropagationParams to_prop(const PropFlags& pf) {
  PropagationParams pp;
  pp.alpha = pf.alpha;
  pp.eta = pf.eta;
  pp.epsilon = pf.epsilon;
  pp.t_max = pf.t_max;
  if (pf.prior == "structure")
    pp.prior = PriorMode::structure;
  else if (pf.prior == "credibility")
    pp.prior = PriorMode::credibility;
  else
    throw validation_error("unknown prior mode '" + pf.prior + "'");
  pp.lambda = pf.lambda;
  if (pf.b0 >= 0.0) pp.b0 = {pf.b0};
  pp.exec = pf.parallel ? ExecPolicy::parallel : ExecPolicy::serial;
  validate_params(pp);
  return pp;
}

struct GovFlags {
  double tau = 0.30;
  int k = 3;
  bool no_cap = false;
  double lambda_gov = 0.0, rho_gov = 0.0;
  std::string scoring = "raw";
  double tau_keep = 0.50, delta_score = 1e-6, delta_mass = 1e-3;
  int hops = 2;
};

void add_gov_flags(CLI::App* cmd, GovFlags& gf) {
  cmd->add_option("--tau", gf.tau, "max pairwise Jaccard among kept zones")
      ->capture_default_str();
  cmd->add_option("--k", gf.k, "atlas size cap")->capture_default_str();
  cmd->add_flag("--no-cap", gf.no_cap, "drop the atlas size cap");
  cmd->add_option("--lambda-gov", gf.lambda_gov,
                  "contradiction outflow penalty")
      ->capture_default_str();
  cmd->add_option("--rho-gov", gf.rho_gov, "support outflow penalty")
      ->capture_default_str();
  cmd->add_option("--scoring", gf.scoring, "raw, normalized or quality")
      ->capture_default_str();
  cmd->add_option("--tau-keep", gf.tau_keep, "hysteresis match threshold")
      ->capture_default_str();
  cmd->add_option("--delta-score", gf.delta_score,
                  "challenger score margin for hysteresis")
      ->capture_default_str();
  cmd->add_option("--delta-mass", gf.delta_mass,
                  "challenger mass margin for hysteresis")
      ->capture_default_str();
  cmd->add_option("--hops", gf.hops, "local refresh ball radius")
      ->capture_default_str();
}

GovernanceParams to_gov(const GovFlags& gf) {
  GovernanceParams gp;
  gp.tau = gf.tau;
  if (gf.no_cap)
    gp.k.reset();
  else
    gp.k = gf.k;
  gp.lambda_gov = gf.lambda_gov;
  gp.rho_gov = gf.rho_gov;
  gp.mode = scoring_mode_from(gf.scoring);
  gp.tau_keep = gf.tau_keep;
  gp.delta_score = gf.delta_score;
  gp.delta_mass = gf.delta_mass;
  gp.hops = gf.hops;
  validate_params(gp);
  return gp;
}

struct CutFlags {
  double q = 0.75;
  double theta = 0.0;
  CLI::Option* theta_opt = nullptr;
};

void add_cut_flags(CLI::App* cmd, CutFlags& cf) {
  CLI::Option* q =
      cmd->add_option("--q", cf.q, "confidence quantile defining theta")
          ->capture_default_str();
  cf.theta_opt =
      cmd->add_option("--theta", cf.theta, "absolute confidence threshold")
          ->excludes(q);
}

double resolve_theta(const CutFlags& cf, const std::vector<double>& phi) {
  if (cf.theta_opt->count()) return cf.theta;
  return quantile_threshold(phi, cf.q);
}

struct GenFlags {
  std::string family = "g1";
  int n = 2000;
  std::uint64_t seed = 1;
  int d = 8;
  double rho_minus = 0.3;
  int k_zones = 3, zone_size = 0;
  double p_in = 0.22, p_out_pos = 0.01, p_out_neg = 0.01;
  int cycles = -1;
  std::string weights = "trunc_normal";
  double w_mu = 1.0, w_sigma = 0.2;
  std::string psi = "uniform";
  double pareto_alpha = 2.5;
};

void add_gen_flags(CLI::App* cmd, GenFlags& gf) {
  cmd->add_option("--family", gf.family, "g1, g2 or g3")
      ->capture_default_str();
  cmd->add_option("--n", gf.n, "node count")->capture_default_str();
  cmd->add_option("--seed", gf.seed, "generator seed")->capture_default_str();
  cmd->add_option("--d", gf.d, "g1/g3 out-degree")->capture_default_str();
  cmd->add_option("--rho-minus", gf.rho_minus, "g1/g3 contradiction share")
      ->capture_default_str();
  cmd->add_option("--k-zones", gf.k_zones, "g2 planted block count")
      ->capture_default_str();
  cmd->add_option("--zone-size", gf.zone_size,
                  "g2 block size, 0 = max(120, n/10)")
      ->capture_default_str();
  cmd->add_option("--p-in", gf.p_in, "g2 in-block support probability")
      ->capture_default_str();
  cmd->add_option("--p-out-pos", gf.p_out_pos,
                  "g2 background support probability")
      ->capture_default_str();
  cmd->add_option("--p-out-neg", gf.p_out_neg,
                  "g2 background contradiction probability")
      ->capture_default_str();
  cmd->add_option("--cycles", gf.cycles,
                  "g3 negative 3-cycles, -1 = max(50, n/20)")
      ->capture_default_str();
  cmd->add_option("--weights", gf.weights, "trunc_normal or log_normal")
      ->capture_default_str();
  cmd->add_option("--w-mu", gf.w_mu, "weight location parameter")
      ->capture_default_str();
  cmd->add_option("--w-sigma", gf.w_sigma, "weight scale parameter")
      ->capture_default_str();
  cmd->add_option("--psi", gf.psi, "credibility draw: uniform or pareto")
      ->capture_default_str();
  cmd->add_option("--pareto-alpha", gf.pareto_alpha, "pareto tail index")
      ->capture_default_str();
}

GeneratorConfig to_gen(const GenFlags& gf) {
  GeneratorConfig c;
  c.family = gf.family;
  c.n = gf.n;
  c.seed = gf.seed;
  c.d = gf.d;
  c.rho_minus = gf.rho_minus;
  c.k_zones = gf.k_zones;
  c.zone_size = gf.zone_size;
  c.p_in = gf.p_in;
  c.p_out_pos = gf.p_out_pos;
  c.p_out_neg = gf.p_out_neg;
  c.cycles = gf.cycles;
  if (gf.weights == "trunc_normal")
    c.weights = WeightDist::trunc_normal;
  else if (gf.weights == "log_normal")
    c.weights = WeightDist::log_normal;
  else
    throw validation_error("unknown weight distribution '" + gf.weights + "'");
  c.w_mu = gf.w_mu;
  c.w_sigma = gf.w_sigma;
  if (gf.psi == "uniform")
    c.psi = PsiDist::uniform;
  else if (gf.psi == "pareto")
    c.psi = PsiDist::pareto;
  else
    throw validation_error("unknown psi distribution '" + gf.psi + "'");
  c.pareto_alpha = gf.pareto_alpha;
  validate_config(c);
  return c;
}

std::string default_truth_path(const std::string& graph_path) {
  const std::string suffix = ".json";
  if (graph_path.size() > suffix.size() &&
      graph_path.compare(graph_path.size() - suffix.size(), suffix.size(),
                         suffix) == 0)
    return graph_path.substr(0, graph_path.size() - suffix.size()) +
           "_truth.json";
  return graph_path + "_truth.json";
}

std::string zones_csv(const BeliefGraph& g, const std::vector<Zone>& zones) {
  std::string out = "zone_id,size,mean_phi,min_phi,members\n";
  for (size_t i = 0; i < zones.size(); ++i) {
    const Zone& z = zones[i];
    out += std::to_string(i) + ',' + std::to_string(z.size()) + ',' +
           fmt_double(z.mean_phi) + ',' + fmt_double(z.min_phi) + ',';
    for (size_t j = 0; j < z.members.size(); ++j) {
      if (j) out += ' ';
      out += g.ids[z.members[j]];
    }
    out += '\n';
  }
  return out;
}

// ---- plot helpers over the emitted CSVs ----

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table load_table(const std::string& path) {
  std::vector<std::vector<std::string>> all = read_csv(path);
  if (all.empty()) throw validation_error(path + " is empty");
  Table t;
  t.header = all.front();
  t.rows.assign(all.begin() + 1, all.end());
  return t;
}

int col(const Table& t, const std::string& name) {
  for (size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return (int)i;
  throw validation_error("column '" + name + "' missing, wrong input CSV?");
}

double num_at(const std::vector<std::string>& row, int idx) {
  if (idx >= (int)row.size() || row[idx].empty())
    return std::numeric_limits<double>::quiet_NaN();
  return std::stod(row[idx]);
}

std::string plot_p1(const Table& t) {
  int c_proto = col(t, "protocol"), c_metric = col(t, "metric");
  int c_alpha = col(t, "alpha"), c_eta = col(t, "eta");
  int c_mean = col(t, "mean"), c_ci = col(t, "ci95");
  std::vector<std::string> alphas, etas;
  for (const auto& row : t.rows) {
    if (row[c_proto] != "p1" || row[c_metric] != "t_star") continue;
    if (std::find(alphas.begin(), alphas.end(), row[c_alpha]) == alphas.end())
      alphas.push_back(row[c_alpha]);
    if (std::find(etas.begin(), etas.end(), row[c_eta]) == etas.end())
      etas.push_back(row[c_eta]);
  }
  if (alphas.empty())
    throw validation_error("no p1 t_star rows, expected the p1 summary CSV");
  BarChart chart;
  chart.title = "iterations to tolerance";
  chart.x_label = "alpha";
  chart.y_label = "mean t_star";
  chart.groups = alphas;
  for (const std::string& eta : etas) {
    BarSeries s;
    s.label = "eta=" + eta;
    s.values.assign(alphas.size(), std::numeric_limits<double>::quiet_NaN());
    s.ci.assign(alphas.size(), 0.0);
    chart.series.push_back(s);
  }
  for (const auto& row : t.rows) {
    if (row[c_proto] != "p1" || row[c_metric] != "t_star") continue;
    size_t g = std::find(alphas.begin(), alphas.end(), row[c_alpha]) -
               alphas.begin();
    size_t s = std::find(etas.begin(), etas.end(), row[c_eta]) - etas.begin();
    chart.series[s].values[g] = num_at(row, c_mean);
    chart.series[s].ci[g] = num_at(row, c_ci);
  }
  return grouped_bar_svg(chart);
}

std::string plot_p2(const Table& t, const std::string& metric) {
  int c_proto = col(t, "protocol"), c_metric = col(t, "metric");
  int c_method = col(t, "method"), c_q = col(t, "q");
  int c_mean = col(t, "mean"), c_ci = col(t, "ci95"), c_flag = col(t, "flag");
  BarChart chart;
  chart.title = metric == "zone_f1" ? "zone-level F1 at the selected threshold"
                                    : "node-level F1 at the selected threshold";
  chart.x_label = "method";
  chart.y_label = "mean " + metric;
  chart.y_min = 0.0;
  chart.y_max = 1.05;
  BarSeries s;
  s.label = metric + " at q*";
  for (const auto& row : t.rows) {
    if (row[c_proto] != "p2" || row[c_metric] != metric) continue;
    if (row[c_flag] != "q_star") continue;
    chart.groups.push_back(row[c_method] + " (q*=" + row[c_q] + ")");
    s.values.push_back(num_at(row, c_mean));
    s.ci.push_back(num_at(row, c_ci));
  }
  if (chart.groups.empty())
    throw validation_error("no q_star rows for " + metric +
                           ", expected the p2 summary CSV");
  chart.series.push_back(std::move(s));
  return grouped_bar_svg(chart);
}

std::string plot_p3(const Table& t) {
  int c_proto = col(t, "protocol");
  int c_churn = col(t, "churn"), c_tau = col(t, "churn_tau");
  HistogramPanel left, right;
  left.title = "membership churn";
  left.x_label = "chi";
  right.title = "zones without a tau match";
  right.x_label = "churn_tau";
  left.bins = right.bins = 20;
  left.lo = right.lo = 0.0;
  left.hi = right.hi = 1.0;
  for (const auto& row : t.rows) {
    if (row[c_proto] != "p3") continue;
    double chi = num_at(row, c_churn);
    double ct = num_at(row, c_tau);
    if (!std::isnan(chi)) left.values.push_back(chi);
    if (!std::isnan(ct)) right.values.push_back(ct);
  }
  if (left.values.empty())
    throw validation_error("no p3 churn rows, expected the p3 results CSV");
  return two_panel_histogram_svg(left, right);
}

std::string plot_p4(const Table& t) {
  int c_proto = col(t, "protocol"), c_metric = col(t, "metric");
  int c_m = col(t, "m"), c_mean = col(t, "mean"), c_ci = col(t, "ci95");
  std::vector<std::string> ms;
  for (const auto& row : t.rows) {
    if (row[c_proto] != "p4" || row[c_metric] != "stability") continue;
    if (std::find(ms.begin(), ms.end(), row[c_m]) == ms.end())
      ms.push_back(row[c_m]);
  }
  if (ms.empty())
    throw validation_error("no p4 stability rows, expected the p4 summary CSV");
  BarChart chart;
  chart.title = "post-shock zone stability";
  chart.x_label = "shock mass m";
  chart.y_label = "mean S_J";
  chart.y_min = 0.0;
  chart.y_max = 1.05;
  chart.groups = ms;
  for (const char* metric : {"stability", "false_collapse_rate"}) {
    BarSeries s;
    s.label = metric;
    s.values.assign(ms.size(), std::numeric_limits<double>::quiet_NaN());
    s.ci.assign(ms.size(), 0.0);
    bool any = false;
    for (const auto& row : t.rows) {
      if (row[c_proto] != "p4" || row[c_metric] != metric) continue;
      size_t g = std::find(ms.begin(), ms.end(), row[c_m]) - ms.begin();
      s.values[g] = num_at(row, c_mean);
      s.ci[g] = num_at(row, c_ci);
      any = true;
    }
    if (any) chart.series.push_back(std::move(s));
  }
  return grouped_bar_svg(chart);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"signed belief graphs: generation, confidence propagation, "
               "zone extraction, atlas governance, shocks, evaluation "
               "protocols and figures"};
  app.require_subcommand(1);

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic graph");
  GenFlags genf;
  add_gen_flags(gen_cmd, genf);
  std::string gen_out, gen_truth_out;
  gen_cmd->add_option("--out", gen_out, "graph JSON path")->required();
  gen_cmd->add_option("--truth-out", gen_truth_out,
                      "g2 truth JSON path (default: <out>_truth.json)");
  gen_cmd->callback([&]() {
    Generated made = generate(to_gen(genf));
    save_graph(made.graph, gen_out);
    std::cout << "graph " << gen_out << "\n";
    if (made.truth) {
      std::string tpath =
          gen_truth_out.empty() ? default_truth_path(gen_out) : gen_truth_out;
      write_file_atomic(tpath, serialize_truth(*made.truth, made.graph));
      std::cout << "truth " << tpath << "\n";
    }
  });

  // propagate
  auto* prop_cmd =
      app.add_subcommand("propagate", "solve the confidence fixed point");
  PropFlags propf;
  add_prop_flags(prop_cmd, propf);
  std::string prop_graph, prop_out;
  prop_cmd->add_option("--graph", prop_graph, "graph JSON path")->required();
  prop_cmd->add_option("--out", prop_out, "confidence CSV path")->required();
  prop_cmd->callback([&]() {
    BeliefGraph g = load_graph(prop_graph);
    SignedMatrices m = build_signed_matrices(g);
    ConfidenceState st = propagate(g, m, to_prop(propf));
    write_file_atomic(prop_out, confidence_csv(g, st));
    std::cout << "r " << fmt_double(st.r) << "\nconverged "
              << (st.converged ? 1 : 0) << "\nt_star " << st.t_star << "\n";
  });

  // zones
  auto* zones_cmd =
      app.add_subcommand("zones", "extract balanced reasoning zones");
  PropFlags zonesf;
  add_prop_flags(zones_cmd, zonesf);
  CutFlags zones_cut;
  add_cut_flags(zones_cmd, zones_cut);
  std::string zones_graph, zones_out, zones_conf_out;
  zones_cmd->add_option("--graph", zones_graph, "graph JSON path")->required();
  zones_cmd->add_option("--out", zones_out, "zones CSV path")->required();
  zones_cmd->add_option("--confidence-out", zones_conf_out,
                        "also write the confidence CSV");
  zones_cmd->callback([&]() {
    BeliefGraph g = load_graph(zones_graph);
    SignedMatrices m = build_signed_matrices(g);
    ConfidenceState st = propagate(g, m, to_prop(zonesf));
    double theta = resolve_theta(zones_cut, st.phi);
    SignedProjection proj = signed_projection(m, threshold_nodes(st.phi, theta));
    std::vector<Zone> zs = extract_zones(proj, st.phi);
    write_file_atomic(zones_out, zones_csv(g, zs));
    if (!zones_conf_out.empty())
      write_file_atomic(zones_conf_out, confidence_csv(g, st));
    std::cout << "theta " << fmt_double(theta) << "\nzones " << zs.size()
              << "\n";
  });

  // atlas
  auto* atlas_cmd =
      app.add_subcommand("atlas", "extract zones and run atlas governance");
  PropFlags atlasf;
  add_prop_flags(atlas_cmd, atlasf);
  CutFlags atlas_cut;
  add_cut_flags(atlas_cmd, atlas_cut);
  GovFlags atlas_gov;
  add_gov_flags(atlas_cmd, atlas_gov);
  std::string atlas_graph, atlas_out, atlas_zones_out;
  atlas_cmd->add_option("--graph", atlas_graph, "graph JSON path")->required();
  atlas_cmd->add_option("--out", atlas_out, "atlas report CSV path")
      ->required();
  atlas_cmd->add_option("--zones-out", atlas_zones_out,
                        "also write the candidate zones CSV");
  atlas_cmd->callback([&]() {
    BeliefGraph g = load_graph(atlas_graph);
    SignedMatrices m = build_signed_matrices(g);
    ConfidenceState st = propagate(g, m, to_prop(atlasf));
    double theta = resolve_theta(atlas_cut, st.phi);
    SignedProjection proj = signed_projection(m, threshold_nodes(st.phi, theta));
    std::vector<Zone> zs = extract_zones(proj, st.phi);
    Atlas atlas = atlas_update(zs, st.phi, m, to_gov(atlas_gov), &proj);
    write_file_atomic(atlas_out, atlas_report_csv(atlas));
    if (!atlas_zones_out.empty())
      write_file_atomic(atlas_zones_out, zones_csv(g, zs));
    std::cout << "theta " << fmt_double(theta) << "\ncandidates " << zs.size()
              << "\nkept " << atlas.size() << "\n";
  });

  // shock
  auto* shock_cmd =
      app.add_subcommand("shock", "apply an external shock and re-solve");
  PropFlags shockf;
  add_prop_flags(shock_cmd, shockf);
  std::string shock_graph, shock_spec, shock_out_graph, shock_out_conf,
      shock_out_log;
  shock_cmd->add_option("--graph", shock_graph, "graph JSON path")->required();
  shock_cmd->add_option("--spec", shock_spec, "shock spec JSON path")
      ->required();
  shock_cmd->add_option("--out-graph", shock_out_graph,
                        "post-shock graph JSON path")
      ->required();
  shock_cmd
      ->add_option("--out-confidence", shock_out_conf,
                   "post-shock confidence CSV path")
      ->required();
  shock_cmd
      ->add_option("--out-log", shock_out_log, "applied strength log path")
      ->required();
  shock_cmd->callback([&]() {
    BeliefGraph g = load_graph(shock_graph);
    SignedMatrices m = build_signed_matrices(g);
    PropagationParams pp = to_prop(shockf);
    ShockSpec spec = load_shock(shock_spec, g);
    ConfidenceState pre = propagate(g, m, pp);
    ShockResult sr = apply_shock(g, m, spec, pp, &pre.phi);
    if (!sr.accepted) throw rejection_error(sr.reason);
    save_graph(sr.graph, shock_out_graph);
    write_file_atomic(shock_out_conf, confidence_csv(sr.graph, sr.state));
    std::string log = "accepted 1\nhalvings " + std::to_string(sr.halvings) +
                      "\n";
    for (const auto& [v, s] : sr.applied)
      log += sr.graph.ids[v] + ' ' + fmt_double(s) + '\n';
    write_file_atomic(shock_out_log, log);
    std::cout << "halvings " << sr.halvings << "\nr "
              << fmt_double(sr.state.r) << "\n";
  });

  // eval
  auto* eval_cmd =
      app.add_subcommand("eval", "run an evaluation protocol over seeds");
  std::string eval_protocol, eval_config, eval_out_dir;
  int eval_seeds = 0, eval_workers = -1, eval_n = 0;
  std::uint64_t eval_seed_base = 0;
  eval_cmd->add_option("protocol", eval_protocol, "p1, p2, p3 or p4");
  eval_cmd->add_option("--config", eval_config, "protocol config JSON path");
  CLI::Option* seeds_opt =
      eval_cmd->add_option("--seeds", eval_seeds, "number of seeds");
  CLI::Option* base_opt =
      eval_cmd->add_option("--seed-base", eval_seed_base, "first seed");
  CLI::Option* workers_opt = eval_cmd->add_option(
      "--workers", eval_workers, "parallel seed workers, 0 = runtime default");
  CLI::Option* n_opt =
      eval_cmd->add_option("--n", eval_n, "override the family node count");
  CLI::Option* out_dir_opt =
      eval_cmd->add_option("--out-dir", eval_out_dir, "output directory");
  eval_cmd->callback([&]() {
    ProtocolConfig cfg;
    if (!eval_config.empty()) {
      cfg = load_protocol_config(eval_config);
      if (!eval_protocol.empty() && eval_protocol != cfg.protocol)
        throw validation_error("protocol argument '" + eval_protocol +
                               "' disagrees with config protocol '" +
                               cfg.protocol + "'");
    } else {
      if (eval_protocol.empty())
        throw validation_error("give a protocol or --config");
      cfg = default_config(eval_protocol);
    }
    if (seeds_opt->count()) cfg.seeds = eval_seeds;
    if (base_opt->count()) cfg.seed_base = eval_seed_base;
    if (workers_opt->count()) cfg.workers = eval_workers;
    if (n_opt->count()) cfg.family.n = eval_n;
    if (out_dir_opt->count()) cfg.out_dir = eval_out_dir;
    ProtocolResult res = run_protocol(cfg);
    write_protocol_result(cfg, res);
    std::cout << "rows " << res.rows.size() << "\nout " << cfg.out_dir << "/"
              << cfg.protocol << "_results.csv\n";
  });

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "render an evaluation figure");
  std::string plot_figure, plot_in, plot_out;
  plot_cmd
      ->add_option("--figure", plot_figure,
                   "p1 | p2-zone | p2-node | p3 | p4 (p3 reads the results "
                   "CSV, the rest read the summary CSV)")
      ->required();
  plot_cmd->add_option("--in", plot_in, "input CSV path")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path")->required();
  plot_cmd->callback([&]() {
    Table t = load_table(plot_in);
    std::string svg;
    if (plot_figure == "p1")
      svg = plot_p1(t);
    else if (plot_figure == "p2-zone")
      svg = plot_p2(t, "zone_f1");
    else if (plot_figure == "p2-node")
      svg = plot_p2(t, "node_f1");
    else if (plot_figure == "p3")
      svg = plot_p3(t);
    else if (plot_figure == "p4")
      svg = plot_p4(t);
    else
      throw validation_error("unknown figure '" + plot_figure + "'");
    write_file_atomic(plot_out, svg);
    std::cout << "figure " << plot_out << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const rejection_error& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 3;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
