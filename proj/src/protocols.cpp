#include "beliefzones/protocols.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <unordered_map>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "beliefzones/csv.hpp"

namespace bz {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ProtocolConfig default_config(const std::string& protocol) {
  ProtocolConfig cfg;
  cfg.protocol = protocol;
  cfg.prop.alpha = 0.6;
  cfg.prop.eta = 1.0;
  cfg.prop.prior = PriorMode::structure;
  for (int i = 0; i <= 12; ++i) cfg.q_grid.push_back((30 + 5 * i) / 100.0);
  if (protocol == "p1") {
    cfg.family.family = "g1";
  } else if (protocol == "p2" || protocol == "p3") {
    cfg.family.family = "g2";
  } else if (protocol == "p4") {
    cfg.family.family = "g3";
    // eta=1 leaves the g1/g3 backbone non-contractive at n=2000 (r around
    // 1.1), which the shock gate would reject wholesale; 0.5 keeps a safe
    // margin (r around 0.75) so backtracking has something to work with
    cfg.prop.eta = 0.5;
  } else {
    throw validation_error("unknown protocol '" + protocol + "'");
  }
  return cfg;
}

void validate_protocol_config(const ProtocolConfig& cfg) {
  if (cfg.protocol != "p1" && cfg.protocol != "p2" && cfg.protocol != "p3" &&
      cfg.protocol != "p4")
    throw validation_error("unknown protocol '" + cfg.protocol + "'");
  if (cfg.seeds < 1) throw validation_error("seeds must be >= 1");
  if (cfg.workers < 0) throw validation_error("workers must be >= 0");
  const std::string& fam = cfg.family.family;
  if (cfg.protocol == "p1" && fam != "g1")
    throw validation_error("p1 runs on family g1, got '" + fam + "'");
  if ((cfg.protocol == "p2" || cfg.protocol == "p3") && fam != "g2")
    throw validation_error(cfg.protocol + " runs on family g2, got '" + fam +
                           "'");
  if (cfg.protocol == "p4" && fam != "g3" && fam != "g2")
    throw validation_error("p4 runs on family g3 or g2, got '" + fam + "'");
  validate_config(cfg.family);
  validate_params(cfg.prop);
  validate_params(cfg.gov);
  if (cfg.protocol == "p1") {
    if (cfg.alphas.empty() || cfg.etas.empty())
      throw validation_error("p1 needs nonempty alpha and eta grids");
    for (double a : cfg.alphas)
      if (!(a > 0.0 && a < 1.0))
        throw validation_error("grid alpha must lie in (0,1)");
    for (double e : cfg.etas)
      if (!(e >= 0.0)) throw validation_error("grid eta must be >= 0");
  }
  if (cfg.protocol == "p2") {
    if (cfg.q_grid.empty()) throw validation_error("p2 needs a q grid");
    for (double q : cfg.q_grid)
      if (!(q >= 0.0 && q <= 1.0))
        throw validation_error("quantiles must lie in [0,1]");
  }
  if (cfg.protocol == "p3") {
    if (!(cfg.q3 >= 0.0 && cfg.q3 <= 1.0))
      throw validation_error("p3 quantile must lie in [0,1]");
    if (!(cfg.jitter >= 0.0)) throw validation_error("jitter must be >= 0");
  }
  if (cfg.protocol == "p4") {
    if (!(cfg.q4 >= 0.0 && cfg.q4 <= 1.0))
      throw validation_error("p4 quantile must lie in [0,1]");
    if (cfg.m_grid.empty()) throw validation_error("p4 needs an m grid");
    if (cfg.shock_targets < 1)
      throw validation_error("shock_targets must be >= 1");
    for (double m : cfg.m_grid) {
      if (!(m >= 0.0)) throw validation_error("shock mass must be >= 0");
      if (m / cfg.shock_targets > 1.0)
        throw validation_error("per-node strength m/targets exceeds 1");
    }
    if (!(cfg.kappa >= 0.0 && cfg.kappa < 1.0))
      throw validation_error("kappa must lie in [0,1)");
    if (!(cfg.rho_shock >= 0.0))
      throw validation_error("rho_shock must be >= 0");
  }
}

static const char* weight_dist_name(WeightDist w) {
  return w == WeightDist::trunc_normal ? "trunc_normal" : "log_normal";
}
static const char* psi_dist_name(PsiDist p) {
  return p == PsiDist::uniform ? "uniform" : "pareto";
}
static const char* prior_name(PriorMode p) {
  return p == PriorMode::structure ? "structure" : "credibility";
}

std::string serialize_protocol_config(const ProtocolConfig& cfg) {
  ordered_json root;
  root["protocol"] = cfg.protocol;
  root["seeds"] = cfg.seeds;
  root["seed_base"] = cfg.seed_base;
  root["workers"] = cfg.workers;
  root["out_dir"] = cfg.out_dir;
  ordered_json fam;
  fam["name"] = cfg.family.family;
  fam["n"] = cfg.family.n;
  fam["d"] = cfg.family.d;
  fam["rho_minus"] = cfg.family.rho_minus;
  fam["k_zones"] = cfg.family.k_zones;
  fam["zone_size"] = cfg.family.zone_size;
  fam["p_in"] = cfg.family.p_in;
  fam["p_out_pos"] = cfg.family.p_out_pos;
  fam["p_out_neg"] = cfg.family.p_out_neg;
  fam["cycles"] = cfg.family.cycles;
  fam["weights"] = weight_dist_name(cfg.family.weights);
  fam["w_mu"] = cfg.family.w_mu;
  fam["w_sigma"] = cfg.family.w_sigma;
  fam["psi"] = psi_dist_name(cfg.family.psi);
  fam["pareto_alpha"] = cfg.family.pareto_alpha;
  root["family"] = std::move(fam);
  ordered_json prop;
  prop["alpha"] = cfg.prop.alpha;
  prop["eta"] = cfg.prop.eta;
  prop["epsilon"] = cfg.prop.epsilon;
  prop["t_max"] = cfg.prop.t_max;
  prop["prior"] = prior_name(cfg.prop.prior);
  prop["lambda"] = cfg.prop.lambda;
  if (cfg.prop.b0.size() == 1)
    prop["b0"] = cfg.prop.b0[0];
  else if (!cfg.prop.b0.empty())
    prop["b0"] = cfg.prop.b0;
  root["propagation"] = std::move(prop);
  ordered_json gov;
  gov["tau"] = cfg.gov.tau;
  if (cfg.gov.k)
    gov["k"] = *cfg.gov.k;
  else
    gov["k"] = nullptr;
  gov["lambda_gov"] = cfg.gov.lambda_gov;
  gov["rho_gov"] = cfg.gov.rho_gov;
  gov["scoring"] = scoring_mode_name(cfg.gov.mode);
  gov["tau_keep"] = cfg.gov.tau_keep;
  gov["delta_score"] = cfg.gov.delta_score;
  gov["delta_mass"] = cfg.gov.delta_mass;
  gov["hops"] = cfg.gov.hops;
  root["governance"] = std::move(gov);
  root["p1"] = {{"alphas", cfg.alphas}, {"etas", cfg.etas}};
  root["p2"] = {{"q_grid", cfg.q_grid}};
  root["p3"] = {{"q", cfg.q3}, {"jitter", cfg.jitter}};
  root["p4"] = {{"q", cfg.q4},
                {"m_grid", cfg.m_grid},
                {"targets", cfg.shock_targets},
                {"kappa", cfg.kappa},
                {"rho_shock", cfg.rho_shock}};
  return root.dump();
}

static void reject_unknown(const json& obj, const char* section,
                           std::initializer_list<const char*> known,
                           const std::string& origin) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) ok = true;
    if (!ok)
      throw validation_error("unknown key '" + item.key() + "' in " + section +
                             " section of " + origin);
  }
}

ProtocolConfig parse_protocol_config(const std::string& json_text,
                                     const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw validation_error("malformed JSON in " + origin + ": " + e.what());
  }
  if (!root.is_object())
    throw validation_error("config " + origin + " must be a JSON object");
  std::string proto = "p1";
  if (root.contains("protocol")) {
    if (!root["protocol"].is_string())
      throw validation_error("protocol must be a string in " + origin);
    proto = root["protocol"].get<std::string>();
  }
  ProtocolConfig cfg = default_config(proto);
  reject_unknown(root, "top-level",
                 {"protocol", "seeds", "seed_base", "workers", "out_dir",
                  "family", "propagation", "governance", "p1", "p2", "p3",
                  "p4"},
                 origin);
  if (root.contains("seeds")) cfg.seeds = root["seeds"].get<int>();
  if (root.contains("seed_base"))
    cfg.seed_base = root["seed_base"].get<std::uint64_t>();
  if (root.contains("workers")) cfg.workers = root["workers"].get<int>();
  if (root.contains("out_dir"))
    cfg.out_dir = root["out_dir"].get<std::string>();
  if (root.contains("family")) {
    const json& fam = root["family"];
    reject_unknown(fam, "family",
                   {"name", "n", "d", "rho_minus", "k_zones", "zone_size",
                    "p_in", "p_out_pos", "p_out_neg", "cycles", "weights",
                    "w_mu", "w_sigma", "psi", "pareto_alpha"},
                   origin);
    if (fam.contains("name")) cfg.family.family = fam["name"].get<std::string>();
    if (fam.contains("n")) cfg.family.n = fam["n"].get<int>();
    if (fam.contains("d")) cfg.family.d = fam["d"].get<int>();
    if (fam.contains("rho_minus"))
      cfg.family.rho_minus = fam["rho_minus"].get<double>();
    if (fam.contains("k_zones")) cfg.family.k_zones = fam["k_zones"].get<int>();
    if (fam.contains("zone_size"))
      cfg.family.zone_size = fam["zone_size"].get<int>();
    if (fam.contains("p_in")) cfg.family.p_in = fam["p_in"].get<double>();
    if (fam.contains("p_out_pos"))
      cfg.family.p_out_pos = fam["p_out_pos"].get<double>();
    if (fam.contains("p_out_neg"))
      cfg.family.p_out_neg = fam["p_out_neg"].get<double>();
    if (fam.contains("cycles")) cfg.family.cycles = fam["cycles"].get<int>();
    if (fam.contains("weights")) {
      std::string w = fam["weights"].get<std::string>();
      if (w == "trunc_normal")
        cfg.family.weights = WeightDist::trunc_normal;
      else if (w == "log_normal")
        cfg.family.weights = WeightDist::log_normal;
      else
        throw validation_error("unknown weight distribution '" + w + "' in " +
                               origin);
    }
    if (fam.contains("w_mu")) cfg.family.w_mu = fam["w_mu"].get<double>();
    if (fam.contains("w_sigma"))
      cfg.family.w_sigma = fam["w_sigma"].get<double>();
    if (fam.contains("psi")) {
      std::string p = fam["psi"].get<std::string>();
      if (p == "uniform")
        cfg.family.psi = PsiDist::uniform;
      else if (p == "pareto")
        cfg.family.psi = PsiDist::pareto;
      else
        throw validation_error("unknown psi distribution '" + p + "' in " +
                               origin);
    }
    if (fam.contains("pareto_alpha"))
      cfg.family.pareto_alpha = fam["pareto_alpha"].get<double>();
  }
  if (root.contains("propagation")) {
    const json& prop = root["propagation"];
    reject_unknown(prop, "propagation",
                   {"alpha", "eta", "epsilon", "t_max", "prior", "lambda",
                    "b0"},
                   origin);
    if (prop.contains("alpha")) cfg.prop.alpha = prop["alpha"].get<double>();
    if (prop.contains("eta")) cfg.prop.eta = prop["eta"].get<double>();
    if (prop.contains("epsilon"))
      cfg.prop.epsilon = prop["epsilon"].get<double>();
    if (prop.contains("t_max")) cfg.prop.t_max = prop["t_max"].get<int>();
    if (prop.contains("prior")) {
      std::string p = prop["prior"].get<std::string>();
      if (p == "structure")
        cfg.prop.prior = PriorMode::structure;
      else if (p == "credibility")
        cfg.prop.prior = PriorMode::credibility;
      else
        throw validation_error("unknown prior mode '" + p + "' in " + origin);
    }
    if (prop.contains("lambda")) cfg.prop.lambda = prop["lambda"].get<double>();
    if (prop.contains("b0")) {
      if (prop["b0"].is_array())
        cfg.prop.b0 = prop["b0"].get<std::vector<double>>();
      else
        cfg.prop.b0 = {prop["b0"].get<double>()}; // broadcast scalar floor
    }
  }
  if (root.contains("governance")) {
    const json& gov = root["governance"];
    reject_unknown(gov, "governance",
                   {"tau", "k", "lambda_gov", "rho_gov", "scoring", "tau_keep",
                    "delta_score", "delta_mass", "hops"},
                   origin);
    if (gov.contains("tau")) cfg.gov.tau = gov["tau"].get<double>();
    if (gov.contains("k")) {
      if (gov["k"].is_null())
        cfg.gov.k.reset();
      else
        cfg.gov.k = gov["k"].get<int>();
    }
    if (gov.contains("lambda_gov"))
      cfg.gov.lambda_gov = gov["lambda_gov"].get<double>();
    if (gov.contains("rho_gov")) cfg.gov.rho_gov = gov["rho_gov"].get<double>();
    if (gov.contains("scoring"))
      cfg.gov.mode = scoring_mode_from(gov["scoring"].get<std::string>());
    if (gov.contains("tau_keep"))
      cfg.gov.tau_keep = gov["tau_keep"].get<double>();
    if (gov.contains("delta_score"))
      cfg.gov.delta_score = gov["delta_score"].get<double>();
    if (gov.contains("delta_mass"))
      cfg.gov.delta_mass = gov["delta_mass"].get<double>();
    if (gov.contains("hops")) cfg.gov.hops = gov["hops"].get<int>();
  }
  if (root.contains("p1")) {
    reject_unknown(root["p1"], "p1", {"alphas", "etas"}, origin);
    if (root["p1"].contains("alphas"))
      cfg.alphas = root["p1"]["alphas"].get<std::vector<double>>();
    if (root["p1"].contains("etas"))
      cfg.etas = root["p1"]["etas"].get<std::vector<double>>();
  }
  if (root.contains("p2")) {
    reject_unknown(root["p2"], "p2", {"q_grid"}, origin);
    if (root["p2"].contains("q_grid"))
      cfg.q_grid = root["p2"]["q_grid"].get<std::vector<double>>();
  }
  if (root.contains("p3")) {
    reject_unknown(root["p3"], "p3", {"q", "jitter"}, origin);
    if (root["p3"].contains("q")) cfg.q3 = root["p3"]["q"].get<double>();
    if (root["p3"].contains("jitter"))
      cfg.jitter = root["p3"]["jitter"].get<double>();
  }
  if (root.contains("p4")) {
    reject_unknown(root["p4"], "p4",
                   {"q", "m_grid", "targets", "kappa", "rho_shock"}, origin);
    if (root["p4"].contains("q")) cfg.q4 = root["p4"]["q"].get<double>();
    if (root["p4"].contains("m_grid"))
      cfg.m_grid = root["p4"]["m_grid"].get<std::vector<double>>();
    if (root["p4"].contains("targets"))
      cfg.shock_targets = root["p4"]["targets"].get<int>();
    if (root["p4"].contains("kappa"))
      cfg.kappa = root["p4"]["kappa"].get<double>();
    if (root["p4"].contains("rho_shock"))
      cfg.rho_shock = root["p4"]["rho_shock"].get<double>();
  }
  validate_protocol_config(cfg);
  return cfg;
}

ProtocolConfig load_protocol_config(const std::string& path) {
  return parse_protocol_config(read_file(path), path);
}

static std::string fmt_oint(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}
static std::string fmt_obool(const std::optional<bool>& v) {
  return v ? (*v ? "1" : "0") : std::string();
}

std::string metric_csv_header() {
  return "protocol,seed,method,alpha,eta,q,m,theta,r,t_star,converged,"
         "wall_clock_ms,atlas_size,coverage,mean_jaccard,zone_precision,"
         "zone_recall,zone_f1,node_precision,node_recall,node_f1,"
         "match_mean_jaccard,churn,churn_tau,stability,false_collapse_rate,"
         "flags";
}

std::string metric_csv_row(const MetricRow& row) {
  std::string s;
  s += row.protocol;
  s += ',' + std::to_string(row.seed);
  s += ',' + row.method;
  s += ',' + fmt_opt(row.alpha);
  s += ',' + fmt_opt(row.eta);
  s += ',' + fmt_opt(row.q);
  s += ',' + fmt_opt(row.m);
  s += ',' + fmt_opt(row.theta);
  s += ',' + fmt_opt(row.r);
  s += ',' + fmt_oint(row.t_star);
  s += ',' + fmt_obool(row.converged);
  s += ',' + fmt_double(row.wall_clock_ms);
  s += ',' + fmt_oint(row.atlas_size);
  s += ',' + fmt_opt(row.coverage);
  s += ',' + fmt_opt(row.mean_jaccard);
  s += ',' + fmt_opt(row.zone_precision);
  s += ',' + fmt_opt(row.zone_recall);
  s += ',' + fmt_opt(row.zone_f1);
  s += ',' + fmt_opt(row.node_precision);
  s += ',' + fmt_opt(row.node_recall);
  s += ',' + fmt_opt(row.node_f1);
  s += ',' + fmt_opt(row.match_mean_jaccard);
  s += ',' + fmt_opt(row.churn);
  s += ',' + fmt_opt(row.churn_tau_v);
  s += ',' + fmt_opt(row.stability_v);
  s += ',' + fmt_opt(row.false_collapse);
  s += ',' + row.flags;
  return s;
}

std::string summary_csv_header() {
  return "protocol,method,alpha,eta,q,m,metric,mean,ci95,n_seeds,flag";
}

std::string summary_csv_row(const SummaryRow& row) {
  std::string s;
  s += row.protocol;
  s += ',' + row.method;
  s += ',' + fmt_opt(row.alpha);
  s += ',' + fmt_opt(row.eta);
  s += ',' + fmt_opt(row.q);
  s += ',' + fmt_opt(row.m);
  s += ',' + row.metric;
  s += ',' + fmt_double(row.mean);
  s += ',' + fmt_double(row.ci95);
  s += ',' + std::to_string(row.n_seeds);
  s += ',' + row.flag;
  return s;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string s;
  for (const auto& f : flags) {
    if (!s.empty()) s += ';';
    s += f;
  }
  return s;
}

struct PipeOut {
  Atlas atlas;
  std::vector<std::vector<int>> sets;
  int v_theta = 0;
};

PipeOut signed_pipeline(const SignedMatrices& m, const std::vector<double>& phi,
                        double theta, const GovernanceParams& gov) {
  PipeOut out;
  std::vector<int> keep = threshold_nodes(phi, theta);
  out.v_theta = (int)keep.size();
  SignedProjection proj = signed_projection(m, keep);
  std::vector<Zone> zones = extract_zones(proj, phi);
  out.atlas = atlas_update(zones, phi, m, gov, &proj);
  out.sets = atlas_sets(out.atlas);
  return out;
}

void fill_atlas_stats(MetricRow& row, const PipeOut& pipe) {
  row.atlas_size = (int)pipe.sets.size();
  row.coverage = coverage(pipe.sets, pipe.v_theta);
  row.mean_jaccard = mean_pairwise_jaccard(pipe.sets);
}

void fill_truth_metrics(MetricRow& row,
                        const std::vector<std::vector<int>>& sets,
                        const std::vector<std::vector<int>>& truth,
                        std::vector<std::string>& flags) {
  FamilyScores zone = family_metrics(sets, truth);
  FamilyScores node = node_metrics(sets, truth);
  MatchResult match = hungarian_match(sets, truth);
  row.zone_precision = zone.precision;
  row.zone_recall = zone.recall;
  row.zone_f1 = zone.f1;
  row.node_precision = node.precision;
  row.node_recall = node.recall;
  row.node_f1 = node.f1;
  row.match_mean_jaccard = match.mean_jaccard;
  if (zone.undefined_precision) flags.push_back("undefined_precision");
}

MetricRow base_row(const ProtocolConfig& cfg, std::uint64_t seed,
                   const std::string& method) {
  MetricRow row;
  row.protocol = cfg.protocol;
  row.seed = seed;
  row.method = method;
  return row;
}

std::vector<MetricRow> p1_seed(const ProtocolConfig& cfg, std::uint64_t seed) {
  GeneratorConfig gc = cfg.family;
  gc.seed = seed;
  BeliefGraph g = gen_g1(gc);
  SignedMatrices m = build_signed_matrices(g);
  std::vector<MetricRow> rows;
  for (double alpha : cfg.alphas)
    for (double eta : cfg.etas) {
      auto t0 = std::chrono::steady_clock::now();
      PropagationParams pp = cfg.prop;
      pp.alpha = alpha;
      pp.eta = eta;
      double r = contraction_factor(m, alpha, eta, pp.exec);
      ConfidenceState st = propagate(g, m, pp, nullptr, r);
      MetricRow row = base_row(cfg, seed, "signed");
      row.alpha = alpha;
      row.eta = eta;
      row.r = r;
      row.t_star = st.t_star;
      row.converged = st.converged;
      row.wall_clock_ms = ms_since(t0);
      rows.push_back(std::move(row));
    }
  return rows;
}

std::vector<MetricRow> p2_seed(const ProtocolConfig& cfg, std::uint64_t seed) {
  GeneratorConfig gc = cfg.family;
  gc.seed = seed;
  auto [g, truth] = gen_g2(gc);
  SignedMatrices m = build_signed_matrices(g);
  ConfidenceState st = propagate(g, m, cfg.prop);
  SignedMatrices um = unsigned_view(m);
  ConfidenceState st_u = baseline_unsign_pro(g, um, cfg.prop);
  std::vector<MetricRow> rows;
  for (double q : cfg.q_grid) {
    { // signed pipeline
      auto t0 = std::chrono::steady_clock::now();
      double theta = quantile_threshold(st.phi, q);
      PipeOut pipe = signed_pipeline(m, st.phi, theta, cfg.gov);
      MetricRow row = base_row(cfg, seed, "signed");
      std::vector<std::string> flags;
      row.alpha = cfg.prop.alpha;
      row.eta = cfg.prop.eta;
      row.q = q;
      row.theta = theta;
      row.r = st.r;
      row.t_star = st.t_star;
      row.converged = st.converged;
      fill_atlas_stats(row, pipe);
      fill_truth_metrics(row, pipe.sets, truth.zones, flags);
      row.wall_clock_ms = ms_since(t0);
      row.flags = join_flags(flags);
      rows.push_back(std::move(row));
    }
    { // Louvain communities at the signed theta
      auto t0 = std::chrono::steady_clock::now();
      double theta = quantile_threshold(st.phi, q);
      Atlas atlas = baseline_unsign_cl(m, st.phi, theta, cfg.gov);
      PipeOut pipe;
      pipe.atlas = std::move(atlas);
      pipe.sets = atlas_sets(pipe.atlas);
      pipe.v_theta = (int)threshold_nodes(st.phi, theta).size();
      MetricRow row = base_row(cfg, seed, "unsign_cl");
      std::vector<std::string> flags;
      row.q = q;
      row.theta = theta;
      fill_atlas_stats(row, pipe);
      fill_truth_metrics(row, pipe.sets, truth.zones, flags);
      row.wall_clock_ms = ms_since(t0);
      row.flags = join_flags(flags);
      rows.push_back(std::move(row));
    }
    { // unsigned propagation with its own threshold
      auto t0 = std::chrono::steady_clock::now();
      double theta = quantile_threshold(st_u.phi, q);
      PipeOut pipe = signed_pipeline(um, st_u.phi, theta, cfg.gov);
      MetricRow row = base_row(cfg, seed, "unsign_pro");
      std::vector<std::string> flags;
      row.alpha = cfg.prop.alpha;
      row.eta = 0.0;
      row.q = q;
      row.theta = theta;
      row.r = st_u.r;
      row.t_star = st_u.t_star;
      row.converged = st_u.converged;
      fill_atlas_stats(row, pipe);
      fill_truth_metrics(row, pipe.sets, truth.zones, flags);
      row.wall_clock_ms = ms_since(t0);
      row.flags = join_flags(flags);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<MetricRow> p3_seed(const ProtocolConfig& cfg, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  GeneratorConfig gc = cfg.family;
  gc.seed = seed;
  auto [g, truth] = gen_g2(gc);
  SignedMatrices m = build_signed_matrices(g);
  ConfidenceState st_pre = propagate(g, m, cfg.prop);
  double theta_pre = quantile_threshold(st_pre.phi, cfg.q3);
  PipeOut pre = signed_pipeline(m, st_pre.phi, theta_pre, cfg.gov);

  BeliefGraph gj = g;
  Rng jr(derive_stream(seed, kStreamJitter));
  for (TypedEdge& e : gj.edges)
    e.weight = std::max(0.0, e.weight * (1.0 + cfg.jitter * jr.normal()));
  SignedMatrices mj = build_signed_matrices(gj);
  ConfidenceState st_post = propagate(gj, mj, cfg.prop);
  double theta_post = quantile_threshold(st_post.phi, cfg.q3);
  PipeOut post = signed_pipeline(mj, st_post.phi, theta_post, cfg.gov);

  MetricRow row = base_row(cfg, seed, "signed");
  std::vector<std::string> flags;
  row.alpha = cfg.prop.alpha;
  row.eta = cfg.prop.eta;
  row.q = cfg.q3;
  row.theta = theta_post;
  row.r = st_post.r;
  row.t_star = st_post.t_star;
  row.converged = st_post.converged;
  fill_atlas_stats(row, post);
  if (pre.sets.empty()) {
    flags.push_back("empty_pre_atlas");
  } else {
    row.churn = churn(pre.sets, post.sets);
    row.churn_tau_v = churn_tau(pre.sets, post.sets, cfg.gov.tau);
    row.stability_v = stability(pre.sets, post.sets);
  }
  row.wall_clock_ms = ms_since(t0);
  row.flags = join_flags(flags);
  return {row};
}

std::vector<MetricRow> p4_seed(const ProtocolConfig& cfg, std::uint64_t seed,
                               std::string& log_chunk) {
  GeneratorConfig gc = cfg.family;
  gc.seed = seed;
  Generated gen = generate(gc);
  const BeliefGraph& g = gen.graph;
  SignedMatrices m = build_signed_matrices(g);
  ConfidenceState st0 = propagate(g, m, cfg.prop);
  double theta = quantile_threshold(st0.phi, cfg.q4);
  PipeOut ref = signed_pipeline(m, st0.phi, theta, cfg.gov);

  int ntg = std::min(cfg.shock_targets, g.n());
  Rng pick(derive_stream(seed, kStreamShockPick));
  std::vector<char> used(g.n(), 0);
  std::vector<int> targets;
  for (int j = 0; j < ntg; ++j) {
    int v;
    do {
      v = (int)pick.below((std::uint64_t)g.n());
    } while (used[v]);
    used[v] = 1;
    targets.push_back(v);
  }

  std::vector<MetricRow> rows;
  for (double mass : cfg.m_grid) {
    auto t0 = std::chrono::steady_clock::now();
    ShockSpec spec;
    spec.kappa = cfg.kappa;
    spec.rho_shock = cfg.rho_shock;
    for (int v : targets) spec.targets.emplace_back(v, mass / ntg);
    std::sort(spec.targets.begin(), spec.targets.end());
    ShockResult sr = apply_shock(g, m, spec, cfg.prop, &st0.phi);

    MetricRow row = base_row(cfg, seed, "signed");
    std::vector<std::string> flags;
    row.alpha = cfg.prop.alpha;
    row.eta = cfg.prop.eta;
    row.m = mass;
    row.theta = theta;
    if (sr.accepted) {
      PipeOut post = signed_pipeline(sr.matrices, sr.state.phi, theta,
                                     cfg.gov);
      row.r = sr.state.r;
      row.t_star = sr.state.t_star;
      row.converged = sr.state.converged;
      fill_atlas_stats(row, post);
      if (ref.sets.empty()) {
        flags.push_back("empty_pre_atlas");
      } else {
        row.churn = churn(ref.sets, post.sets);
        row.churn_tau_v = churn_tau(ref.sets, post.sets, cfg.gov.tau);
        row.stability_v = stability(ref.sets, post.sets);
      }
      if (gen.truth) {
        CollapseResult fc = false_collapse_rate(gen.truth->zones, post.sets,
                                                sr.state.phi, theta);
        row.false_collapse = fc.rate;
        if (fc.undefined) flags.push_back("undefined_rate");
      }
    } else {
      flags.push_back("rejected");
    }
    row.wall_clock_ms = ms_since(t0);
    row.flags = join_flags(flags);
    rows.push_back(std::move(row));

    log_chunk += "seed " + std::to_string(seed) + " m " + fmt_double(mass);
    if (sr.accepted) {
      log_chunk += " applied";
      for (const auto& [v, s] : sr.applied)
        log_chunk += ' ' + g.ids[v] + ':' + fmt_double(s);
    } else {
      log_chunk += " rejected after " + std::to_string(sr.halvings) +
                   " halvings";
    }
    log_chunk += '\n';
  }
  return rows;
}

} // namespace

std::vector<SummaryRow> summarize(const ProtocolConfig& cfg,
                                  const std::vector<MetricRow>& rows) {
  struct Cell {
    std::string method;
    std::optional<double> alpha, eta, q, m;
    std::vector<const MetricRow*> rows;
  };
  std::vector<Cell> cells;
  auto key_of = [](const MetricRow& r) {
    return r.method + '|' + fmt_opt(r.alpha) + '|' + fmt_opt(r.eta) + '|' +
           fmt_opt(r.q) + '|' + fmt_opt(r.m);
  };
  std::unordered_map<std::string, size_t> index;
  for (const MetricRow& r : rows) {
    std::string key = key_of(r);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, cells.size());
      cells.push_back(Cell{r.method, r.alpha, r.eta, r.q, r.m, {}});
      it = index.find(key);
    }
    cells[it->second].rows.push_back(&r);
  }

  using Getter = std::optional<double> (*)(const MetricRow&);
  static const std::pair<const char*, Getter> metrics[] = {
      {"r", [](const MetricRow& r) { return r.r; }},
      {"t_star",
       [](const MetricRow& r) {
         return r.t_star ? std::optional<double>((double)*r.t_star)
                         : std::nullopt;
       }},
      {"converged",
       [](const MetricRow& r) {
         return r.converged ? std::optional<double>(*r.converged ? 1.0 : 0.0)
                            : std::nullopt;
       }},
      {"atlas_size",
       [](const MetricRow& r) {
         return r.atlas_size ? std::optional<double>((double)*r.atlas_size)
                             : std::nullopt;
       }},
      {"coverage", [](const MetricRow& r) { return r.coverage; }},
      {"mean_jaccard", [](const MetricRow& r) { return r.mean_jaccard; }},
      {"zone_precision", [](const MetricRow& r) { return r.zone_precision; }},
      {"zone_recall", [](const MetricRow& r) { return r.zone_recall; }},
      {"zone_f1", [](const MetricRow& r) { return r.zone_f1; }},
      {"node_precision", [](const MetricRow& r) { return r.node_precision; }},
      {"node_recall", [](const MetricRow& r) { return r.node_recall; }},
      {"node_f1", [](const MetricRow& r) { return r.node_f1; }},
      {"match_mean_jaccard",
       [](const MetricRow& r) { return r.match_mean_jaccard; }},
      {"churn", [](const MetricRow& r) { return r.churn; }},
      {"churn_tau", [](const MetricRow& r) { return r.churn_tau_v; }},
      {"stability", [](const MetricRow& r) { return r.stability_v; }},
      {"false_collapse_rate",
       [](const MetricRow& r) { return r.false_collapse; }},
  };

  // q_star per method for p2: highest mean node_f1, ties to the smaller q
  std::unordered_map<std::string, double> q_star;
  if (cfg.protocol == "p2") {
    std::unordered_map<std::string, double> best_f1;
    for (const Cell& c : cells) {
      if (!c.q) continue;
      double sum = 0.0;
      int k = 0;
      for (const MetricRow* r : c.rows)
        if (r->node_f1) {
          sum += *r->node_f1;
          ++k;
        }
      if (k == 0) continue;
      double mean = sum / k;
      auto it = best_f1.find(c.method);
      if (it == best_f1.end() || mean > it->second ||
          (mean == it->second && *c.q < q_star[c.method])) {
        best_f1[c.method] = mean;
        q_star[c.method] = *c.q;
      }
    }
  }

  std::vector<SummaryRow> out;
  for (const Cell& c : cells) {
    bool starred = false;
    if (c.q) {
      auto it = q_star.find(c.method);
      starred = it != q_star.end() && it->second == *c.q;
    }
    for (const auto& [name, getter] : metrics) {
      std::vector<double> vals;
      for (const MetricRow* r : c.rows) {
        std::optional<double> v = getter(*r);
        if (v) vals.push_back(*v);
      }
      if (vals.empty()) continue;
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= (double)vals.size();
      double sd = 0.0;
      if (vals.size() > 1) {
        for (double v : vals) sd += (v - mean) * (v - mean);
        sd = std::sqrt(sd / (double)(vals.size() - 1));
      }
      SummaryRow s;
      s.protocol = cfg.protocol;
      s.method = c.method;
      s.alpha = c.alpha;
      s.eta = c.eta;
      s.q = c.q;
      s.m = c.m;
      s.metric = name;
      s.mean = mean;
      s.ci95 = 1.96 * sd / std::sqrt((double)vals.size());
      s.n_seeds = (int)vals.size();
      if (starred) s.flag = "q_star";
      out.push_back(std::move(s));
    }
  }
  return out;
}

ProtocolResult run_protocol(const ProtocolConfig& cfg) {
  validate_protocol_config(cfg);
  std::vector<std::vector<MetricRow>> per_seed(cfg.seeds);
  std::vector<std::string> chunks(cfg.seeds);
  std::vector<std::string> errors(cfg.seeds);
#ifdef _OPENMP
  int nthreads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
  for (int i = 0; i < cfg.seeds; ++i) {
    std::uint64_t seed = cfg.seed_base + (std::uint64_t)i;
    try {
      if (cfg.protocol == "p1")
        per_seed[i] = p1_seed(cfg, seed);
      else if (cfg.protocol == "p2")
        per_seed[i] = p2_seed(cfg, seed);
      else if (cfg.protocol == "p3")
        per_seed[i] = p3_seed(cfg, seed);
      else
        per_seed[i] = p4_seed(cfg, seed, chunks[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (int i = 0; i < cfg.seeds; ++i)
    if (!errors[i].empty())
      throw validation_error("seed " +
                             std::to_string(cfg.seed_base + (std::uint64_t)i) +
                             " failed: " + errors[i]);

  ProtocolResult result;
  for (auto& rows : per_seed)
    for (auto& r : rows) result.rows.push_back(std::move(r));
  result.summary = summarize(cfg, result.rows);

  std::string config_json = serialize_protocol_config(cfg);
  char run_id[32];
  std::snprintf(run_id, sizeof run_id, "%016llx",
                (unsigned long long)fnv1a64(config_json));
  result.run_log += "run_id " + std::string(run_id) + '\n';
  result.run_log += "protocol " + cfg.protocol + '\n';
  result.run_log += "seeds";
  for (int i = 0; i < cfg.seeds; ++i)
    result.run_log +=
        ' ' + std::to_string(cfg.seed_base + (std::uint64_t)i);
  result.run_log += '\n';
  result.run_log += "config " + config_json + '\n';
  for (const std::string& c : chunks) result.run_log += c;
  return result;
}

void write_protocol_result(const ProtocolConfig& cfg,
                           const ProtocolResult& result) {
  std::filesystem::create_directories(cfg.out_dir);
  std::string results = metric_csv_header();
  results += '\n';
  for (const MetricRow& r : result.rows) {
    results += metric_csv_row(r);
    results += '\n';
  }
  std::string summary = summary_csv_header();
  summary += '\n';
  for (const SummaryRow& s : result.summary) {
    summary += summary_csv_row(s);
    summary += '\n';
  }
  std::string base = cfg.out_dir + "/" + cfg.protocol;
  write_file_atomic(base + "_results.csv", results);
  write_file_atomic(base + "_summary.csv", summary);
  write_file_atomic(base + "_run_log.txt", result.run_log);
}

} // namespace bz
