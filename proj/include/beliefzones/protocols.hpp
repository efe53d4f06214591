#pragma once
// Protocol runners p1-p4 over seeded synthetic graphs, with per-cell metric
// rows, mean +- 95% CI summaries (1.96 * sd / sqrt(#seeds)) and a run log.
//
// p1: g1 grid over (alpha, eta); reports r and iterations to tolerance.
// p2: g2 threshold sweep q in {0.30..0.90 step 0.05} at (0.6, 1.0); signed
//     pipeline vs unsign_cl (Louvain at the signed theta) vs unsign_pro
//     (eta=0 on merged matrices, own theta); zone/node scores against the
//     planted blocks; q_star rows flagged in the summary per method.
// p3: g2 at the 0.75 quantile; weight jitter w *= (1 + scale * N(0,1)),
//     clamped at 0, applied to raw stored weights in canonical edge order
//     with no renormalization; the quantile threshold is recomputed after
//     the jitter and both solves start fresh from their own priors; churn,
//     tau-matched churn and stability between the pre and post atlases.
// p4: g3 (or g2 for false-collapse studies) at the 0.75 quantile; one batch
//     of shock targets per seed (distinct uniform draws, kStreamShockPick),
//     reused across the m grid with s_u = m / #targets; the pre-shock theta
//     is kept fixed for post-shock extraction; stability against the
//     pre-shock reference atlas.
//
// Rows are emitted in a fixed cell order regardless of the worker count;
// wall_clock_ms is the only nondeterministic column and the summary skips it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beliefzones/baselines.hpp"
#include "beliefzones/dynamics.hpp"
#include "beliefzones/generators.hpp"
#include "beliefzones/metrics.hpp"

namespace bz {

struct ProtocolConfig {
  std::string protocol = "p1";
  int seeds = 30;
  std::uint64_t seed_base = 1;
  int workers = 0; // 0 = runtime default
  std::string out_dir = "eval_out";
  GeneratorConfig family;
  PropagationParams prop;
  GovernanceParams gov;
  // p1
  std::vector<double> alphas = {0.2, 0.4, 0.6, 0.8};
  std::vector<double> etas = {0.0, 0.5, 1.0};
  // p2
  std::vector<double> q_grid;
  // p3
  double q3 = 0.75;
  double jitter = 0.05;
  // p4
  double q4 = 0.75;
  std::vector<double> m_grid = {0.0, 0.1, 0.2, 0.3, 0.4};
  int shock_targets = 40;
  double kappa = 0.5;
  double rho_shock = 1.0;
};

// protocol defaults: family pairing, (alpha, eta) = (0.6, 1.0) for p2-p4,
// structure prior, tau=0.30, k=3, raw scoring
ProtocolConfig default_config(const std::string& protocol);

void validate_protocol_config(const ProtocolConfig& cfg);

ProtocolConfig parse_protocol_config(const std::string& json_text,
                                     const std::string& origin = "<memory>");
ProtocolConfig load_protocol_config(const std::string& path);
std::string serialize_protocol_config(const ProtocolConfig& cfg);

struct MetricRow {
  std::string protocol;
  std::uint64_t seed = 0;
  std::string method; // signed, unsign_cl, unsign_pro
  std::optional<double> alpha, eta, q, m, theta, r;
  std::optional<int> t_star;
  std::optional<bool> converged;
  double wall_clock_ms = 0.0;
  std::optional<int> atlas_size;
  std::optional<double> coverage, mean_jaccard;
  std::optional<double> zone_precision, zone_recall, zone_f1;
  std::optional<double> node_precision, node_recall, node_f1;
  std::optional<double> match_mean_jaccard;
  std::optional<double> churn, churn_tau_v, stability_v;
  std::optional<double> false_collapse;
  std::string flags; // semicolon-joined tokens, empty when clean
};

std::string metric_csv_header();
std::string metric_csv_row(const MetricRow& row);

struct SummaryRow {
  std::string protocol;
  std::string method;
  std::optional<double> alpha, eta, q, m;
  std::string metric;
  double mean = 0.0;
  double ci95 = 0.0;
  int n_seeds = 0;
  std::string flag; // q_star on the selected p2 cells
};

std::string summary_csv_header();
std::string summary_csv_row(const SummaryRow& row);

// groups rows by (method, alpha, eta, q, m) in first-appearance order and
// aggregates every populated metric; p2 additionally flags the q maximizing
// mean node_f1 per method (ties to the smaller q)
std::vector<SummaryRow> summarize(const ProtocolConfig& cfg,
                                  const std::vector<MetricRow>& rows);

struct ProtocolResult {
  std::vector<MetricRow> rows;
  std::vector<SummaryRow> summary;
  std::string run_log;
};

ProtocolResult run_protocol(const ProtocolConfig& cfg);

// <out_dir>/<protocol>_results.csv, _summary.csv, _run_log.txt
void write_protocol_result(const ProtocolConfig& cfg,
                           const ProtocolResult& result);

std::uint64_t fnv1a64(const std::string& text);

} // namespace bz
