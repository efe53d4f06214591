#pragma once
// Seeded synthetic graph families. All draws come from a single xoshiro
// stream derived from (seed, kStreamGenerator), in a fixed documented order,
// so a (family, params, seed) triple maps to byte-identical graph files:
//
//   1. node credibilities psi, one draw per node in id order
//   2. edges:
//      g1: for each node u in id order, d distinct out-neighbors by
//          rejection (redraw on self or repeat); after each accepted
//          neighbor, the sign draw (uniform < rho_minus means negative) and
//          then the weight draw follow before the next neighbor
//      g2: one scan over ordered pairs (u,v), u outer and v inner, both in
//          id order; same-block pairs accept a support edge when
//          uniform < p_in; every other pair uses a single uniform split:
//          [0,p_out_pos) support, [p_out_pos, p_out_pos+p_out_neg)
//          contradiction; the weight draw follows each accepted edge
//      g3: the full g1 sequence first, then a Fisher-Yates shuffle of the
//          ids (i from n-1 down to 1, swap with below(i+1)); consecutive
//          triples of the shuffled prefix become directed negative 3-cycles
//          a->b->c->a, weights drawn per edge in that order
//
// Weights default to TruncNormal(mu=1, sigma=0.2, w>0) by rejection;
// log-normal is available via config (w_mu/w_sigma are then log-space
// parameters). Credibilities default to uniform [0,1); the pareto option
// maps the Pareto(1, alpha) tail onto [0,1) via x -> 1 - 1/x.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "beliefzones/graph.hpp"
#include "beliefzones/rng.hpp"

namespace bz {

enum class WeightDist { trunc_normal, log_normal };
enum class PsiDist { uniform, pareto };

struct GeneratorConfig {
  std::string family = "g1"; // g1, g2, g3
  int n = 2000;
  std::uint64_t seed = 1;
  // g1 / g3 backbone
  int d = 8;
  double rho_minus = 0.3;
  // g2 planted blocks
  int k_zones = 3;
  int zone_size = 0; // 0 resolves to max(120, n/10)
  double p_in = 0.22;
  double p_out_pos = 0.01;
  double p_out_neg = 0.01;
  // g3 negative 3-cycles; -1 resolves to max(50, n/20)
  int cycles = -1;
  WeightDist weights = WeightDist::trunc_normal;
  double w_mu = 1.0;
  double w_sigma = 0.2;
  PsiDist psi = PsiDist::uniform;
  double pareto_alpha = 2.5;
};

struct GroundTruth {
  std::vector<std::vector<int>> zones; // planted blocks, dense ids ascending
};

void validate_config(const GeneratorConfig& c);
int resolved_zone_size(const GeneratorConfig& c);
int resolved_cycles(const GeneratorConfig& c);

// zero-padded decimal id so lexicographic order equals numeric order
std::string node_label(int i, int n);

BeliefGraph gen_g1(const GeneratorConfig& c);
std::pair<BeliefGraph, GroundTruth> gen_g2(const GeneratorConfig& c);
BeliefGraph gen_g3(const GeneratorConfig& c);

struct Generated {
  BeliefGraph graph;
  std::optional<GroundTruth> truth; // only g2
};
Generated generate(const GeneratorConfig& c);

// truth file: {"zones":[["0000","0001",...],...]}, zones by first member
std::string serialize_truth(const GroundTruth& t, const BeliefGraph& g);
GroundTruth parse_truth(const std::string& json_text, const BeliefGraph& g,
                        const std::string& origin = "<memory>");
GroundTruth load_truth(const std::string& path, const BeliefGraph& g);

} // namespace bz
