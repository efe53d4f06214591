#pragma once
// Ground-truth metrics over families of node sets: max-overlap precision and
// recall at the zone level, union-based node-level scores, optimal 1-Jaccard
// assignment, and the atlas-overlap metrics (churn, stability, tau-matched
// churn, false collapse).

#include <vector>

#include "beliefzones/atlas.hpp"

namespace bz {

struct FamilyScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool undefined_precision = false; // empty reported family
};

// reported/truth member sets must be sorted ascending
FamilyScores family_metrics(const std::vector<std::vector<int>>& reported,
                            const std::vector<std::vector<int>>& truth);

// scores on the unions of the reported and truth families
FamilyScores node_metrics(const std::vector<std::vector<int>>& reported,
                          const std::vector<std::vector<int>>& truth);

struct MatchResult {
  std::vector<int> assignment; // per reported zone: truth index or -1 (pad)
  double mean_jaccard = 0.0;   // mean J over matched real pairs
};

// optimal assignment minimizing total 1-Jaccard over a square matrix padded
// with cost 1; the matched-J sum is identical across co-optimal assignments
MatchResult hungarian_match(const std::vector<std::vector<int>>& reported,
                            const std::vector<std::vector<int>>& truth);

// chi = 1 - mean over prev zones of the best Jaccard against post
double churn(const std::vector<std::vector<int>>& prev,
             const std::vector<std::vector<int>>& post);

// S_J = mean over prev zones of the best Jaccard against post
double stability(const std::vector<std::vector<int>>& prev,
                 const std::vector<std::vector<int>>& post);

// fraction of prev zones without any post match at J >= tau
double churn_tau(const std::vector<std::vector<int>>& prev,
                 const std::vector<std::vector<int>>& post, double tau);

struct CollapseResult {
  double rate = 0.0;
  bool undefined = false; // no truth block met the retention bar
};

// a truth block counts as a false collapse when at least `retention` of its
// members still sit at phi >= theta yet no post zone overlaps it at J >= tau
CollapseResult false_collapse_rate(const std::vector<std::vector<int>>& truth,
                                   const std::vector<std::vector<int>>& post,
                                   const std::vector<double>& phi, double theta,
                                   double tau = 0.3, double retention = 0.7);

// |union of sets| / v_theta_size; 0 when v_theta_size is 0
double coverage(const std::vector<std::vector<int>>& sets, int v_theta_size);

double mean_pairwise_jaccard(const std::vector<std::vector<int>>& sets);

std::vector<std::vector<int>> atlas_sets(const Atlas& a);

} // namespace bz
