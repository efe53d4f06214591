#pragma once
// Atlas governance: scores candidate zones, enforces bounded pairwise overlap
// with a greedy coexistence pass, truncates to the top-k, and carries
// hysteresis across refreshes so marginal challengers do not thrash the kept
// set.

#include <optional>
#include <string>
#include <vector>

#include "beliefzones/matrices.hpp"
#include "beliefzones/projection.hpp"
#include "beliefzones/zones.hpp"

namespace bz {

enum class ScoringMode { raw, normalized, quality };

std::string scoring_mode_name(ScoringMode m);
ScoringMode scoring_mode_from(const std::string& name);

struct GovernanceParams {
  double tau = 0.30;          // max pairwise Jaccard among kept zones
  std::optional<int> k = 3;   // atlas cap; nullopt = unbounded
  double lambda_gov = 0.0;    // contradiction outflow penalty
  double rho_gov = 0.0;       // support outflow penalty
  ScoringMode mode = ScoringMode::raw;
  double tau_keep = 0.50;     // incumbent match threshold for hysteresis
  double delta_score = 1e-6;  // challenger must beat incumbent by more
  double delta_mass = 1e-3;   // ... or gain at least this much mass
  int hops = 2;               // local refresh ball radius
  double eps_tie = 1e-9;      // score tie tolerance
};

void validate_params(const GovernanceParams& gp);

struct ScoredZone {
  Zone zone;
  double score = 0.0;
  double mass = 0.0; // sum of phi over members
  double cut_minus = 0.0;
  double loss_plus = 0.0;
};

struct Atlas {
  std::vector<ScoredZone> zones; // kept, in policy rank order
  ScoringMode mode = ScoringMode::raw;
  int size() const { return (int)zones.size(); }
};

// raw directed outflows over edges leaving the member set:
// first = contradiction mass (cut-), second = support mass (loss+)
std::pair<double, double> boundary_flows(const std::vector<int>& members,
                                         const SignedMatrices& m);

double jaccard(const std::vector<int>& a, const std::vector<int>& b);

// quality mode needs the projection for densities; other modes ignore it
Atlas atlas_update(const std::vector<Zone>& candidates,
                   const std::vector<double>& phi, const SignedMatrices& m,
                   const GovernanceParams& gp,
                   const SignedProjection* proj = nullptr);

Atlas atlas_refresh(const Atlas& prev, const std::vector<Zone>& candidates,
                    const std::vector<double>& phi, const SignedMatrices& m,
                    const GovernanceParams& gp,
                    const SignedProjection* proj = nullptr);

// nodes whose threshold membership flipped, expanded by `hops` undirected
// hops in the full-graph projection; empty when nothing crossed
std::vector<int> local_refresh_region(const std::vector<double>& prev_phi,
                                      const std::vector<double>& new_phi,
                                      double theta,
                                      const SignedProjection& full_proj,
                                      int hops);

// re-extracts only inside the region, carries over untouched zones, and
// reruns the coexistence pass over the union with hysteresis against prev
Atlas local_refresh(const Atlas& prev, const std::vector<double>& prev_phi,
                    const std::vector<double>& new_phi, double theta,
                    const SignedMatrices& m, const GovernanceParams& gp);

struct ZoneReportRow {
  int zone_id = 0;
  int size = 0;
  double score = 0.0;
  std::string scoring_mode;
  double mean_phi = 0.0;
  double min_phi = 0.0;
  double cut_minus = 0.0;
  double loss_plus = 0.0;
  double nn_jaccard = 0.0; // max Jaccard against any other kept zone
};

std::vector<ZoneReportRow> zone_report(const Atlas& atlas);

// zone_id,size,score,scoring_mode,mean_phi,min_phi,cut_minus,loss_plus,nn_jaccard
std::string atlas_report_csv(const Atlas& atlas);

} // namespace bz
