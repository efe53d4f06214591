#pragma once
// Unsigned baselines. unsign_cl clusters the unsigned thresholded graph with
// a deterministic Louvain and pushes the communities through the same
// governance pass as the signed pipeline (confidences and theta come from
// the signed run). unsign_pro reruns the propagation operator with eta=0 on
// the merged support+contradiction matrices and hands its own confidence
// state back to the caller, which runs the usual extraction downstream (the
// all-positive projection is always balanced).

#include <vector>

#include "beliefzones/atlas.hpp"
#include "beliefzones/propagation.hpp"

namespace bz {

// support plus contradiction aggregated as support, contradictions empty,
// then row-capped like any other matrices
SignedMatrices unsigned_view(const SignedMatrices& m);

struct LouvainParams {
  double resolution = 1.0;
  double min_gain = 1e-7; // a move must beat this modularity gain
};

// Louvain over the projection's unsigned weights (wpos+wneg per pair).
// Deterministic: nodes scanned in ascending order, best positive gain wins,
// gain ties go to the smallest community id, levels aggregate communities in
// smallest-member order. Returns sorted global-id sets ordered by smallest
// member; vertices without edges come out as singletons.
std::vector<std::vector<int>> louvain_communities(
    const SignedProjection& p, const LouvainParams& lp = {});

// member sets -> zones with mean/min phi filled in
std::vector<Zone> zones_from_sets(const std::vector<std::vector<int>>& sets,
                                  const std::vector<double>& phi);

// Louvain communities on the unsigned projection over threshold_nodes(phi,
// theta), then the standard governance pass scored with the signed phi
Atlas baseline_unsign_cl(const SignedMatrices& m,
                         const std::vector<double>& phi, double theta,
                         const GovernanceParams& gp,
                         const LouvainParams& lp = {});

// propagation on unsigned_view(m) with eta forced to 0; the prior comes from
// the unsigned matrices under the caller's prior mode
ConfidenceState baseline_unsign_pro(const BeliefGraph& g,
                                    const SignedMatrices& unsigned_m,
                                    const PropagationParams& pp);

} // namespace bz
