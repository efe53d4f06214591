#pragma once
// Graph dynamics: external shocks with contractivity backtracking, structured
// edits with geometric damping, and the per-zone reasoning loop that hands
// proposals back as zone-scoped edits.
//
// Backtracking: after an update, if the contraction factor is >= 1 the
// magnitude halves and the update replays from the pristine pre-update graph,
// at most 40 times; strengths below 1e-12 without recovering contractivity
// reject the update and leave all inputs untouched. Rejections are reported
// state (accepted=false), not exceptions.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "beliefzones/atlas.hpp"
#include "beliefzones/propagation.hpp"

namespace bz {

inline constexpr int kMaxHalvings = 40;
inline constexpr double kMinStrength = 1e-12;

struct ShockSpec {
  std::vector<std::pair<int, double>> targets; // (node, strength in [0,1])
  double kappa = 0.5;     // support downscale fraction, in [0,1)
  double rho_shock = 1.0; // contradiction injection gain, >= 0
};

ShockSpec parse_shock(const std::string& json_text, const BeliefGraph& g,
                      const std::string& origin = "<memory>");
ShockSpec load_shock(const std::string& path, const BeliefGraph& g);
std::string serialize_shock(const ShockSpec& s, const BeliefGraph& g);

// per-node strengths accumulate and clip at 1; kappa/rho_shock must agree
// across events (time-window grouping is the caller's concern)
ShockSpec batch_shocks(const std::vector<ShockSpec>& events);

struct ShockResult {
  BeliefGraph graph;
  SignedMatrices matrices;
  ConfidenceState state;
  std::vector<std::pair<int, double>> applied; // strengths actually applied
  bool accepted = false;
  int halvings = 0;
  std::string reason;
};

// For each target u with strength s: every positive out-edge weight scales by
// (1 - kappa*s), and each pre-shock support target v gains contradiction mass
// rho_shock * s * supp_uv / (1 + sum_v' supp_uv'), all from pre-shock values
// (new edges typed "shock"). Re-propagation warm-starts from `warm` when
// given. Identity shocks (no positive strength) return inputs unchanged.
ShockResult apply_shock(const BeliefGraph& g, const SignedMatrices& m,
                        const ShockSpec& spec, const PropagationParams& pp,
                        const std::vector<double>* warm = nullptr);

enum class EditKind {
  expansion,
  contraction,
  revision,
  credibility_handback,
  structural_handback,
};

struct NodeAdd {
  std::string id;
  double psi = 0.0;
  std::optional<double> authority;
};
struct EdgeAdd {
  std::string src, dst, type;
  int sign = 0;
  double weight = 0.0;
};
struct EdgeKey {
  std::string src, dst, type;
};
struct PsiSet {
  std::string id;
  double psi = 0.0;
};
struct WeightSet {
  EdgeKey key;
  double weight = 0.0;
};
struct Retype {
  EdgeKey key;
  std::string new_type;
  int new_sign = 0;
};

struct EditDelta {
  EditKind kind = EditKind::revision;
  std::vector<NodeAdd> add_nodes;        // expansion
  std::vector<EdgeAdd> add_edges;        // expansion, structural_handback
  std::vector<std::string> remove_nodes; // contraction
  std::vector<EdgeKey> remove_edges;     // contraction
  std::vector<PsiSet> set_psi;           // revision, credibility_handback
  std::vector<WeightSet> set_weight;     // revision, structural_handback
  std::vector<Retype> retype;            // revision, structural_handback
  std::optional<int> zone_index;         // handbacks: originating zone

  bool empty() const;
};

// full-strength application with per-kind payload validation; returns a fresh
// graph with dense indices reassigned in sorted id order
BeliefGraph apply_edit(const BeliefGraph& g, const EditDelta& d);

// damped application: weight changes interpolate toward their target by
// gamma (removals scale surviving weight by 1-gamma, additions by gamma);
// psi and retype apply in full at any gamma. gamma=1 equals apply_edit.
BeliefGraph apply_edit_scaled(const BeliefGraph& g, const EditDelta& d,
                              double gamma);

struct UpdateResult {
  BeliefGraph graph;
  SignedMatrices matrices;
  ConfidenceState state;
  Atlas atlas;
  double applied_scale = 1.0;
  bool accepted = false;
  int halvings = 0;
  std::string reason;
};

// apply -> backtrack until contractive -> warm re-propagate -> re-extract at
// theta -> atlas_refresh against prev. warm (pre-edit confidences, indexed by
// the pre-edit graph) is remapped by node id across reindexing.
UpdateResult update_and_refresh(const BeliefGraph& g, const SignedMatrices& m,
                                const EditDelta& d, double theta,
                                const GovernanceParams& gp,
                                const PropagationParams& pp, const Atlas& prev,
                                const std::vector<double>* warm = nullptr);

struct ReasonerProposal {
  std::vector<std::pair<int, double>> psi_updates; // (node, new psi)
  struct EdgeSet {
    int src = 0, dst = 0;
    std::string type;
    double weight = 0.0;
  };
  std::vector<EdgeSet> edge_sets; // absolute new weights on existing edges
  std::vector<EdgeAdd> edge_adds; // ids resolved against the zone's graph
};

struct Reasoner {
  virtual ~Reasoner() = default;
  virtual ReasonerProposal propose(const Zone& zone, const BeliefGraph& g,
                                   const std::vector<double>& phi) = 0;
};

// no-op reasoner: returns empty proposals
struct EchoReasoner final : Reasoner {
  ReasonerProposal propose(const Zone&, const BeliefGraph&,
                           const std::vector<double>&) override {
    return {};
  }
};

struct ReasoningResult {
  BeliefGraph graph;
  SignedMatrices matrices;
  ConfidenceState state;
  Atlas atlas;
  bool changed = false;
  bool accepted = true;
  std::string reason;
};

// runs the reasoner over every kept zone, enforces that proposals only touch
// their own zone (rejection_error naming zone and target otherwise), resolves
// cross-zone conflicts by zone rank (score, mass, cut-, members), and applies
// the merged handback through update_and_refresh
ReasoningResult run_reasoning(const BeliefGraph& g, const SignedMatrices& m,
                              const Atlas& atlas,
                              const std::vector<double>& phi,
                              Reasoner& reasoner, double theta,
                              const GovernanceParams& gp,
                              const PropagationParams& pp);

} // namespace bz
