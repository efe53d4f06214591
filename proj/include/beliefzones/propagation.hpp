#pragma once
// Damped clipped propagation to the confidence fixed point, the prior
// builders, and the contraction-factor estimate r = alpha * ||M||_2 with
// M = supp_hat - eta * contr_hat.
//
// Update: x <- clip01((1-alpha) b + alpha gather(x)), then authority nodes
// are overwritten with their pinned value. Iteration stops at the first step
// whose infinity-norm change is <= epsilon, or after t_max steps (reported as
// converged=false, never an error). x starts at b unless a warm start is
// given.
//
// The spectral norm is estimated by power iteration on M^T M: three starts
// seeded from a dedicated stream, 200 steps each, early stop when successive
// estimates differ by <= 1e-6, maximum over starts. r < 1 certifies a unique
// fixed point.

#include <optional>
#include <vector>

#include "beliefzones/kernels.hpp"
#include "beliefzones/matrices.hpp"

namespace bz {

enum class PriorMode { credibility, structure };

struct PropagationParams {
  double alpha = 0.6;
  double eta = 1.0;
  double epsilon = 1e-6;
  int t_max = 2000;
  PriorMode prior = PriorMode::structure;
  double lambda = 1.0;     // credibility mode blend
  std::vector<double> b0;  // credibility floor; empty = zeros, size 1 = broadcast
  ExecPolicy exec = ExecPolicy::serial;
};

struct ConfidenceState {
  std::vector<double> phi;
  int t_star = 0;
  bool converged = false;
  double r = 0.0;
};

void validate_params(const PropagationParams& pp);

// credibility: b = lambda * psi/||psi||_inf + (1-lambda) * b0 (degenerate-psi
// error if ||psi||_inf = 0); structure: b_i = row sum of capped supp row i
std::vector<double> build_prior(const BeliefGraph& g, const SignedMatrices& m,
                                const PropagationParams& pp);

double contraction_factor(const SignedMatrices& m, double alpha, double eta,
                          ExecPolicy exec = ExecPolicy::serial);

// clamps: (node, value) pairs applied after every step, sorted by node
ConfidenceState propagate_b(const std::vector<double>& b,
                            const SignedMatrices& m,
                            const std::vector<std::pair<int, double>>& clamps,
                            const PropagationParams& pp,
                            const std::vector<double>* warm = nullptr,
                            std::optional<double> r_known = std::nullopt);

// builds b and clamps from the graph, then runs propagate_b
ConfidenceState propagate(const BeliefGraph& g, const SignedMatrices& m,
                          const PropagationParams& pp,
                          const std::vector<double>* warm = nullptr,
                          std::optional<double> r_known = std::nullopt);

std::vector<std::pair<int, double>> authority_clamps(const BeliefGraph& g);

// confidence CSV: node_id,phi,converged,t_star,r (run-level fields repeated)
std::string confidence_csv(const BeliefGraph& g, const ConfidenceState& st);

} // namespace bz
