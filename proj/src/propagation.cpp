#include "beliefzones/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "beliefzones/csv.hpp"
#include "beliefzones/rng.hpp"

namespace bz {

void validate_params(const PropagationParams& pp) {
  if (!(pp.alpha > 0.0) || !(pp.alpha < 1.0))
    throw validation_error("alpha must lie in (0,1)");
  if (!(pp.eta >= 0.0)) throw validation_error("eta must be >= 0");
  if (!(pp.epsilon > 0.0)) throw validation_error("epsilon must be > 0");
  if (pp.t_max < 1) throw validation_error("t_max must be >= 1");
  if (pp.prior == PriorMode::credibility && (pp.lambda < 0.0 || pp.lambda > 1.0))
    throw validation_error("lambda must lie in [0,1]");
}

std::vector<double> build_prior(const BeliefGraph& g, const SignedMatrices& m,
                                const PropagationParams& pp) {
  validate_params(pp);
  int n = g.n();
  std::vector<double> b(n, 0.0);
  if (pp.prior == PriorMode::structure) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (const auto& [c, w] : m.supp_hat[i]) s += w;
      b[i] = std::min(1.0, s); // capped row sums can overshoot 1 by an ulp
    }
    return b;
  }
  double psi_max = 0.0;
  for (int i = 0; i < n; ++i) psi_max = std::max(psi_max, g.psi[i]);
  if (!(psi_max > 0.0))
    throw validation_error("credibility prior is degenerate: all psi are zero");
  std::vector<double> b0(n, 0.0);
  if (pp.b0.size() == 1)
    b0.assign(n, pp.b0[0]);
  else if (pp.b0.size() == (size_t)n)
    b0 = pp.b0;
  else if (!pp.b0.empty())
    throw validation_error("b0 must be empty, scalar, or one entry per node");
  for (double v : b0)
    if (v < 0.0 || v > 1.0) throw validation_error("b0 entries must lie in [0,1]");
  for (int i = 0; i < n; ++i) {
    double v = pp.lambda * (g.psi[i] / psi_max) + (1.0 - pp.lambda) * b0[i];
    b[i] = std::clamp(v, 0.0, 1.0);
  }
  return b;
}

static double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double contraction_factor(const SignedMatrices& m, double alpha, double eta,
                          ExecPolicy exec) {
  if (m.n == 0 || !m.has_entries()) return 0.0;
  const int kStarts = 3;
  const int kSteps = 200;
  const double kTol = 1e-6;
  double best = 0.0;
  std::vector<double> v(m.n), w(m.n), z(m.n);
  for (int start = 0; start < kStarts; ++start) {
    Rng rng(derive_stream(kPowerIterSeed, (std::uint64_t)start));
    for (int i = 0; i < m.n; ++i) v[i] = rng.uniform() - 0.5;
    double nv = norm2(v);
    if (!(nv > 0.0)) continue;
    for (double& x : v) x /= nv;
    double sigma = 0.0, sigma_prev = -1.0;
    for (int step = 0; step < kSteps; ++step) {
      matvec_rows(exec, m, eta, v, w);  // w = M v
      sigma = norm2(w);
      if (!(sigma > 0.0)) {
        sigma = 0.0;
        break;
      }
      matvec_cols(exec, m, eta, w, z);  // z = M^T w
      double nz = norm2(z);
      if (!(nz > 0.0)) break;
      for (int i = 0; i < m.n; ++i) v[i] = z[i] / nz;
      if (std::abs(sigma - sigma_prev) <= kTol) break;
      sigma_prev = sigma;
    }
    best = std::max(best, sigma);
  }
  return alpha * best;
}

ConfidenceState propagate_b(const std::vector<double>& b,
                            const SignedMatrices& m,
                            const std::vector<std::pair<int, double>>& clamps,
                            const PropagationParams& pp,
                            const std::vector<double>* warm,
                            std::optional<double> r_known) {
  validate_params(pp);
  if ((int)b.size() != m.n)
    throw validation_error("prior length does not match node count");
  for (double v : b)
    if (!(v >= 0.0 && v <= 1.0))
      throw validation_error("prior entries must lie in [0,1]");
  for (const auto& [i, a] : clamps) {
    if (i < 0 || i >= m.n) throw validation_error("clamp node out of range");
    if (!(a >= 0.0 && a <= 1.0))
      throw validation_error("authority values must lie in [0,1]");
  }

  ConfidenceState st;
  st.r = r_known ? *r_known : contraction_factor(m, pp.alpha, pp.eta, pp.exec);

  // x0 is the prior (or the warm start) as-is; clamping happens inside the
  // step operator, so pinned nodes settle after the first application
  std::vector<double> x = warm ? *warm : b;
  if ((int)x.size() != m.n)
    throw validation_error("warm start length does not match node count");

  std::vector<double> y(m.n);
  int t = 0;
  bool converged = false;
  while (t < pp.t_max) {
    gather_step(pp.exec, m, pp.alpha, pp.eta, b, x, y);
    for (const auto& [i, a] : clamps) y[i] = a;
    ++t;
    double diff = 0.0;
    for (int i = 0; i < m.n; ++i) diff = std::max(diff, std::abs(y[i] - x[i]));
    x.swap(y);
    if (diff <= pp.epsilon) {
      converged = true;
      break;
    }
  }
  st.phi = std::move(x);
  st.t_star = t;
  st.converged = converged;
  return st;
}

std::vector<std::pair<int, double>> authority_clamps(const BeliefGraph& g) {
  std::vector<std::pair<int, double>> clamps;
  for (int i = 0; i < g.n(); ++i)
    if (g.authority[i]) clamps.emplace_back(i, *g.authority[i]);
  return clamps;
}

ConfidenceState propagate(const BeliefGraph& g, const SignedMatrices& m,
                          const PropagationParams& pp,
                          const std::vector<double>* warm,
                          std::optional<double> r_known) {
  return propagate_b(build_prior(g, m, pp), m, authority_clamps(g), pp, warm,
                     r_known);
}

std::string confidence_csv(const BeliefGraph& g, const ConfidenceState& st) {
  std::string out = "node_id,phi,converged,t_star,r\n";
  for (int i = 0; i < g.n(); ++i) {
    out += g.ids[i];
    out += ',';
    out += fmt_double(st.phi[i]);
    out += ',';
    out += st.converged ? '1' : '0';
    out += ',';
    out += std::to_string(st.t_star);
    out += ',';
    out += fmt_double(st.r);
    out += '\n';
  }
  return out;
}

} // namespace bz
