#include "beliefzones/kernels.hpp"

namespace bz {

static inline double step_one(const SignedMatrices& m, double alpha,
                              double eta, const double* b, const double* x,
                              int v) {
  double pos = 0.0;
  for (const auto& [u, w] : m.supp_in[v]) pos += w * x[u];
  double neg = 0.0;
  for (const auto& [u, w] : m.contr_in[v]) neg += w * x[u];
  double t = (1.0 - alpha) * b[v] + alpha * (pos - eta * neg);
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return t;
}

void gather_step_serial(const SignedMatrices& m, double alpha, double eta,
                        const std::vector<double>& b,
                        const std::vector<double>& x, std::vector<double>& y) {
  for (int v = 0; v < m.n; ++v) y[v] = step_one(m, alpha, eta, b.data(), x.data(), v);
}

void gather_step_omp(const SignedMatrices& m, double alpha, double eta,
                     const std::vector<double>& b,
                     const std::vector<double>& x, std::vector<double>& y) {
#pragma omp parallel for schedule(static)
  for (int v = 0; v < m.n; ++v) y[v] = step_one(m, alpha, eta, b.data(), x.data(), v);
}

void gather_step(ExecPolicy exec, const SignedMatrices& m, double alpha,
                 double eta, const std::vector<double>& b,
                 const std::vector<double>& x, std::vector<double>& y) {
  if (exec == ExecPolicy::parallel)
    gather_step_omp(m, alpha, eta, b, x, y);
  else
    gather_step_serial(m, alpha, eta, b, x, y);
}

static inline double row_dot(const SignedMatrices& m, double eta,
                             const double* x, int u) {
  double pos = 0.0;
  for (const auto& [v, w] : m.supp_hat[u]) pos += w * x[v];
  double neg = 0.0;
  for (const auto& [v, w] : m.contr_hat[u]) neg += w * x[v];
  return pos - eta * neg;
}

void matvec_rows_serial(const SignedMatrices& m, double eta,
                        const std::vector<double>& x, std::vector<double>& y) {
  for (int u = 0; u < m.n; ++u) y[u] = row_dot(m, eta, x.data(), u);
}

void matvec_rows_omp(const SignedMatrices& m, double eta,
                     const std::vector<double>& x, std::vector<double>& y) {
#pragma omp parallel for schedule(static)
  for (int u = 0; u < m.n; ++u) y[u] = row_dot(m, eta, x.data(), u);
}

void matvec_rows(ExecPolicy exec, const SignedMatrices& m, double eta,
                 const std::vector<double>& x, std::vector<double>& y) {
  if (exec == ExecPolicy::parallel)
    matvec_rows_omp(m, eta, x, y);
  else
    matvec_rows_serial(m, eta, x, y);
}

static inline double col_dot(const SignedMatrices& m, double eta,
                             const double* x, int v) {
  double pos = 0.0;
  for (const auto& [u, w] : m.supp_in[v]) pos += w * x[u];
  double neg = 0.0;
  for (const auto& [u, w] : m.contr_in[v]) neg += w * x[u];
  return pos - eta * neg;
}

void matvec_cols_serial(const SignedMatrices& m, double eta,
                        const std::vector<double>& x, std::vector<double>& y) {
  for (int v = 0; v < m.n; ++v) y[v] = col_dot(m, eta, x.data(), v);
}

void matvec_cols_omp(const SignedMatrices& m, double eta,
                     const std::vector<double>& x, std::vector<double>& y) {
#pragma omp parallel for schedule(static)
  for (int v = 0; v < m.n; ++v) y[v] = col_dot(m, eta, x.data(), v);
}

void matvec_cols(ExecPolicy exec, const SignedMatrices& m, double eta,
                 const std::vector<double>& x, std::vector<double>& y) {
  if (exec == ExecPolicy::parallel)
    matvec_cols_omp(m, eta, x, y);
  else
    matvec_cols_serial(m, eta, x, y);
}

} // namespace bz
