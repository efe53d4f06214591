#pragma once
// Hot inner loops with a serial reference implementation and an OpenMP
// variant. Each output element depends only on its own row, and per-row
// accumulation order is fixed, so serial and parallel results are
// bit-identical; tests assert that and bench/ compares throughput.

#include <vector>

#include "beliefzones/matrices.hpp"

namespace bz {

enum class ExecPolicy { serial, parallel };

// y[v] = clip01((1-alpha)*b[v] + alpha*(sum_in supp - eta * sum_in contr))
// using the transposed capped views (gather over in-edges)
void gather_step_serial(const SignedMatrices& m, double alpha, double eta,
                        const std::vector<double>& b,
                        const std::vector<double>& x, std::vector<double>& y);
void gather_step_omp(const SignedMatrices& m, double alpha, double eta,
                     const std::vector<double>& b,
                     const std::vector<double>& x, std::vector<double>& y);
void gather_step(ExecPolicy exec, const SignedMatrices& m, double alpha,
                 double eta, const std::vector<double>& b,
                 const std::vector<double>& x, std::vector<double>& y);

// y = M x with M = supp_hat - eta * contr_hat (row-major gather)
void matvec_rows_serial(const SignedMatrices& m, double eta,
                        const std::vector<double>& x, std::vector<double>& y);
void matvec_rows_omp(const SignedMatrices& m, double eta,
                     const std::vector<double>& x, std::vector<double>& y);
void matvec_rows(ExecPolicy exec, const SignedMatrices& m, double eta,
                 const std::vector<double>& x, std::vector<double>& y);

// y = M^T x using the transposed views
void matvec_cols_serial(const SignedMatrices& m, double eta,
                        const std::vector<double>& x, std::vector<double>& y);
void matvec_cols_omp(const SignedMatrices& m, double eta,
                     const std::vector<double>& x, std::vector<double>& y);
void matvec_cols(ExecPolicy exec, const SignedMatrices& m, double eta,
                 const std::vector<double>& x, std::vector<double>& y);

} // namespace bz
