#pragma once

#include <vector>

#include "newton3/cubic_model.hpp"
#include "newton3/sdp.hpp"

namespace newton3 {

enum class LocalMinOutcome {
  LocalMin,           // certified strict second-order local minimizer
  SecondOrderPoint,   // gradient zero, Hessian PSD but singular to tolerance
  NoSecondOrderPoint, // certificate value bounded away from zero (or no
                      // feasible certificate point exists)
  SolverFailed        // numerical failure; nothing can be concluded
};
const char* to_string(LocalMinOutcome o);

struct LocalMinConfig {
  double phi_tol = 1e-6;   // certificate threshold: phi* above it => no point
  double grad_tol = 1e-6;  // stationarity tolerance at the extracted point
  double psd_tol = 1e-7;   // Hessian eigenvalue split LocalMin vs flat
  bool polish = true;      // few Newton steps on the cubic after extraction
  SolverConfig solver;
};

struct LocalMinResult {
  LocalMinOutcome outcome = LocalMinOutcome::SolverFailed;
  dvec point;                       // centered coordinates (add m.center)
  double phi_value = 0.0;           // optimized certificate quantity, >= 0
  double shift_used = 0.0;
  double grad_norm_at_point = 0.0;
  double hess_min_eig_at_point = 0.0;
  SdpStatus solver_status = SdpStatus::NumericalFailure;
};

// Certificate program for a second-order point of the cubic m. Free scalars
// (x_1..x_n, y); block 0 constrains the Hessian at x (affine), block 1 ties a
// moment matrix [[X, x], [x^T, 1]] to x. Gradient equalities, border ties and
// the corner pin enter as user equality constraints; the minimized objective
// is the nonnegative certificate quantity phi.
SdpProblem build_sdp(const CubicModel& m);

// Solves the certificate program and classifies the extracted point.
LocalMinResult find_local_min(const CubicModel& m, const LocalMinConfig& cfg = {});

// Ladder over Hessian shifts sigma (first entry must be 0): each attempt
// minimizes the cubic with Q replaced by Q + sigma * I. Returns the first
// LocalMin / SecondOrderPoint result, else the unshifted failure result.
LocalMinResult find_local_min_with_shift(const CubicModel& m,
                                         const std::vector<double>& shifts,
                                         const LocalMinConfig& cfg = {});

}  // namespace newton3
