#pragma once

#include <string>
#include <utility>
#include <vector>

#include "newton3/linalg.hpp"

namespace newton3 {

// Designates the free-variable "block" in an SdpTerm.
inline constexpr int kFreeVar = -1;

// One additive term of a linear functional over the problem variables.
// block >= 0 addresses entry (row, col) of that PSD block; entries are stored
// on the upper triangle and an off-diagonal coefficient counts the mirrored
// entry as well (i.e. coeff * X_rc with X symmetric, touched once).
// block == kFreeVar addresses free scalar variable `row` (col unused).
struct SdpTerm {
  int block = kFreeVar;
  int row = 0;
  int col = 0;
  double coeff = 0.0;
};

struct LinFun {
  std::vector<SdpTerm> terms;
  double constant = 0.0;

  void add(int block, int row, int col, double coeff);  // normalizes row<=col
  void add_free(int index, double coeff);
};

// A PSD block is either a plain matrix variable or an affine block whose
// upper-triangle entries (row-major) are linear functionals of the other
// variables. Affine blocks are lowered during assembly to a matrix variable
// plus one tying equality per entry.
struct SdpBlock {
  int size = 0;
  bool affine = false;
  std::vector<LinFun> entries;  // size*(size+1)/2 functionals when affine
};

struct SdpProblem {
  int free_dim = 0;
  std::vector<SdpBlock> blocks;
  LinFun objective;                                      // minimized
  std::vector<std::pair<LinFun, double>> eq_constraints;  // fun == rhs
};

// A value for every variable of an SdpProblem (affine blocks included, as
// their realized matrices).
struct SdpAssignment {
  dvec free_vars;
  std::vector<dmat> blocks;
};

double evaluate(const LinFun& f, const SdpAssignment& a);

enum class SdpStatus { Optimal, MaxIterations, NumericalFailure };
const char* to_string(SdpStatus s);

struct SolverConfig {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iters = 100;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  SdpAssignment primal;
  double objective_value = 0.0;
  double max_eq_residual = 0.0;       // infinity norm over all equalities
  double min_block_eigenvalue = 0.0;  // most negative eigenvalue across blocks
  double relative_gap = 0.0;          // |pobj-dobj| / (1+|pobj|+|dobj|)
  int iterations = 0;
  std::vector<double> mu_history;     // complementarity measure per iteration
};

// Canonical dense form. Variables are the concatenated scaled upper triangles
// of every block (svec: off-diagonal entries carry sqrt(2)) followed by the
// free variables. Affine blocks have been replaced by matrix variables plus
// tying equality rows, so only plain PSD blocks remain.
struct StandardForm {
  std::vector<int> block_sizes;
  std::vector<int> block_offset;  // start of each block's svec segment
  int svec_dim = 0;
  int free_dim = 0;
  dvec c;      // objective over [svec | free]
  double c0 = 0.0;
  dmat A;      // one row per equality over [svec | free]
  dvec rhs;
};

StandardForm assemble_standard_form(const SdpProblem& p);

// Scaled symmetric vectorization and its inverse.
dvec svec(const dmat& M);
dmat smat(const dvec& v, int size);

SdpSolution solve(const SdpProblem& p, const SolverConfig& cfg = {});

// Independent recheck of an assignment against the original problem data:
// user equalities and affine-block definitions feed max_eq_residual.
struct VerifyReport {
  double objective_value = 0.0;
  double max_eq_residual = 0.0;
  double min_block_eigenvalue = 0.0;
};
VerifyReport verify_assignment(const SdpProblem& p, const SdpAssignment& a);

// Sparse text dump of the canonical form, one line per nonzero:
//   <constraint> <block> <row> <col> <value>
// where constraint -1 is the objective row, block -1 a free variable (index
// in <row>), and block -2 the constraint right-hand side. Block coefficients
// are reported as symmetric inner-product entries on the upper triangle: a
// value v at (r,c), r < c, multiplies both X_rc and X_cr.
void write_debug_dump(const StandardForm& sf, const std::string& path);

}  // namespace newton3
