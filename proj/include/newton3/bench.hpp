#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "newton3/optimize.hpp"

namespace newton3 {

// Expected iteration count: either an exact target with a tolerance band or
// a lower bound (">=N"), meaning the run must still be unconverged after N
// iterations.
struct BenchExpectation {
  bool lower_bound = false;
  int value = 0;
};

struct BenchCase {
  std::string objective;
  std::string optimizer;  // ton | newton2 | gd | qfit
  dvec x0;
  OptimizerConfig cfg;
  BenchExpectation expected;
  bool has_expectation = false;
  double band_abs = 0.0;  // band: |iters - expected| <= max(band_abs, ...)
  double band_pct = 0.0;  //       ... band_pct/100 * expected
};

struct BenchResult {
  BenchCase c;
  int iterations = 0;
  Termination termination = Termination::MaxIterations;
  bool within_band = true;
};

// Reference suite bundled with the tool: third/second-order Newton, fixed-
// step descent at several step sizes, and quadratic-fit descent across the
// four named objectives and their published starting points.
std::vector<BenchCase> reference_suite();

// Flat key-value suite file: one "[case]" section per run with keys
// objective, optimizer, x0, and optional eps / max_iters / step / shifts /
// expected / band_abs / band_pct. '#' starts a comment. Throws
// std::runtime_error on malformed input.
std::vector<BenchCase> load_suite_file(const std::string& path);

// Runs every case (in parallel when threads != 1) and reports in suite
// order. threads == 0 picks the hardware concurrency.
std::vector<BenchResult> run_suite(const std::vector<BenchCase>& cases,
                                   int threads = 0);

// CSV: objective,optimizer,x0,iterations,termination,expected,within_band.
void write_report(const std::vector<BenchResult>& results, std::ostream& out);
bool write_report_file(const std::vector<BenchResult>& results,
                       const std::string& path);

OptimizerTrace run_case(const BenchCase& c);

}  // namespace newton3
