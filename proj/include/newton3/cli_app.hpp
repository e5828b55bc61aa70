#pragma once

#include <string>

#include "newton3/optimize.hpp"

namespace newton3 {

// Exit codes: 0 converged / success, 1 bad arguments, 2 step failure,
// 3 iteration budget exhausted, 4 fractal output not writable, 5 bench case
// outside its tolerance band.
int cli_main(int argc, const char* const* argv);

// "POINT x=(<x1>,..) f=<f>" — the final iterate and its value.
std::string format_point_line(const OptimizerTrace& trace);

// "RESULT <objective> <optimizer> iters=<k> grad=<g> status=<s>"
std::string format_result_line(const std::string& objective,
                               const std::string& optimizer,
                               const OptimizerTrace& trace);

}  // namespace newton3
