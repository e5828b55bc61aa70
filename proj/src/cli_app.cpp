#include "newton3/cli_app.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "newton3/bench.hpp"
#include "newton3/fractal.hpp"

namespace newton3 {
namespace {

dvec parse_point(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  return Eigen::Map<const dvec>(vals.data(), vals.size());
}

int exit_code(Termination t) {
  switch (t) {
    case Termination::Converged: return 0;
    case Termination::StepFailed: return 2;
    case Termination::MaxIterations: return 3;
  }
  return 3;
}

std::string sidecar_csv_path(std::string path) {
  const size_t dot = path.rfind('.');
  const size_t slash = path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    path.erase(dot);
  return path + ".csv";
}

int run_minimize(const std::string& objective, const std::string& optimizer,
                 const std::string& x0_str, const OptimizerConfig& cfg,
                 bool has_step, const std::string& trace_path) {
  const auto obj = find_objective(objective);
  if (!obj) {
    std::cerr << "unknown objective: " << objective << "\n";
    return 1;
  }
  dvec x0;
  try {
    x0 = parse_point(x0_str);
  } catch (const std::exception&) {
    std::cerr << "bad --x0 value: " << x0_str << "\n";
    return 1;
  }
  if (static_cast<int>(x0.size()) != obj->dim) {
    std::cerr << "--x0 needs " << obj->dim << " components\n";
    return 1;
  }
  if (optimizer == "gd" && !has_step) {
    std::cerr << "gd needs --step\n";
    return 1;
  }

  OptimizerTrace t;
  if (optimizer == "ton") {
    t = third_order_newton(*obj, x0, cfg);
  } else if (optimizer == "newton2") {
    t = second_order_newton(*obj, x0, cfg);
  } else if (optimizer == "gd") {
    t = gradient_descent_fixed(*obj, x0, cfg);
  } else if (optimizer == "qfit") {
    t = gradient_descent_qfit(*obj, x0, cfg);
  } else {
    std::cerr << "unknown optimizer: " << optimizer << "\n";
    return 1;
  }

  std::cout << format_point_line(t) << "\n"
            << format_result_line(objective, optimizer, t) << "\n";
  if (!trace_path.empty() && !write_trace_csv(t, trace_path)) {
    std::cerr << "cannot write trace: " << trace_path << "\n";
    return 1;
  }
  return exit_code(t.termination);
}

int run_fractal(const std::string& objective, const std::string& optimizer,
                double shift, const std::string& window_str,
                const std::string& res_str, const std::string& out_path) {
  const auto obj = find_objective(objective);
  if (!obj) {
    std::cerr << "unknown objective: " << objective << "\n";
    return 1;
  }
  FractalSpec spec;
  spec.objective = *obj;
  spec.window = obj->window;
  if (optimizer == "newton2") {
    spec.kind = FractalOptimizerKind::SecondOrder;
  } else if (optimizer == "ton") {
    spec.kind = shift > 0.0 ? FractalOptimizerKind::ThirdOrderShift
                            : FractalOptimizerKind::ThirdOrder;
    spec.shift = shift;
  } else {
    std::cerr << "fractal optimizer must be ton or newton2\n";
    return 1;
  }
  if (!window_str.empty()) {
    try {
      const dvec w = parse_point(window_str);
      if (w.size() != 4) throw std::runtime_error("size");
      spec.window = {w[0], w[1], w[2], w[3]};
    } catch (const std::exception&) {
      std::cerr << "bad --window (need x0,x1,y0,y1)\n";
      return 1;
    }
  }
  if (!res_str.empty()) {
    int w = 0, h = 0;
    if (std::sscanf(res_str.c_str(), "%dx%d", &w, &h) != 2 || w <= 0 || h <= 0) {
      std::cerr << "bad --res (need WxH)\n";
      return 1;
    }
    spec.width = w;
    spec.height = h;
  }
  if (spec.window.xhi <= spec.window.xlo || spec.window.yhi <= spec.window.ylo) {
    std::cerr << "bad --window (need x0<x1, y0<y1)\n";
    return 1;
  }

  const FractalImage img = render(spec);
  const std::string csv = sidecar_csv_path(out_path);
  if (!write_ppm(img, out_path) || !write_csv(img, csv)) {
    std::cerr << "cannot write fractal output: " << out_path << "\n";
    return 4;
  }
  int converged = 0;
  for (int l : img.labels) converged += l >= 0;
  std::cout << "FRACTAL " << objective << " " << optimizer
            << " res=" << spec.width << "x" << spec.height
            << " converged=" << converged << " catalogue=" << img.catalogue.size()
            << " out=" << out_path << "\n";
  return 0;
}

int run_bench(const std::string& suite, const std::string& report_path) {
  std::vector<BenchCase> cases;
  if (suite == "paper") {
    cases = reference_suite();
  } else {
    try {
      cases = load_suite_file(suite);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 1;
    }
  }
  std::vector<BenchResult> results;
  try {
    results = run_suite(cases);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (!report_path.empty() && !write_report_file(results, report_path)) {
    std::cerr << "cannot write report: " << report_path << "\n";
    return 1;
  }
  int misses = 0;
  for (const BenchResult& r : results) misses += r.within_band ? 0 : 1;
  std::cout << "BENCH cases=" << results.size() << " misses=" << misses << "\n";
  if (misses > 0 && report_path.empty()) write_report(results, std::cout);
  return misses > 0 ? 5 : 0;
}

}  // namespace

std::string format_point_line(const OptimizerTrace& trace) {
  const dvec& x = trace.iterates.back();
  std::string pt = "POINT x=(";
  char buf[64];
  for (int i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.9g", i ? "," : "", x[i]);
    pt += buf;
  }
  std::snprintf(buf, sizeof buf, ") f=%.9g", trace.f_values.back());
  return pt + buf;
}

std::string format_result_line(const std::string& objective,
                               const std::string& optimizer,
                               const OptimizerTrace& trace) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "RESULT %s %s iters=%d grad=%.6e status=%s",
                objective.c_str(), optimizer.c_str(), trace.iterations(),
                trace.grad_norms.back(), to_string(trace.termination));
  return buf;
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"third-order Newton toolbox"};
  app.require_subcommand(1);

  std::string objective, optimizer, x0_str, trace_path;
  OptimizerConfig cfg;
  std::string shifts_str;
  bool has_step = false;
  auto* minimize = app.add_subcommand("minimize", "run one optimizer");
  minimize->add_option("--objective", objective)->required();
  minimize->add_option("--optimizer", optimizer)->required();
  minimize->add_option("--x0", x0_str)->required();
  minimize->add_option("--eps", cfg.grad_eps);
  minimize->add_option("--max-iters", cfg.max_iters);
  minimize->add_option("--step", cfg.step_size)->each([&](const std::string&) {
    has_step = true;
  });
  minimize->add_option("--shifts", shifts_str);
  minimize->add_option("--trace", trace_path);

  std::string f_objective, f_optimizer, f_window, f_res, f_out;
  double f_shift = 0.0;
  auto* fractal = app.add_subcommand("fractal", "render a basin image");
  fractal->add_option("--objective", f_objective)->required();
  fractal->add_option("--optimizer", f_optimizer)->required();
  fractal->add_option("--shift", f_shift);
  fractal->add_option("--window", f_window);
  fractal->add_option("--res", f_res);
  fractal->add_option("--out", f_out)->required();

  std::string suite = "paper", report_path;
  auto* bench = app.add_subcommand("bench", "run an iteration-count suite");
  bench->add_option("--suite", suite);
  bench->add_option("--report", report_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (minimize->parsed()) {
      if (!shifts_str.empty()) {
        try {
          const dvec s = parse_point(shifts_str);
          cfg.shifts.assign(s.data(), s.data() + s.size());
        } catch (const std::exception&) {
          std::cerr << "bad --shifts value\n";
          return 1;
        }
      }
      return run_minimize(objective, optimizer, x0_str, cfg, has_step,
                          trace_path);
    }
    if (fractal->parsed())
      return run_fractal(f_objective, f_optimizer, f_shift, f_window, f_res,
                         f_out);
    if (bench->parsed()) return run_bench(suite, report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace newton3
