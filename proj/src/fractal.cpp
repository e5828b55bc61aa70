#include "newton3/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace newton3 {
namespace {

const std::array<std::array<unsigned char, 3>, 8> kPalette = {{
    {0, 0, 0},        // black: designated global minimum
    {0, 0, 255},      // blue
    {220, 50, 47},    // red
    {0, 160, 0},      // green
    {255, 140, 0},    // orange
    {128, 0, 128},    // purple
    {0, 180, 180},    // cyan
    {240, 200, 0},    // yellow
}};

int match_catalogue(const std::vector<CatalogueEntry>& cat, const dvec& p,
                    double radius) {
  int best = -1;
  double best_d = radius;
  for (int i = 0; i < static_cast<int>(cat.size()); ++i) {
    const double d = (cat[i].point - p).norm();
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::array<unsigned char, 3> label_color(int label) {
  if (label < 0) return {255, 255, 255};
  if (label == 0) return kPalette[0];
  return kPalette[1 + (label - 1) % 7];
}

FractalImage render(const FractalSpec& spec) {
  FractalImage img;
  img.width = spec.width;
  img.height = spec.height;
  img.window = spec.window;
  img.labels.assign(static_cast<size_t>(spec.width) * spec.height, -1);
  for (const CriticalPoint& p : spec.objective.minima())
    img.catalogue.push_back({p.x, true});

  OptimizerConfig cfg = spec.run_cfg;
  switch (spec.kind) {
    case FractalOptimizerKind::SecondOrder:
      break;
    case FractalOptimizerKind::ThirdOrder:
      cfg.shifts = {0.0};
      break;
    case FractalOptimizerKind::ThirdOrderShift:
      cfg.shifts = {0.0, spec.shift};
      break;
  }

  const double px = (spec.window.xhi - spec.window.xlo) / spec.width;
  const double py = (spec.window.yhi - spec.window.ylo) / spec.height;

  // Limits that converged but matched no seeded entry; resolved serially
  // afterwards so discovered labels never depend on thread interleaving.
  std::vector<dvec> pending(img.labels.size());

  auto run_rows = [&](int row_begin, int row_end) {
    for (int row = row_begin; row < row_end; ++row)
      for (int col = 0; col < spec.width; ++col) {
        dvec x0(2);
        x0 << spec.window.xlo + (col + 0.5) * px,
            spec.window.yhi - (row + 0.5) * py;
        const OptimizerTrace t =
            spec.kind == FractalOptimizerKind::SecondOrder
                ? second_order_newton(spec.objective, x0, cfg)
                : third_order_newton(spec.objective, x0, cfg);
        if (t.termination != Termination::Converged) continue;
        const dvec& limit = t.iterates.back();
        const int hit = match_catalogue(img.catalogue, limit, spec.match_radius);
        if (hit >= 0)
          img.labels[row * spec.width + col] = hit;
        else
          pending[row * spec.width + col] = limit;
      }
  };

  int nthreads = spec.threads > 0
                     ? spec.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, spec.height));
  if (nthreads == 1) {
    run_rows(0, spec.height);
  } else {
    std::vector<std::thread> workers;
    const int chunk = (spec.height + nthreads - 1) / nthreads;
    for (int i = 0; i < nthreads; ++i) {
      const int lo = i * chunk, hi = std::min(spec.height, lo + chunk);
      if (lo < hi) workers.emplace_back(run_rows, lo, hi);
    }
    for (std::thread& w : workers) w.join();
  }

  // Row-major resolution of discovered minima.
  for (size_t i = 0; i < pending.size(); ++i) {
    if (pending[i].size() == 0) continue;
    int hit = match_catalogue(img.catalogue, pending[i], spec.match_radius);
    if (hit < 0) {
      hit = static_cast<int>(img.catalogue.size());
      img.catalogue.push_back({pending[i], false});
    }
    img.labels[i] = hit;
  }
  return img;
}

bool write_ppm(const FractalImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<size_t>(img.width) * 3);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const auto rgb = label_color(img.label_at(r, c));
      row[3 * c] = rgb[0];
      row[3 * c + 1] = rgb[1];
      row[3 * c + 2] = rgb[2];
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  return out.good();
}

Window contain_point(Window w, const dvec& p, int width, int height) {
  const double px = (w.xhi - w.xlo) / width;
  const double py = (w.yhi - w.ylo) / height;
  auto shift = [](double& lo, double& hi, double x, double step) {
    double k = 0;
    if (x < lo)
      k = std::ceil((lo - x) / step);
    else if (x >= hi)
      k = -std::ceil((x - hi) / step + 1);
    lo -= k * step;
    hi -= k * step;
  };
  shift(w.xlo, w.xhi, p[0], px);
  shift(w.ylo, w.yhi, p[1], py);
  return w;
}

dvec pixel_center(const Window& w, const dvec& p, int width, int height) {
  const double px = (w.xhi - w.xlo) / width;
  const double py = (w.yhi - w.ylo) / height;
  int col = static_cast<int>(std::floor((p[0] - w.xlo) / px));
  int row = static_cast<int>(std::floor((w.yhi - p[1]) / py));
  col = std::min(width - 1, std::max(0, col));
  row = std::min(height - 1, std::max(0, row));
  dvec c(2);
  c << w.xlo + (col + 0.5) * px, w.yhi - (row + 0.5) * py;
  return c;
}

bool write_csv(const FractalImage& img, const std::string& path) {
  std::ofstream out(path);
  if (!out) return false;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c)
      out << (c ? "," : "") << img.label_at(r, c);
    out << "\n";
  }
  char buf[96];
  for (int i = 0; i < static_cast<int>(img.catalogue.size()); ++i) {
    const CatalogueEntry& e = img.catalogue[i];
    std::snprintf(buf, sizeof buf, "# %d,%.17g,%.17g,%s\n", i, e.point[0],
                  e.point[1], e.named ? "named" : "discovered");
    out << buf;
  }
  return out.good();
}

}  // namespace newton3
