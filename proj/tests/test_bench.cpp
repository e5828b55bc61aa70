#include "newton3/bench.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <doctest.h>

using namespace newton3;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  std::ofstream out(name);
  out << text;
  return name;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& text)
      : path(write_temp(name, text)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE_BEGIN("bench");

TEST_CASE("suite files parse sections, comments and bounds") {
  TempFile f("suite_parse.txt", R"(# reference run
[case]
objective = himmelblau
optimizer = ton
x0 = 2, 1        # start
eps = 1e-6
shifts = 0, 5, 10
expected = 3
band_abs = 1

[case]
objective = quadratic
optimizer = gd
x0 = 1,0
step = 1e-4
eps = 1e-12
expected = >=50
)");
  const auto cases = load_suite_file(f.path);
  REQUIRE(cases.size() == 2);

  CHECK(cases[0].objective == "himmelblau");
  CHECK(cases[0].optimizer == "ton");
  CHECK(cases[0].x0.size() == 2);
  CHECK(cases[0].x0[0] == 2.0);
  CHECK(cases[0].cfg.grad_eps == 1e-6);
  CHECK(cases[0].cfg.shifts == std::vector<double>{0, 5, 10});
  CHECK(cases[0].has_expectation);
  CHECK_FALSE(cases[0].expected.lower_bound);
  CHECK(cases[0].expected.value == 3);
  CHECK(cases[0].band_abs == 1);
  CHECK(cases[0].band_pct == 0);

  CHECK(cases[1].optimizer == "gd");
  CHECK(cases[1].cfg.step_size == 1e-4);
  CHECK(cases[1].expected.lower_bound);
  CHECK(cases[1].expected.value == 50);
  CHECK(cases[1].cfg.max_iters == 50);  // bound doubles as the iteration cap
  CHECK(cases[1].band_abs == 3);        // family default
  CHECK(cases[1].band_pct == 15);
}

TEST_CASE("malformed suites are rejected") {
  {
    TempFile f("suite_bad1.txt",
               "[case]\nobjective = beale\noptimizer = ton\nx0 = 1,1\nfoo = 3\n");
    CHECK_THROWS_AS(load_suite_file(f.path), std::runtime_error);
  }
  {
    TempFile f("suite_bad2.txt", "[case]\nobjective = beale\noptimizer = ton\n");
    CHECK_THROWS_AS(load_suite_file(f.path), std::runtime_error);
  }
  {
    TempFile f("suite_bad3.txt",
               "[case]\nobjective = beale\noptimizer = gd\nx0 = 1,1\n");
    CHECK_THROWS_AS(load_suite_file(f.path), std::runtime_error);
  }
  {
    TempFile f("suite_bad4.txt",
               "[case]\nobjective = nope\noptimizer = ton\nx0 = 1,1\n");
    CHECK_THROWS_AS(load_suite_file(f.path), std::runtime_error);
  }
  {
    TempFile f("suite_bad5.txt",
               "[case]\nobjective = beale\noptimizer = tron\nx0 = 1,1\n");
    CHECK_THROWS_AS(load_suite_file(f.path), std::runtime_error);
  }
  {
    TempFile f("suite_bad6.txt", "x0 = 1,1\n");
    CHECK_THROWS_AS(load_suite_file(f.path), std::runtime_error);
  }
}

TEST_CASE("an empty suite yields a header-only report") {
  TempFile f("suite_empty.txt", "# nothing here\n\n");
  const auto cases = load_suite_file(f.path);
  CHECK(cases.empty());
  std::ostringstream out;
  write_report(run_suite(cases, 1), out);
  CHECK(out.str() ==
        "objective,optimizer,x0,iterations,termination,expected,within_band\n");
}

TEST_CASE("band checks accept hits and flag misses") {
  BenchCase c;
  c.objective = "quadratic";
  c.optimizer = "newton2";
  c.x0 = dvec(2);
  c.x0 << 1, 1;
  c.has_expectation = true;
  c.expected = {false, 1};
  c.band_abs = 0;

  auto res = run_suite({c}, 1);
  REQUIRE(res.size() == 1);
  CHECK(res[0].iterations == 1);
  CHECK(res[0].termination == Termination::Converged);
  CHECK(res[0].within_band);

  c.expected.value = 5;  // same run, unattainable expectation
  res = run_suite({c}, 1);
  CHECK_FALSE(res[0].within_band);

  c.expected.value = 3;
  c.band_abs = 2;  // |1 - 3| <= 2
  res = run_suite({c}, 1);
  CHECK(res[0].within_band);
}

TEST_CASE("lower bounds require the run to still be unconverged") {
  BenchCase c;
  c.objective = "quadratic";
  c.optimizer = "gd";
  c.x0 = dvec(2);
  c.x0 << 1, 0;
  c.cfg.step_size = 1e-4;
  c.cfg.grad_eps = 1e-12;
  c.cfg.max_iters = 50;
  c.has_expectation = true;
  c.expected = {true, 50};

  auto res = run_suite({c}, 1);
  REQUIRE(res.size() == 1);
  CHECK(res[0].iterations == 50);
  CHECK(res[0].termination == Termination::MaxIterations);
  CHECK(res[0].within_band);

  c.cfg.step_size = 1.0;  // converges immediately: the bound now fails
  res = run_suite({c}, 1);
  CHECK(res[0].termination == Termination::Converged);
  CHECK_FALSE(res[0].within_band);
}

TEST_CASE("reference suite layout") {
  const auto cases = reference_suite();
  CHECK(cases.size() == 108);
  int ton = 0, n2 = 0, gd = 0, qfit = 0;
  for (const auto& c : cases) {
    ton += c.optimizer == "ton";
    n2 += c.optimizer == "newton2";
    gd += c.optimizer == "gd";
    qfit += c.optimizer == "qfit";
    CHECK(c.has_expectation);
  }
  CHECK(ton == 16);
  CHECK(n2 == 16);
  CHECK(gd == 60);
  CHECK(qfit == 16);

  CHECK(cases[0].objective == "bohachevsky");
  CHECK(cases[0].optimizer == "ton");
  CHECK(cases[0].x0[0] == 0.1);
  CHECK(cases[0].x0[1] == 0.05);
  CHECK(cases[0].expected.value == 4);
  CHECK(cases[0].band_abs == 2);

  int short_ladders = 0;
  for (const auto& c : cases)
    if (c.optimizer == "ton" && c.cfg.shifts == std::vector<double>{0, 10}) {
      ++short_ladders;
      CHECK(c.objective == "beale");
      CHECK(c.x0[0] == 3.2);
    }
  CHECK(short_ladders == 1);

  int bounds = 0;
  for (const auto& c : cases)
    if (c.expected.lower_bound) {
      ++bounds;
      CHECK(c.optimizer == "gd");
      CHECK(c.cfg.max_iters == c.expected.value);
    }
  CHECK(bounds == 11);  // 3 slow bohachevsky + 4 beale + 4 himmelblau rows
}

TEST_CASE("suite results do not depend on worker count") {
  auto cases = reference_suite();
  cases.resize(8);  // a fast deterministic prefix
  const auto serial = run_suite(cases, 1);
  const auto parallel = run_suite(cases, 4);
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].iterations == parallel[i].iterations);
    CHECK(serial[i].termination == parallel[i].termination);
    CHECK(serial[i].within_band == parallel[i].within_band);
  }
}

TEST_CASE("report rows include step size and quoted starts") {
  BenchCase c;
  c.objective = "bohachevsky";
  c.optimizer = "gd";
  c.x0 = dvec(2);
  c.x0 << 0.15, 0;
  c.cfg.step_size = 0.05;
  c.cfg.grad_eps = 1e-5;
  c.cfg.max_iters = 4000;
  c.has_expectation = true;
  c.expected = {false, 15};
  c.band_abs = 3;
  c.band_pct = 15;

  std::ostringstream out;
  write_report(run_suite({c}, 1), out);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  REQUIRE(std::getline(in, row));
  CHECK(row.rfind("bohachevsky,gd[c=0.05],\"0.15,0\",", 0) == 0);
  CHECK(row.find(",Converged,15,1") != std::string::npos);
}

TEST_SUITE_END();
