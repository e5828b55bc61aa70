#include "newton3/sdp.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "newton3/cubic_localmin.hpp"
#include "test_util.hpp"

using namespace newton3;
using namespace newton3::testutil;

TEST_SUITE_BEGIN("sdp");

TEST_CASE("svec/smat are inverse isometries") {
  std::mt19937_64 rng(11);
  for (int s = 1; s <= 5; ++s) {
    const dmat M = uniform_sym(rng, s, -2, 2), N = uniform_sym(rng, s, -2, 2);
    CHECK((smat(svec(M), s) - M).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(svec(M).dot(svec(N)) ==
          doctest::Approx(M.cwiseProduct(N).sum()).epsilon(1e-12));
  }
}

TEST_CASE("linear functionals evaluate over assignments") {
  LinFun f;
  f.add(0, 1, 0, 2.0);  // normalized to (0,1), counts the stored entry once
  f.add_free(1, -3.0);
  f.constant = 0.25;
  SdpAssignment a;
  a.free_vars = dvec::Zero(2);
  a.free_vars[1] = 2.0;
  std::mt19937_64 rng(1);
  a.blocks = {uniform_sym(rng, 2, -1, 1)};
  a.blocks[0](0, 1) = a.blocks[0](1, 0) = 0.5;
  CHECK(evaluate(f, a) == doctest::Approx(2.0 * 0.5 - 3.0 * 2.0 + 0.25));
}

TEST_CASE("minimal cone program: min t with [[t]] psd") {
  SdpProblem p;
  SdpBlock b;
  b.size = 1;
  p.blocks.push_back(b);
  p.objective.add(0, 0, 0, 1.0);
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(std::abs(sol.objective_value) <= 1e-6);
  CHECK(sol.min_block_eigenvalue >= -1e-8);
}

TEST_CASE("trace minimization pins the constrained entry") {
  SdpProblem p;
  SdpBlock b;
  b.size = 2;
  p.blocks.push_back(b);
  p.objective.add(0, 0, 0, 1.0);
  p.objective.add(0, 1, 1, 1.0);
  LinFun pin;
  pin.add(0, 0, 0, 1.0);
  p.eq_constraints.emplace_back(pin, 1.0);

  const SdpSolution sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.max_eq_residual <= 1e-8);
  CHECK(sol.min_block_eigenvalue >= -1e-8);
  CHECK(sol.primal.blocks[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(sol.primal.blocks[0](0, 1)) <= 1e-4);
  CHECK(std::abs(sol.primal.blocks[0](1, 1)) <= 1e-4);

  // Deterministic: a second solve reproduces the numbers bit for bit.
  const SdpSolution sol2 = solve(p);
  CHECK(sol.objective_value == sol2.objective_value);
  CHECK((sol.primal.blocks[0] - sol2.primal.blocks[0]).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("affine block lowered to a tied matrix variable") {
  // minimize t subject to [[2t - 1]] psd  =>  t -> 1/2.
  SdpProblem p;
  p.free_dim = 1;
  SdpBlock b;
  b.size = 1;
  b.affine = true;
  LinFun entry;
  entry.add_free(0, 2.0);
  entry.constant = -1.0;
  b.entries.push_back(entry);
  p.blocks.push_back(b);
  p.objective.add_free(0, 1.0);

  const StandardForm sf = assemble_standard_form(p);
  CHECK(sf.block_sizes == std::vector<int>{1});
  CHECK(sf.free_dim == 1);
  CHECK(sf.A.rows() == 1);  // one tying equality
  CHECK(sf.rhs[0] == doctest::Approx(-1.0));

  const SdpSolution sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(0.5).epsilon(1e-6));
  const VerifyReport rep = verify_assignment(p, sol.primal);
  CHECK(rep.max_eq_residual <= 1e-7);
  CHECK(rep.min_block_eigenvalue >= -1e-8);
}

TEST_CASE("certificate program shapes for small cubics") {
  std::mt19937_64 rng(21);
  {
    const CubicModel m = embed_univariate(1.0 / 6.0, 0, -1, 0);
    const SdpProblem p = build_sdp(m);
    CHECK(p.free_dim == 2);
    REQUIRE(p.blocks.size() == 2);
    CHECK(p.blocks[0].size == 2);
    CHECK(p.blocks[0].affine);
    CHECK(p.blocks[1].size == 2);
    CHECK_FALSE(p.blocks[1].affine);
    CHECK(p.eq_constraints.size() == 3);  // gradient + border tie + corner pin
    const StandardForm sf = assemble_standard_form(p);
    CHECK(sf.A.rows() == 6);
    CHECK(sf.svec_dim == 6);
  }
  {
    const CubicModel m = make_cubic_model(
        uniform_tensor(rng, 2, -1, 1), uniform_sym(rng, 2, -1, 1),
        uniform_vec(rng, 2, -1, 1), 0.0);
    const StandardForm sf = assemble_standard_form(build_sdp(m));
    CHECK(sf.A.rows() == 11);
    CHECK(sf.free_dim == 3);
  }
}

TEST_CASE("hand-built feasible certificate point for p = x^3/6 - x") {
  const CubicModel m = embed_univariate(1.0 / 6.0, 0, -1, 0);
  const SdpProblem p = build_sdp(m);
  const double r2 = std::sqrt(2.0);
  SdpAssignment a;
  a.free_vars = dvec(2);
  a.free_vars << r2, 2.0 * r2;  // x = sqrt(2), y = 2 sqrt(2)
  dmat hessb(2, 2), moment(2, 2);
  hessb << r2, 2.0, 2.0, 2.0 * r2;
  moment << 2.0, r2, r2, 1.0;
  a.blocks = {hessb, moment};

  const VerifyReport rep = verify_assignment(p, a);
  CHECK(rep.max_eq_residual <= 1e-9);
  CHECK(rep.min_block_eigenvalue >= -1e-9);
  CHECK(std::abs(rep.objective_value) <= 1e-12);  // phi = 0 at the minimizer
}

TEST_CASE("debug dump lists canonical nonzeros") {
  SdpProblem p;
  SdpBlock b;
  b.size = 2;
  p.blocks.push_back(b);
  p.objective.add(0, 0, 0, 1.0);
  p.objective.add(0, 1, 1, 1.0);
  LinFun pin;
  pin.add(0, 0, 0, 1.0);
  p.eq_constraints.emplace_back(pin, 1.0);

  const std::string path = "dump_test.txt";
  write_debug_dump(assemble_standard_form(p), path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "-1 0 0 0 1");
  CHECK(lines[1] == "-1 0 1 1 1");
  CHECK(lines[2] == "0 0 0 0 1");
  CHECK(lines[3] == "0 -2 0 0 1");
  std::remove(path.c_str());
}

TEST_CASE("complementarity measure decreases monotonically") {
  std::mt19937_64 rng(31);
  const KnownSdp k = random_known_sdp(rng, 1, 3, 0);
  const SdpSolution sol = solve(k.problem);
  REQUIRE(sol.status == SdpStatus::Optimal);
  for (size_t i = 0; i + 1 < sol.mu_history.size(); ++i)
    CHECK(sol.mu_history[i + 1] <= 1.01 * sol.mu_history[i] + 1e-12);
}

TEST_CASE("recovers known optima of random cone programs") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const int nb = 1 + trial % 2;
    const int m = 2 + trial % 5;
    const int nf = trial % 2 == 0 ? 0 : 1;
    const KnownSdp k = random_known_sdp(rng, nb, m, nf);
    const SdpSolution sol = solve(k.problem);
    REQUIRE(sol.status == SdpStatus::Optimal);
    CHECK(std::abs(sol.objective_value - k.optimal_value) <=
          1e-6 * (1 + std::abs(k.optimal_value)));
    CHECK(sol.max_eq_residual <= 1e-8);
    CHECK(sol.min_block_eigenvalue >= -1e-8);
    CHECK(sol.relative_gap <= 1e-7);
  }
}

TEST_SUITE_END();
