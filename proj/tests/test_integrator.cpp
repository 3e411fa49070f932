#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kdvdg/integrator.hpp"
#include "kdvdg/problems.hpp"

using namespace kdvdg;
using Eigen::VectorXd;

namespace {

ProblemSpec constant_data_problem(double value) {
  ProblemSpec prob;
  prob.name = "constant";
  prob.domain_a = 0.0;
  prob.domain_b = 1.0;
  prob.eps = 1.0;
  prob.f = [](double u) { return 0.5 * u * u; };
  prob.f_prime = [](double u) { return u; };
  prob.V = [](double u) { return u * u * u / 6.0; };
  prob.u0 = [value](double) { return value; };
  return prob;
}

}  // namespace

TEST_CASE("uniform jump derivative is exact for quadratic histories") {
  // j(t) = t^2 sampled at t = 0, 0.05, 0.1 with dt = 0.1: derivative 0.2.
  const double dt = 0.1;
  VectorXd j_prev_half(1), j_prev_whole(1), j_now(1);
  j_prev_half << 0.0;
  j_prev_whole << 0.0025;
  j_now << 0.01;
  const JumpTimeClosure cl = uniform_jump_t(j_prev_half, j_prev_whole, dt);
  CHECK(cl.unknown_coeff * j_now(0) + cl.known(0) == doctest::Approx(0.2).epsilon(1e-14));

  // Constant history: zero derivative.
  VectorXd c(3);
  c << 4.0, 4.0, 4.0;
  const JumpTimeClosure cc = uniform_jump_t(c, c, dt);
  CHECK((cc.unknown_coeff * c + cc.known).lpNorm<Eigen::Infinity>() ==
        doctest::Approx(0.0).epsilon(1e-13));

  // Linear history j(t) = t: derivative 1.
  VectorXd l0(1), l1(1), l2(1);
  l0 << 0.0;
  l1 << 0.05;
  l2 << 0.1;
  const JumpTimeClosure lc = uniform_jump_t(l0, l1, dt);
  CHECK(lc.unknown_coeff * l2(0) + lc.known(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("nonuniform jump derivative matches its printed weights") {
  const double dt = 0.1;
  const auto [c1, c2, c3] = nonuniform_jump_t_coeffs(dt);
  const double s = 0.05;
  CHECK(c1 == doctest::Approx((1.0 - s) / (s * s)));
  CHECK(c2 == doctest::Approx(-1.0 / (s * s * (1.0 - s))));
  CHECK(c3 == doctest::Approx((2.0 - s) / (s * (1.0 - s))));
  CHECK(c1 + c2 + c3 == doctest::Approx(0.0).epsilon(1e-10));

  // Exact on j(t) = 1, t, t^2 over the stencil t = 0, s^2, s.
  auto eval = [&](auto j) {
    VectorXd j0(1), jd(1), jh(1);
    j0 << j(0.0);
    jd << j(s * s);
    jh << j(s);
    const JumpTimeClosure cl = nonuniform_jump_t(j0, jd, dt);
    return cl.unknown_coeff * jh(0) + cl.known(0);
  };
  CHECK(eval([](double) { return 1.0; }) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval([](double t) { return t; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval([](double t) { return t * t; }) == doctest::Approx(2.0 * s).epsilon(1e-12));

  CHECK_THROWS_AS(nonuniform_jump_t_coeffs(2.0), std::invalid_argument);
}

TEST_CASE("both stencils are exact on random quadratic jump histories") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = dist(rng), b = dist(rng), c = dist(rng);
    auto j = [&](double t) { return a + b * t + c * t * t; };
    auto djdt = [&](double t) { return b + 2.0 * c * t; };
    const double dt = 0.08;

    const double t_half = 1.3;  // arbitrary current half level
    VectorXd jm(1), jw(1), jh(1);
    jm << j(t_half - dt);
    jw << j(t_half - 0.5 * dt);
    jh << j(t_half);
    const JumpTimeClosure uc = uniform_jump_t(jm, jw, dt);
    CHECK(uc.unknown_coeff * jh(0) + uc.known(0) ==
          doctest::Approx(djdt(t_half)).epsilon(1e-12));

    const double s = 0.5 * dt;
    VectorXd j0(1), jd(1), js(1);
    j0 << j(0.0);
    jd << j(s * s);
    js << j(s);
    const JumpTimeClosure nc = nonuniform_jump_t(j0, jd, dt);
    CHECK(nc.unknown_coeff * js(0) + nc.known(0) ==
          doctest::Approx(djdt(s)).epsilon(1e-12));
  }
}

TEST_CASE("startup reproduces initial data already in the DG space") {
  ProblemSpec prob = constant_data_problem(0.0);
  prob.u0 = [](double x) { return 0.25 + 0.5 * x; };  // degree 1 <= k
  const Mesh mesh = Mesh::uniform(0.0, 1.0, 4);
  Simulation sim(prob, mesh, 2, {0.05, 0.0, SolverConfig{}});
  sim.startup();
  const QuadratureRule probe = gauss_rule(4);
  for (int e = 0; e < 4; ++e) {
    for (int iq = 0; iq < probe.count(); ++iq) {
      const double xi = probe.nodes(iq);
      const double x = mesh.to_physical(e, xi);
      CHECK(eval_field(sim.u(), 2, e, xi) == doctest::Approx(prob.u0(x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("startup mass of the projected sine is zero") {
  const ProblemSpec prob = linear_problem();
  const Mesh mesh = Mesh::uniform(prob.domain_a, prob.domain_b, 8);
  Simulation sim(prob, mesh, 2, {0.025, 0.0, SolverConfig{}});
  sim.startup();
  CHECK(std::abs(mass(sim.ops(), sim.u())) < 1e-12);
}

TEST_CASE("backward Euler startup state is first order in its tiny step") {
  const ProblemSpec prob = linear_problem();
  const Mesh mesh = Mesh::uniform(prob.domain_a, prob.domain_b, 16);
  double diffs[2];
  int idx = 0;
  for (double dt : {0.05, 0.025}) {
    Simulation sim(prob, mesh, 2, {dt, dt, SolverConfig{}});
    sim.startup();
    diffs[idx++] = (sim.jumps_startup_state() - sim.jumps_initial()).norm();
  }
  // The startup step is (dt/2)^2, so halving dt shrinks the change ~4x.
  CHECK(diffs[0] / diffs[1] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("zero data stays identically zero") {
  const ProblemSpec prob = constant_data_problem(0.0);
  const Mesh mesh = Mesh::uniform(0.0, 1.0, 4);
  Simulation sim = run(prob, mesh, 2, 0.05, 0.5);
  CHECK(sim.u().lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
  CHECK(sim.q().lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
  for (const auto& rec : sim.invariants()) {
    CHECK(rec.mass == doctest::Approx(0.0));
    CHECK(rec.energy == doctest::Approx(0.0));
    CHECK(rec.hamiltonian == doctest::Approx(0.0));
    CHECK(rec.tau_qu == 0.0);
    CHECK(rec.tau_pu == 0.0);
  }
}

TEST_CASE("constant data runs the degenerate branch with flat invariants") {
  const ProblemSpec prob = constant_data_problem(2.0);
  const Mesh mesh = Mesh::uniform(0.0, 1.0, 8);
  Simulation sim = run(prob, mesh, 2, 0.05, 1.0);
  REQUIRE(sim.invariants().size() == 21);
  const auto& first = sim.invariants().front();
  for (const auto& rec : sim.invariants()) {
    CHECK(rec.tau_qu == 0.0);
    CHECK(rec.tau_pu == 0.0);
    CHECK(std::abs(rec.mass - first.mass) < 1e-12 * (1.0 + std::abs(first.mass)));
    CHECK(std::abs(rec.energy - first.energy) < 1e-12 * (1.0 + std::abs(first.energy)));
    CHECK(std::abs(rec.hamiltonian - first.hamiltonian) <
          1e-12 * (1.0 + std::abs(first.hamiltonian)));
  }
}

TEST_CASE("T = 0 yields only the initial record") {
  const ProblemSpec prob = linear_problem();
  const Mesh mesh = Mesh::uniform(prob.domain_a, prob.domain_b, 8);
  Simulation sim = run(prob, mesh, 2, 0.05, 0.0);
  CHECK(sim.total_steps() == 0);
  CHECK(sim.invariants().size() == 1);
  CHECK(sim.invariants().front().t == 0.0);
  CHECK(sim.time() == 0.0);
}

TEST_CASE("step count comes from rounding T over dt") {
  const ProblemSpec prob = linear_problem();
  const Mesh mesh = Mesh::uniform(prob.domain_a, prob.domain_b, 8);
  // Target dt larger than T still takes one step that lands on T.
  Simulation sim(prob, mesh, 0, {0.2, 0.1, SolverConfig{}});
  CHECK(sim.total_steps() == 1);
  CHECK(sim.dt() == doctest::Approx(0.1));
  Simulation sim2(prob, mesh, 2, {0.025, 0.1, SolverConfig{}});
  CHECK(sim2.total_steps() == 4);
  CHECK(sim2.dt() == doctest::Approx(0.025));

  CHECK_THROWS_AS(Simulation(prob, mesh, 2, {2.5, 5.0, SolverConfig{}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Simulation(prob, mesh, 2, {0.0, 1.0, SolverConfig{}}),
                  std::invalid_argument);
}

TEST_CASE("linear problem run lands near the paper's accuracy") {
  const ProblemSpec prob = linear_problem();
  const Mesh mesh = Mesh::uniform(prob.domain_a, prob.domain_b, 16);
  Simulation sim = run(prob, mesh, 2, default_time_step(prob, 2, 16), 0.1);
  const auto errs = sim.errors_vs_exact();
  CHECK(errs.u > 4.84e-4 / 3.0);
  CHECK(errs.u < 4.84e-4 * 3.0);
}

TEST_CASE("energy and mass stay put over a short linear run") {
  const ProblemSpec prob = linear_problem();
  const Mesh mesh = Mesh::uniform(prob.domain_a, prob.domain_b, 16);
  Simulation sim = run(prob, mesh, 2, default_time_step(prob, 2, 16), 1.0);
  const auto& log = sim.invariants();
  const double e0 = log.front().energy;
  const double m0 = log.front().mass;
  for (const auto& rec : log) {
    CHECK(std::abs(rec.energy - e0) < 1e-10 * (1.0 + std::abs(e0)));
    CHECK(std::abs(rec.mass - m0) < 1e-11 * (1.0 + std::abs(m0)));
    CHECK(rec.constraint_residual_energy < 1e-10);
    CHECK(rec.constraint_residual_hamiltonian < 1e-10);
    CHECK(rec.energy >= 0.0);
  }
  // Times strictly increasing.
  for (size_t i = 1; i < log.size(); ++i) CHECK(log[i].t > log[i - 1].t);
}

TEST_CASE("sampling reproduces the projection at t = 0") {
  const ProblemSpec prob = linear_problem();
  const Mesh mesh = Mesh::uniform(prob.domain_a, prob.domain_b, 8);
  Simulation sim(prob, mesh, 2, {0.05, 0.0, SolverConfig{}});
  sim.startup();
  const auto snap = sim.sample(10);
  REQUIRE(snap.x.size() == 80);
  for (int i = 0; i < snap.x.size(); ++i) {
    CHECK(std::abs(snap.u(i) - prob.exact->u(snap.x(i), 0.0)) < 5e-3);
  }
  CHECK_THROWS_AS(sim.sample(0), std::invalid_argument);
}

TEST_CASE("errors_vs_exact demands an exact solution") {
  const ProblemSpec prob = constant_data_problem(1.0);
  const Mesh mesh = Mesh::uniform(0.0, 1.0, 4);
  Simulation sim(prob, mesh, 1, {0.05, 0.0, SolverConfig{}});
  sim.startup();
  CHECK_THROWS_AS(sim.errors_vs_exact(), std::logic_error);
}
