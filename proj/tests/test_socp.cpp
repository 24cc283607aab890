#include <doctest.h>

#include <cmath>
#include <sstream>

#include <meran/scenario.hpp>
#include <meran/socp.hpp>

using namespace meran;

namespace {

SocpProblem min_norm_above_line() {
  // minimize ||x||^2 s.t. x0 >= 1 (as SOC: ||0|| <= x0 - 1)
  SocpProblem p;
  p.n = 2;
  p.quad_obj = Eigen::VectorXd::Ones(2);
  p.lin_obj = Eigen::VectorXd::Zero(2);
  SocConstraint s;
  s.A = Eigen::MatrixXd::Zero(1, 2);
  s.b = Eigen::VectorXd::Zero(1);
  s.c = Eigen::VectorXd::Zero(2);
  s.c(0) = 1.0;
  s.d = -1.0;
  p.socs.push_back(s);
  return p;
}

}  // namespace

TEST_CASE("unconstrained diagonal QP solves in closed form") {
  SocpProblem p;
  p.n = 2;
  p.quad_obj = Eigen::VectorXd::Ones(2);
  p.lin_obj = Eigen::VectorXd::Zero(2);
  p.lin_obj(0) = -4.0;  // min x0^2 - 4 x0 + x1^2 -> x = (2, 0)
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(sol.x(1) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(sol.objective_value == doctest::Approx(-4.0).epsilon(1e-8));
}

TEST_CASE("projection onto a halfspace") {
  auto p = min_norm_above_line();
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(sol.x(1)) < 1e-4);
  CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("second-order cone: min distance to a shifted cone") {
  // minimize x^T x subject to ||(x0 - 3, x1)|| <= x2, x2 <= 1 via cap.
  // Optimum: x2 = 1, x1 = 0, x0 = 2 -> objective 5.
  SocpProblem p;
  p.n = 3;
  p.quad_obj = Eigen::VectorXd::Ones(3);
  p.lin_obj = Eigen::VectorXd::Zero(3);
  SocConstraint s;
  s.A = Eigen::MatrixXd::Zero(2, 3);
  s.A(0, 0) = 1.0;
  s.A(1, 1) = 1.0;
  s.b = Eigen::VectorXd::Zero(2);
  s.b(0) = -3.0;
  s.c = Eigen::VectorXd::Zero(3);
  s.c(2) = 1.0;
  s.d = 0.0;
  p.socs.push_back(s);
  QuadCap cap;  // x2^2 <= 1
  cap.w = Eigen::VectorXd::Zero(3);
  cap.w(2) = 1.0;
  cap.r = Eigen::VectorXd::Zero(3);
  cap.s = 1.0;
  p.caps.push_back(cap);
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(5.0).epsilon(1e-4));
  CHECK(sol.x(0) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("contradictory cap reports infeasible") {
  auto p = min_norm_above_line();
  QuadCap cap;  // ||x||^2 <= -1
  cap.w = Eigen::VectorXd::Ones(2);
  cap.r = Eigen::VectorXd::Zero(2);
  cap.s = -1.0;
  p.caps.push_back(cap);
  auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("nonnegativity constraints are honored") {
  SocpProblem p;
  p.n = 2;
  p.quad_obj = Eigen::VectorXd::Ones(2);
  p.lin_obj = Eigen::VectorXd::Zero(2);
  p.lin_obj(0) = 3.0;  // pushes x0 negative without the bound
  p.nonneg = {0};
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x(0) >= -1e-9);
  CHECK(std::abs(sol.x(0)) < 1e-4);
}

TEST_CASE("solver contract: 10x tighter re-solve agrees within tol") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    // random feasible beamforming-like SOCP
    int n = 4;
    SocpProblem p;
    p.n = n;
    p.quad_obj = Eigen::VectorXd::Ones(n);
    p.lin_obj = Eigen::VectorXd::Zero(n);
    SocConstraint s;
    s.A = Eigen::MatrixXd::Zero(2, n);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < n; ++c) s.A(r, c) = rng.normal() * 0.3;
    s.b = Eigen::VectorXd::Zero(2);
    s.b(0) = 1.0;
    s.c = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < n; ++c) s.c(c) = rng.normal();
    s.d = 0.5;
    p.socs.push_back(s);
    auto coarse = solve(p, 1e-6);
    auto fine = solve(p, 1e-7);
    if (coarse.status != SolveStatus::Optimal ||
        fine.status != SolveStatus::Optimal)
      continue;  // random cone may be unbounded/degenerate; skip
    double scale = std::max(1.0, std::abs(fine.objective_value));
    CHECK(std::abs(coarse.objective_value - fine.objective_value) <=
          1e-5 * scale);
  }
}

TEST_CASE("complex embedding round trip") {
  Rng rng(23);
  CVector v(5);
  for (int e = 0; e < 5; ++e) v(e) = rng.cn01();
  auto x = embed_complex(v);
  auto back = lift_complex(x, 0, 5);
  CHECK((back - v).norm() < 1e-15);

  // Rate SOC residual computed through the embedding matches the complex
  // formula within 1e-10.
  CVector h(5);
  for (int e = 0; e < 5; ++e) h(e) = rng.cn01();
  double target = 3e5, bandwidth = 1e7;
  auto soc = build_rate_soc(h, {0}, 0, target, 1.0, bandwidth, 10);
  double lhs = (soc.A * x + soc.b).norm();
  double rhs = soc.c.dot(x) + soc.d;
  double coef = std::sqrt(1.0 - std::exp2(-target / bandwidth));
  double lhs_c = coef * std::sqrt(std::norm(h.dot(v)) + 1.0);
  double rhs_c = h.dot(v).real();
  CHECK(lhs == doctest::Approx(lhs_c).epsilon(1e-10));
  CHECK(rhs == doctest::Approx(rhs_c).epsilon(1e-10));
}

TEST_CASE("single-user rate SOC reproduces the closed-form power") {
  // min ||v||^2 s.t. sqrt(1-2^(-R/B))*||[h^H v; sigma]|| <= Re(h^H v)
  // has optimum ||v||^2 = (2^(R/B)-1) / ||h||^2 (virtual downlink, one user).
  Rng rng(29);
  CVector h(4);
  for (int e = 0; e < 4; ++e) h(e) = rng.cn01() * 50.0;
  double target = 4e5, bandwidth = 1e7;
  SocpProblem p;
  p.n = 8;
  p.quad_obj = Eigen::VectorXd::Ones(8);
  p.lin_obj = Eigen::VectorXd::Zero(8);
  p.socs.push_back(build_rate_soc(h, {0}, 0, target, 1.0, bandwidth, 8));
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  double expected = (std::exp2(target / bandwidth) - 1.0) / h.squaredNorm();
  CHECK(sol.objective_value == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("dump_problem emits a parseable summary") {
  auto p = min_norm_above_line();
  std::ostringstream os;
  dump_problem(p, os);
  auto s = os.str();
  CHECK(s.find("socp n=2") != std::string::npos);
  CHECK(s.find("soc 0") != std::string::npos);
}
