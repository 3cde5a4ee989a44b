#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "epicon/model.hpp"

using namespace epicon;

namespace {

EpidemicModel sir_model() {
  EpidemicModel m;
  m.n = 1;
  m.M = MatrixXd::Constant(1, 1, -0.06);
  m.sigma = VectorXd::Constant(1, 0.06);
  m.mu = VectorXd::Zero(1);
  m.rho = 0.0;
  m.beta_bar = VectorXd::Constant(1, 0.16);
  m.u_bar = VectorXd::Constant(1, 0.08);
  return m;
}

bool mentions(const ValidationReport& rep, const std::string& needle) {
  for (const auto& v : rep.violations)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validate_model accepts the basic SIR coefficients") {
  CHECK(validate_model(sir_model()).ok);
}

TEST_CASE("validate_model reports the closed-population residual") {
  EpidemicModel m = sir_model();
  m.sigma(0) = 0.05;  // column sum now -0.01 instead of 0
  ValidationReport rep = validate_model(m);
  CHECK_FALSE(rep.ok);
  CHECK(mentions(rep, "closed-population residual"));
  CHECK(mentions(rep, "-0.01"));
  CHECK(mentions(rep, "column 1"));
}

TEST_CASE("validate_model accepts an SEIR-shaped two-compartment model") {
  const double a = 0.2, g = 0.06;
  EpidemicModel m;
  m.n = 2;
  m.M = MatrixXd::Zero(2, 2);
  m.M(0, 0) = -a;
  m.M(1, 0) = a;
  m.M(1, 1) = -g;
  m.sigma = VectorXd::Zero(2);
  m.sigma(1) = g;
  m.mu = VectorXd::Zero(2);
  m.rho = 0.0;
  m.beta_bar = VectorXd::Constant(2, 0.16);
  m.u_bar = VectorXd::Constant(2, 0.08);
  CHECK(validate_model(m).ok);
}

TEST_CASE("validate_model rejects upper-triangular and negative couplings") {
  EpidemicModel m = sir_model();
  SUBCASE("upper triangle") {
    m.n = 2;
    m.M = MatrixXd::Zero(2, 2);
    m.M(0, 1) = 0.1;  // forbidden: j > i
    m.M(0, 0) = -0.06;
    m.M(1, 1) = -0.16;
    m.sigma = VectorXd::Constant(2, 0.06);
    m.sigma(1) = 0.06;
    m.mu = VectorXd::Zero(2);
    m.beta_bar = VectorXd::Constant(2, 0.16);
    m.u_bar = VectorXd::Constant(2, 0.08);
    CHECK_FALSE(validate_model(m).ok);
  }
  SUBCASE("negative off-diagonal") {
    m.n = 2;
    m.M = MatrixXd::Zero(2, 2);
    m.M(0, 0) = 0.06;
    m.M(1, 0) = -0.12;
    m.M(1, 1) = -0.06;
    m.sigma = VectorXd::Constant(2, 0.06);
    m.mu = VectorXd::Zero(2);
    m.beta_bar = VectorXd::Constant(2, 0.16);
    m.u_bar = VectorXd::Constant(2, 0.08);
    CHECK_FALSE(validate_model(m).ok);
  }
  SUBCASE("u_bar above beta_bar") {
    m.u_bar(0) = 0.2;
    CHECK_FALSE(validate_model(m).ok);
  }
  SUBCASE("u_bar zero") {
    m.u_bar(0) = 0.0;
    CHECK_FALSE(validate_model(m).ok);
  }
}

TEST_CASE("validate_init examples") {
  InitialState init;
  init.s0 = 0.999;
  init.x0 = VectorXd::Constant(1, 0.001);
  init.r0 = 0.0;
  CHECK(validate_init(init, 1).ok);

  init.x0(0) = 0.0;
  ValidationReport rep = validate_init(init, 1);
  CHECK_FALSE(rep.ok);
  CHECK(mentions(rep, "x0[1] must be strictly positive"));

  InitialState over;
  over.s0 = 0.6;
  over.x0 = VectorXd::Constant(2, 0.3);
  over.r0 = 0.0;
  rep = validate_init(over, 2);
  CHECK_FALSE(rep.ok);
  CHECK(mentions(rep, "total exceeds 1"));
}

TEST_CASE("preset carries the advertised scenario data") {
  Scenario ll = preset("sir_paper_ll_01");
  CHECK(ll.cost.w(0) == doctest::Approx(2.0));
  CHECK(ll.cost.rexp(0) == doctest::Approx(1.0));
  CHECK(ll.cost.q(0) == doctest::Approx(1.0));
  CHECK(ll.model.u_bar(0) == doctest::Approx(0.1));

  CHECK(preset("sir_paper_qq_008").model.u_bar(0) == doctest::Approx(0.08));
  CHECK(preset("sir_paper_qq_008").model.beta_bar(0) == doctest::Approx(0.16));
  CHECK(preset("sir_paper_qq_008").t_f == doctest::Approx(360.0));
  CHECK(preset("sir_paper_qq_008").init.s0 == doctest::Approx(0.999));
  CHECK(preset("sir_paper_qq_008").init.x0(0) == doctest::Approx(0.001));

  CHECK_THROWS_AS(preset("unknown"), UnknownPreset);
}

TEST_CASE("every preset validates") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    Scenario sc = preset(name);
    CHECK(validate_model(sc.model).ok);
    CHECK(validate_init(sc.init, sc.model.n).ok);
    CHECK(validate_scenario(sc).ok);
  }
}

TEST_CASE("column sums of M offset sigma + mu to machine precision") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const EpidemicModel& m = preset(name).model;
    for (int h = 0; h < m.n; ++h) {
      const double residual = m.M.col(h).sum() + m.sigma(h) + m.mu(h);
      CHECK(std::abs(residual) <= 1e-12);
    }
  }
}

TEST_CASE("nu and its derivatives on the paper cost weights") {
  CostSpec ql;
  ql.w = VectorXd::Constant(1, 30.0);
  ql.rexp = VectorXd::Constant(1, 2.0);
  ql.C = VectorXd::Constant(1, 1.0);
  ql.q = VectorXd::Constant(1, 1.0);
  VectorXd x = VectorXd::Constant(1, 0.1);
  CHECK(eval_nu(ql, x) == doctest::Approx(0.3));
  CHECK(grad_nu(ql, x)(0) == doctest::Approx(6.0));
  CHECK(hess_nu_diag(ql, x)(0) == doctest::Approx(60.0));

  CostSpec ll;
  ll.w = VectorXd::Constant(1, 2.0);
  ll.rexp = VectorXd::Constant(1, 1.0);
  ll.C = VectorXd::Constant(1, 1.0);
  ll.q = VectorXd::Constant(1, 1.0);
  x(0) = 0.5;
  CHECK(eval_nu(ll, x) == doctest::Approx(1.0));
  CHECK(grad_nu(ll, x)(0) == doctest::Approx(2.0));
  CHECK(hess_nu_diag(ll, x)(0) == doctest::Approx(0.0));

  x(0) = 0.0;
  CHECK(eval_nu(ql, x) == doctest::Approx(0.0));
  CHECK(grad_nu(ql, x)(0) == doctest::Approx(0.0));
}

TEST_CASE("grad_nu matches central differences at random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_int_distribution<int> expo(1, 2);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(rng);
    CostSpec cost;
    cost.w = VectorXd::NullaryExpr(n, [&] { return unif(rng); });
    cost.rexp = VectorXd::NullaryExpr(n, [&] { return double(expo(rng)); });
    cost.C = VectorXd::Ones(n);
    cost.q = VectorXd::Constant(n, 2.0);
    VectorXd x = VectorXd::NullaryExpr(n, [&] { return unif(rng); });
    VectorXd g = grad_nu(cost, x);
    for (int i = 0; i < n; ++i) {
      VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (eval_nu(cost, xp) - eval_nu(cost, xm)) / (2 * h);
      CHECK(g(i) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("scenario validation rejects out-of-range control exponents") {
  Scenario sc = preset("sir_paper_qq_008");
  sc.cost.q(0) = 3.0;
  ValidationReport rep = validate_scenario(sc);
  CHECK_FALSE(rep.ok);
  CHECK(mentions(rep, "out of [1,2]"));
}
