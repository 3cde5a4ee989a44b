#include "epicon/model.hpp"

#include <cmath>
#include <cstdio>

namespace epicon {

namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

constexpr double kClosureTol = 1e-12;

}  // namespace

bool CostSpec::all_superlinear() const {
  return (q.array() > 1.0).all();
}

bool CostSpec::any_linear() const {
  return (q.array() == 1.0).any();
}

ValidationReport validate_model(const EpidemicModel& model) {
  ValidationReport rep;
  const int n = model.n;
  if (n < 1) {
    rep.fail("n must be a positive integer");
    return rep;
  }
  if (model.M.rows() != n || model.M.cols() != n || model.sigma.size() != n ||
      model.mu.size() != n || model.beta_bar.size() != n || model.u_bar.size() != n) {
    rep.fail("dimension mismatch: M, sigma, mu, beta_bar, u_bar must all match n");
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (model.M(i, j) != 0.0)
        rep.fail(fmt("M must be lower triangular: M[%d][%d]=%g", i + 1, j + 1, model.M(i, j)));
    }
    for (int j = 0; j < n; ++j) {
      if (i != j && model.M(i, j) < 0.0)
        rep.fail(fmt("M must be Metzler: M[%d][%d]=%g", i + 1, j + 1, model.M(i, j)));
      if (std::abs(model.M(i, j)) > 1.0)
        rep.fail(fmt("|M[%d][%d]|=%g exceeds 1", i + 1, j + 1, std::abs(model.M(i, j))));
    }
  }
  for (int h = 0; h < n; ++h) {
    const double residual = model.M.col(h).sum() + model.sigma(h) + model.mu(h);
    if (std::abs(residual) > kClosureTol)
      rep.fail(fmt("closed-population residual %g in column %d", residual, h + 1));
    if (model.sigma(h) < 0.0 || model.sigma(h) > 1.0)
      rep.fail(fmt("sigma[%d]=%g outside [0,1]", h + 1, model.sigma(h)));
    if (model.mu(h) < 0.0 || model.mu(h) > 1.0)
      rep.fail(fmt("mu[%d]=%g outside [0,1]", h + 1, model.mu(h)));
    if (model.beta_bar(h) <= 0.0 || model.beta_bar(h) >= 1.0)
      rep.fail(fmt("beta_bar[%d]=%g outside (0,1)", h + 1, model.beta_bar(h)));
    if (model.u_bar(h) <= 0.0 || model.u_bar(h) > model.beta_bar(h))
      rep.fail(fmt("u_bar[%d]=%g outside (0, beta_bar]", h + 1, model.u_bar(h)));
  }
  if (model.rho < 0.0 || model.rho > 1.0)
    rep.fail(fmt("rho=%g outside [0,1]", model.rho));
  return rep;
}

ValidationReport validate_init(const InitialState& init, int n) {
  ValidationReport rep;
  if (init.x0.size() != n) {
    rep.fail(fmt("x0 has %d entries, expected %d", static_cast<int>(init.x0.size()), n));
    return rep;
  }
  if (init.s0 < 0.0 || init.s0 > 1.0) rep.fail(fmt("s0=%g outside [0,1]", init.s0));
  if (init.r0 < 0.0 || init.r0 > 1.0) rep.fail(fmt("r0=%g outside [0,1]", init.r0));
  for (int i = 0; i < n; ++i) {
    if (init.x0(i) < 0.0 || init.x0(i) > 1.0)
      rep.fail(fmt("x0[%d]=%g outside [0,1]", i + 1, init.x0(i)));
  }
  if (init.s0 + init.x0.sum() + init.r0 > 1.0 + 1e-15) rep.fail("total exceeds 1");
  if (!(init.x0.size() > 0 && init.x0(0) > 0.0)) rep.fail("x0[1] must be strictly positive");
  return rep;
}

ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport rep = validate_model(sc.model);
  ValidationReport ri = validate_init(sc.init, sc.model.n);
  for (auto& v : ri.violations) rep.fail(v);
  const int n = sc.model.n;
  if (sc.cost.w.size() != n || sc.cost.rexp.size() != n || sc.cost.C.size() != n ||
      sc.cost.q.size() != n) {
    rep.fail("cost vectors must have n entries");
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    if (sc.cost.w(i) < 0.0) rep.fail(fmt("w[%d]=%g negative", i + 1, sc.cost.w(i)));
    if (sc.cost.rexp(i) != 1.0 && sc.cost.rexp(i) != 2.0)
      rep.fail(fmt("rexp[%d]=%g not in {1,2}", i + 1, sc.cost.rexp(i)));
    if (sc.cost.C(i) <= 0.0) rep.fail(fmt("C[%d]=%g must be positive", i + 1, sc.cost.C(i)));
    if (sc.cost.q(i) < 1.0 || sc.cost.q(i) > 2.0)
      rep.fail(fmt("q[%d]=%g out of [1,2]", i + 1, sc.cost.q(i)));
  }
  if (!(sc.t_f > 0.0)) rep.fail(fmt("t_f=%g must be positive", sc.t_f));
  if (sc.grid_points < 2) rep.fail(fmt("grid_points=%d must be at least 2", sc.grid_points));
  return rep;
}

namespace {

Scenario sir_paper_base() {
  Scenario sc;
  sc.model.n = 1;
  sc.model.M = MatrixXd::Constant(1, 1, -0.06);
  sc.model.sigma = VectorXd::Constant(1, 0.06);
  sc.model.mu = VectorXd::Zero(1);
  sc.model.rho = 0.0;
  sc.model.beta_bar = VectorXd::Constant(1, 0.16);
  sc.model.u_bar = VectorXd::Constant(1, 0.08);
  sc.init.s0 = 0.999;
  sc.init.x0 = VectorXd::Constant(1, 0.001);
  sc.init.r0 = 0.0;
  sc.cost.w = VectorXd::Constant(1, 1.0);
  sc.cost.rexp = VectorXd::Constant(1, 2.0);
  sc.cost.C = VectorXd::Constant(1, 1.0);
  sc.cost.q = VectorXd::Constant(1, 2.0);
  sc.t_f = 360.0;
  sc.grid_points = 3600;
  return sc;
}

void quadratic_cost(Scenario& sc) {
  const int n = sc.model.n;
  sc.cost.w = VectorXd::Ones(n);
  sc.cost.rexp = VectorXd::Constant(n, 2.0);
  sc.cost.C = VectorXd::Ones(n);
  sc.cost.q = VectorXd::Constant(n, 2.0);
}

void first_compartment_seed(Scenario& sc) {
  sc.init.s0 = 0.999;
  sc.init.x0 = VectorXd::Zero(sc.model.n);
  sc.init.x0(0) = 0.001;
  sc.init.r0 = 0.0;
  sc.t_f = 360.0;
  sc.grid_points = 3600;
}

// Diagonal entries are assembled last, as exact negatives of the off-diagonal
// column sums plus sigma + mu, so the closure identity holds to machine zero.
void close_diagonal(EpidemicModel& m) {
  for (int h = 0; h < m.n; ++h) {
    double off = 0.0;
    for (int i = 0; i < m.n; ++i)
      if (i != h) off += m.M(i, h);
    m.M(h, h) = -(off + m.sigma(h) + m.mu(h));
  }
}

Scenario seir_base(double rho) {
  Scenario sc;
  sc.model.n = 2;
  sc.model.M = MatrixXd::Zero(2, 2);
  sc.model.M(1, 0) = 0.2;
  sc.model.sigma = VectorXd::Zero(2);
  sc.model.sigma(1) = 0.06;
  sc.model.mu = VectorXd::Zero(2);
  sc.model.rho = rho;
  sc.model.beta_bar = VectorXd::Zero(2);
  sc.model.beta_bar << 1e-3, 0.16;
  sc.model.u_bar = VectorXd::Zero(2);
  sc.model.u_bar << 1e-3, 0.08;
  close_diagonal(sc.model);
  first_compartment_seed(sc);
  quadratic_cost(sc);
  return sc;
}

// Structure of the five-compartment COVID model (infected, diagnosed,
// ailing, recognized, threatened): rates are placeholders, not the
// calibrated values of the source.
Scenario covid_n5_preset() {
  Scenario sc;
  sc.model.n = 5;
  const double eps = 0.15, zeta = 0.05, lambda = 0.03;
  const double eta = 0.08, rho_d = 0.04;
  const double theta = 0.06, mu_a = 0.02, kappa = 0.05;
  const double nu_r = 0.04, xi = 0.06;
  const double sigma_t = 0.04, tau = 0.015;
  sc.model.M = MatrixXd::Zero(5, 5);
  sc.model.M(1, 0) = eps;
  sc.model.M(2, 0) = zeta;
  sc.model.M(3, 1) = eta;
  sc.model.M(3, 2) = theta;
  sc.model.M(4, 2) = mu_a;
  sc.model.M(4, 3) = nu_r;
  sc.model.sigma = VectorXd::Zero(5);
  sc.model.sigma << lambda, rho_d, kappa, xi, sigma_t;
  sc.model.mu = VectorXd::Zero(5);
  sc.model.mu(4) = tau;
  sc.model.rho = 0.0;
  sc.model.beta_bar = VectorXd::Zero(5);
  sc.model.beta_bar << 0.25, 0.05, 0.15, 0.1, 1e-3;
  sc.model.u_bar = VectorXd::Zero(5);
  sc.model.u_bar << 0.1, 0.02, 0.06, 0.04, 1e-3;
  close_diagonal(sc.model);
  first_compartment_seed(sc);
  quadratic_cost(sc);
  return sc;
}

// Three-compartment COVID model (exposed, asymptomatic, symptomatic) with
// loss of immunity; placeholder rates.
Scenario covid_n3_preset() {
  Scenario sc;
  sc.model.n = 3;
  const double lat = 0.2, kappa = 0.1;
  sc.model.M = MatrixXd::Zero(3, 3);
  sc.model.M(1, 0) = lat;
  sc.model.M(2, 1) = kappa;
  sc.model.sigma = VectorXd::Zero(3);
  sc.model.sigma << 0.0, 0.07, 0.08;
  sc.model.mu = VectorXd::Zero(3);
  sc.model.mu(2) = 0.01;
  sc.model.rho = 0.005;
  sc.model.beta_bar = VectorXd::Zero(3);
  sc.model.beta_bar << 1e-3, 0.12, 0.2;
  sc.model.u_bar = VectorXd::Zero(3);
  sc.model.u_bar << 1e-3, 0.06, 0.1;
  close_diagonal(sc.model);
  first_compartment_seed(sc);
  quadratic_cost(sc);
  return sc;
}

// Three-compartment influenza model (exposed, symptomatic, asymptomatic);
// the symptomatic exit split f = alpha/(1+alpha) keeps the column closed.
Scenario influenza_n3_preset() {
  Scenario sc;
  sc.model.n = 3;
  const double kappa = 0.2, p = 0.6, alpha = 0.1, eta = 0.08;
  const double f = alpha / (1.0 + alpha);
  sc.model.M = MatrixXd::Zero(3, 3);
  sc.model.M(1, 0) = p * kappa;
  sc.model.M(2, 0) = (1.0 - p) * kappa;
  sc.model.sigma = VectorXd::Zero(3);
  sc.model.sigma << 0.0, f * alpha, eta;
  sc.model.mu = VectorXd::Zero(3);
  sc.model.mu(1) = f;
  sc.model.rho = 0.0;
  sc.model.beta_bar = VectorXd::Zero(3);
  sc.model.beta_bar << 0.05, 0.15, 0.08;
  sc.model.u_bar = VectorXd::Zero(3);
  sc.model.u_bar << 0.02, 0.075, 0.04;
  close_diagonal(sc.model);
  first_compartment_seed(sc);
  quadratic_cost(sc);
  return sc;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "sir_paper_qq_008", "sir_paper_qq_004", "sir_paper_ql_01", "sir_paper_ql_008",
      "sir_paper_ll_01",  "sirs",             "seir",            "seirs",
      "covid_n5",         "covid_n3",         "influenza_n3"};
  return names;
}

Scenario preset(const std::string& name) {
  if (name == "sir_paper_qq_008") return sir_paper_base();
  if (name == "sir_paper_qq_004") {
    Scenario sc = sir_paper_base();
    sc.model.u_bar(0) = 0.04;
    return sc;
  }
  if (name == "sir_paper_ql_01" || name == "sir_paper_ql_008") {
    Scenario sc = sir_paper_base();
    sc.cost.w(0) = 30.0;
    sc.cost.q(0) = 1.0;
    sc.model.u_bar(0) = (name == "sir_paper_ql_01") ? 0.1 : 0.08;
    return sc;
  }
  if (name == "sir_paper_ll_01") {
    Scenario sc = sir_paper_base();
    sc.cost.w(0) = 2.0;
    sc.cost.rexp(0) = 1.0;
    sc.cost.q(0) = 1.0;
    sc.model.u_bar(0) = 0.1;
    return sc;
  }
  if (name == "sirs") {
    Scenario sc = sir_paper_base();
    sc.model.rho = 0.02;
    return sc;
  }
  if (name == "seir") return seir_base(0.0);
  if (name == "seirs") return seir_base(0.02);
  if (name == "covid_n5") return covid_n5_preset();
  if (name == "covid_n3") return covid_n3_preset();
  if (name == "influenza_n3") return influenza_n3_preset();
  throw UnknownPreset("unknown preset: " + name);
}

double eval_nu(const CostSpec& cost, const VectorXd& x) {
  double nu = 0.0;
  for (int i = 0; i < x.size(); ++i)
    nu += cost.w(i) * (cost.rexp(i) == 2.0 ? x(i) * x(i) : x(i));
  return nu;
}

VectorXd grad_nu(const CostSpec& cost, const VectorXd& x) {
  VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i)
    g(i) = cost.w(i) * (cost.rexp(i) == 2.0 ? 2.0 * x(i) : 1.0);
  return g;
}

VectorXd hess_nu_diag(const CostSpec& cost, const VectorXd& x) {
  VectorXd h(x.size());
  for (int i = 0; i < x.size(); ++i)
    h(i) = cost.rexp(i) == 2.0 ? 2.0 * cost.w(i) : 0.0;
  return h;
}

}  // namespace epicon
