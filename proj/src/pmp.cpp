#include "epicon/pmp.hpp"

#include <algorithm>
#include <cmath>

namespace epicon {

namespace {

constexpr double kSwitchTolScale = 1e-6;

double control_cost(const CostSpec& cost, const VectorXd& u) {
  double c = 0.0;
  for (int i = 0; i < u.size(); ++i) c += cost.C(i) * std::pow(u(i), cost.q(i));
  return c;
}

// Adjoint right-hand side at a given state/control sample.
// p layout: [p_s, p_x_1..p_x_n, p_r].
VectorXd adjoint_rhs(const EpidemicModel& m, const CostSpec& cost, const VectorXd& p,
                     double s, const VectorXd& x, const VectorXd& u) {
  const int n = m.n;
  const double p_s = p(0);
  const auto p_x = p.segment(1, n);
  const double p_r = p(1 + n);
  const double eta = p_x(0) - p_s;
  const VectorXd v = m.beta_bar - u;
  VectorXd dp(n + 2);
  dp(0) = -eta * v.dot(x);
  dp.segment(1, n) =
      -grad_nu(cost, x) - eta * s * v - m.M.transpose() * p_x - p_r * m.sigma;
  dp(1 + n) = m.rho * (p_s - p_r);
  return dp;
}

}  // namespace

StateNode state_at(const Trajectory& traj, int k) {
  return {traj.s(k), traj.x.row(k).transpose(), traj.r(k)};
}

CostateNode costate_at(const CostateTrajectory& cs, int k) {
  return {cs.p_s(k), cs.p_x.row(k).transpose(), cs.p_r(k)};
}

double hamiltonian(const EpidemicModel& model, const CostSpec& cost, int /*t_index*/,
                   const VectorXd& u_node, const StateNode& state_node,
                   const CostateNode& costate_node) {
  const double s = state_node.s;
  const VectorXd& x = state_node.x;
  const double eta = costate_node.p_x(0) - costate_node.p_s;
  const VectorXd v = model.beta_bar - u_node;
  return eval_nu(cost, x) + control_cost(cost, u_node) + eta * s * v.dot(x) +
         model.rho * (costate_node.p_s - costate_node.p_r) * state_node.r +
         costate_node.p_x.dot(model.M * x) + costate_node.p_r * model.sigma.dot(x);
}

CostateTrajectory integrate_adjoint(const Scenario& sc, const Trajectory& traj,
                                    const ControlTrajectory& u) {
  const int n = sc.model.n;
  const int N = sc.grid_points;
  if (traj.grid.size() != N + 1 || u.grid.size() != N + 1 || u.u.cols() != n)
    throw GridMismatch("trajectory/control grids do not match the scenario");

  CostateTrajectory cs;
  cs.grid = traj.grid;
  cs.p_s = VectorXd::Zero(N + 1);
  cs.p_x = MatrixXd::Zero(N + 1, n);
  cs.p_r = VectorXd::Zero(N + 1);
  cs.eta = VectorXd::Zero(N + 1);
  cs.Psi = MatrixXd::Zero(N + 1, n);
  cs.psi_norm = MatrixXd::Zero(N + 1, n);

  VectorXd p = VectorXd::Zero(n + 2);
  for (int k = N; k > 0; --k) {
    const double h = traj.grid(k) - traj.grid(k - 1);
    const double s1 = traj.s(k), s0 = traj.s(k - 1);
    const VectorXd x1 = traj.x.row(k), x0 = traj.x.row(k - 1);
    const VectorXd u1 = u.u.row(k), u0 = u.u.row(k - 1);
    const double sh = 0.5 * (s0 + s1);
    const VectorXd xh = 0.5 * (x0 + x1);
    const VectorXd uh = 0.5 * (u0 + u1);
    const VectorXd k1 = adjoint_rhs(sc.model, sc.cost, p, s1, x1, u1);
    const VectorXd k2 = adjoint_rhs(sc.model, sc.cost, p - 0.5 * h * k1, sh, xh, uh);
    const VectorXd k3 = adjoint_rhs(sc.model, sc.cost, p - 0.5 * h * k2, sh, xh, uh);
    const VectorXd k4 = adjoint_rhs(sc.model, sc.cost, p - h * k3, s0, x0, u0);
    p -= (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    cs.p_s(k - 1) = p(0);
    cs.p_x.row(k - 1) = p.segment(1, n).transpose();
    cs.p_r(k - 1) = p(1 + n);
  }
  for (int k = 0; k <= N; ++k) {
    cs.eta(k) = cs.p_x(k, 0) - cs.p_s(k);
    for (int i = 0; i < n; ++i) {
      cs.Psi(k, i) = cs.eta(k) * traj.s(k) * traj.x(k, i);
      cs.psi_norm(k, i) = cs.Psi(k, i) / (sc.cost.q(i) * sc.cost.C(i));
    }
  }
  return cs;
}

VectorXd control_superlinear(const CostSpec& cost, double eta_node, double s_node,
                             const VectorXd& x_node, const VectorXd& u_bar) {
  const int n = static_cast<int>(x_node.size());
  VectorXd u(n);
  for (int i = 0; i < n; ++i) {
    if (cost.q(i) <= 1.0)
      throw ExponentNotSuperlinear("control_superlinear requires q > 1 in every component");
    const double psi = eta_node * s_node * x_node(i) / (cost.q(i) * cost.C(i));
    if (psi <= 0.0) {
      u(i) = 0.0;
    } else {
      const double root = std::pow(psi, 1.0 / (cost.q(i) - 1.0));
      u(i) = std::min(root, u_bar(i));
    }
  }
  return u;
}

VectorXd control_linear(const CostSpec& cost, const VectorXd& Psi_node, const VectorXd& u_bar,
                        SingularFill singular_fill, const VectorXd* previous) {
  const int n = static_cast<int>(Psi_node.size());
  VectorXd u(n);
  for (int i = 0; i < n; ++i) {
    if (cost.q(i) != 1.0)
      throw ExponentNotLinear("control_linear requires q = 1 in every component");
    const double tol = kSwitchTolScale * cost.C(i);
    if (Psi_node(i) < cost.C(i) - tol) {
      u(i) = 0.0;
    } else if (Psi_node(i) > cost.C(i) + tol) {
      u(i) = u_bar(i);
    } else {
      switch (singular_fill) {
        case SingularFill::zero: u(i) = 0.0; break;
        case SingularFill::max: u(i) = u_bar(i); break;
        case SingularFill::hold_previous: u(i) = previous ? (*previous)(i) : 0.0; break;
      }
    }
  }
  return u;
}

FeedbackControl feedback_singular_n1(const EpidemicModel& model, const CostSpec& cost,
                                     double s_node, double x_node, double eta_node) {
  if (model.n != 1 || model.rho != 0.0)
    throw NotSIR("singular feedback law requires n=1 and rho=0");
  const double gamma = model.sigma(0) + model.mu(0);
  const VectorXd x1 = VectorXd::Constant(1, x_node);
  const double nu2 = hess_nu_diag(cost, x1)(0);
  if (nu2 <= 0.0) throw NonconvexNu("singular feedback law requires strictly convex nu");
  const double den = s_node * nu2 + gamma * eta_node;
  if (x_node <= 0.0 || std::abs(den) < 1e-14)
    throw DegenerateDenominator("feedback law denominator vanishes");
  FeedbackControl fb;
  fb.raw = model.beta_bar(0) - gamma * nu2 / den;
  fb.clamped = std::clamp(fb.raw, 0.0, model.u_bar(0));
  return fb;
}

HamiltonianCheck hamiltonian_constant_check(const Scenario& sc, const Trajectory& traj,
                                            const ControlTrajectory& u,
                                            const CostateTrajectory& costates) {
  const int N = sc.grid_points;
  HamiltonianCheck out;
  const VectorXd xf = traj.x.row(N);
  out.k_expected = eval_nu(sc.cost, xf);
  for (int k = 0; k <= N; ++k) {
    const double H = hamiltonian(sc.model, sc.cost, k, u.u.row(k), state_at(traj, k),
                                 costate_at(costates, k));
    out.max_deviation = std::max(out.max_deviation, std::abs(H - out.k_expected));
  }
  return out;
}

double eta_derivative(const EpidemicModel& model, const CostSpec& cost, const EtaNode& node) {
  if (model.n != 1 || model.rho != 0.0)
    throw NotSIR("eta derivative identity requires n=1 and rho=0");
  const VectorXd x1 = VectorXd::Constant(1, node.x);
  const VectorXd xf = VectorXd::Constant(1, node.x_final);
  const double running = eval_nu(cost, x1) + cost.C(0) * std::pow(node.u, cost.q(0));
  return node.eta * (model.beta_bar(0) - node.u) * node.x +
         (running - eval_nu(cost, xf) - grad_nu(cost, x1)(0) * node.x) / node.x;
}

}  // namespace epicon
