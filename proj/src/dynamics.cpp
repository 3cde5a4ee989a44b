#include "epicon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace epicon {

namespace {

// Packed state layout: y = [s, x_1..x_n, r, d].
VectorXd rhs(const EpidemicModel& m, const VectorXd& y, const VectorXd& u) {
  const int n = m.n;
  const double s = y(0);
  const auto x = y.segment(1, n);
  const double r = y(1 + n);
  const VectorXd v = m.beta_bar - u;
  const double infection = s * v.dot(x);
  VectorXd dy(n + 3);
  dy(0) = -infection + m.rho * r;
  dy.segment(1, n) = m.M * x;
  dy(1) += infection;
  dy(1 + n) = m.sigma.dot(x) - m.rho * r;
  dy(2 + n) = m.mu.dot(x);
  return dy;
}

void check_grid(const Scenario& sc, const ControlTrajectory& u) {
  const int N = sc.grid_points;
  if (u.grid.size() != N + 1 || u.u.rows() != N + 1 || u.u.cols() != sc.model.n)
    throw GridMismatch("control trajectory does not match the scenario grid");
  if (std::abs(u.grid(0)) > 1e-9 || std::abs(u.grid(N) - sc.t_f) > 1e-9)
    throw GridMismatch("control grid does not span [0, t_f]");
}

void check_node(const VectorXd& y, double t) {
  if (!y.allFinite()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "non-finite state at t=%g", t);
    throw NonFiniteState(buf);
  }
  if (y.minCoeff() < -1e-9) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "state undershoot %g at t=%g", y.minCoeff(), t);
    throw NonFiniteState(buf);
  }
}

}  // namespace

VectorXd uniform_grid(double t_f, int N) {
  VectorXd grid(N + 1);
  for (int k = 0; k <= N; ++k) grid(k) = t_f * k / N;
  return grid;
}

ControlTrajectory make_zero_control(const Scenario& sc) {
  ControlTrajectory u;
  u.grid = uniform_grid(sc.t_f, sc.grid_points);
  u.u = MatrixXd::Zero(sc.grid_points + 1, sc.model.n);
  return u;
}

ControlTrajectory make_constant_control(const Scenario& sc, const VectorXd& value) {
  ControlTrajectory u = make_zero_control(sc);
  u.u.rowwise() = value.transpose();
  return u;
}

VectorXd control_at(const ControlTrajectory& u, double t) {
  const int N = static_cast<int>(u.grid.size()) - 1;
  if (t <= u.grid(0)) return u.u.row(0);
  if (t >= u.grid(N)) return u.u.row(N);
  const double h = u.grid(1) - u.grid(0);
  int k = std::min(static_cast<int>((t - u.grid(0)) / h), N - 1);
  while (k > 0 && t < u.grid(k)) --k;
  while (k < N - 1 && t > u.grid(k + 1)) ++k;
  const double w = (t - u.grid(k)) / (u.grid(k + 1) - u.grid(k));
  return (1.0 - w) * u.u.row(k) + w * u.u.row(k + 1);
}

ControlTrajectory resample_control(const ControlTrajectory& u, const VectorXd& grid) {
  ControlTrajectory out;
  out.grid = grid;
  out.u = MatrixXd::Zero(grid.size(), u.u.cols());
  for (int k = 0; k < grid.size(); ++k) out.u.row(k) = control_at(u, grid(k)).transpose();
  return out;
}

Trajectory simulate_forward(const Scenario& sc, const ControlTrajectory& u) {
  check_grid(sc, u);
  const int n = sc.model.n;
  const int N = sc.grid_points;

  Trajectory traj;
  traj.grid = uniform_grid(sc.t_f, N);
  traj.s.resize(N + 1);
  traj.x.resize(N + 1, n);
  traj.r.resize(N + 1);
  traj.d.resize(N + 1);

  VectorXd y(n + 3);
  y(0) = sc.init.s0;
  y.segment(1, n) = sc.init.x0;
  y(1 + n) = sc.init.r0;
  y(2 + n) = 0.0;

  auto store = [&](int k) {
    traj.s(k) = y(0);
    traj.x.row(k) = y.segment(1, n).transpose();
    traj.r(k) = y(1 + n);
    traj.d(k) = y(2 + n);
  };
  store(0);

  for (int k = 0; k < N; ++k) {
    const double h = traj.grid(k + 1) - traj.grid(k);
    const VectorXd u0 = u.u.row(k);
    const VectorXd u1 = u.u.row(k + 1);
    const VectorXd uh = 0.5 * (u0 + u1);
    const VectorXd k1 = rhs(sc.model, y, u0);
    const VectorXd k2 = rhs(sc.model, y + 0.5 * h * k1, uh);
    const VectorXd k3 = rhs(sc.model, y + 0.5 * h * k2, uh);
    const VectorXd k4 = rhs(sc.model, y + h * k3, u1);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_node(y, traj.grid(k + 1));
    store(k + 1);
  }
  return traj;
}

Trajectory simulate_dense(const Scenario& sc, const ControlTrajectory& u, int refine) {
  if (refine < 1) throw Error("refine must be at least 1");
  if (refine == 1) return simulate_forward(sc, u);
  Scenario dense = sc;
  dense.grid_points = sc.grid_points * refine;
  const ControlTrajectory du = resample_control(u, uniform_grid(sc.t_f, dense.grid_points));
  return simulate_forward(dense, du);
}

EpidemicMetrics epidemic_metrics(const Trajectory& traj) {
  EpidemicMetrics m;
  const int N = static_cast<int>(traj.grid.size()) - 1;
  m.peak_infected = -1.0;
  for (int k = 0; k <= N; ++k) {
    const double total = traj.x.row(k).sum();
    if (total > m.peak_infected) {
      m.peak_infected = total;
      m.peak_time = traj.grid(k);
    }
  }
  m.final_susceptible = traj.s(N);
  m.total_deceased = traj.d(N);
  return m;
}

double mass_conservation_error(const Trajectory& traj) {
  const double total0 = traj.s(0) + traj.x.row(0).sum() + traj.r(0) + traj.d(0);
  double worst = 0.0;
  for (int k = 0; k < traj.grid.size(); ++k) {
    const double total = traj.s(k) + traj.x.row(k).sum() + traj.r(k) + traj.d(k);
    worst = std::max(worst, std::abs(total - total0));
  }
  return worst;
}

}  // namespace epicon
