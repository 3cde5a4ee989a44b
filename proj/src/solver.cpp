#include "epicon/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace epicon {

namespace {

VectorXd trapezoid_weights(const VectorXd& grid) {
  const int N = static_cast<int>(grid.size()) - 1;
  const double h = grid(1) - grid(0);
  VectorXd w = VectorXd::Constant(N + 1, h);
  w(0) = 0.5 * h;
  w(N) = 0.5 * h;
  return w;
}

VectorXd pack_state(const Trajectory& traj, int k) {
  const int n = static_cast<int>(traj.x.cols());
  VectorXd y(n + 3);
  y(0) = traj.s(k);
  y.segment(1, n) = traj.x.row(k);
  y(1 + n) = traj.r(k);
  y(2 + n) = traj.d(k);
  return y;
}

VectorXd state_rhs(const EpidemicModel& m, const VectorXd& y, const VectorXd& u) {
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

// Transpose-Jacobian products of the state right-hand side.
VectorXd rhs_yT(const EpidemicModel& m, const VectorXd& y, const VectorXd& u,
                const VectorXd& c) {
  const int n = m.n;
  const double s = y(0);
  const auto x = y.segment(1, n);
  const VectorXd v = m.beta_bar - u;
  const double c_s = c(0);
  const auto c_x = c.segment(1, n);
  const double c_r = c(1 + n);
  const double c_d = c(2 + n);
  const double gain = c_x(0) - c_s;
  VectorXd out(n + 3);
  out(0) = v.dot(x) * gain;
  out.segment(1, n) =
      s * gain * v + m.M.transpose() * c_x + c_r * m.sigma + c_d * m.mu;
  out(1 + n) = m.rho * (c_s - c_r);
  out(2 + n) = 0.0;
  return out;
}

VectorXd rhs_uT(const VectorXd& y, int n, const VectorXd& c) {
  const double s = y(0);
  const auto x = y.segment(1, n);
  return s * (c(0) - c(1)) * x;
}

double control_running_cost(const CostSpec& cost, const Eigen::RowVectorXd& u) {
  double c = 0.0;
  for (int i = 0; i < u.size(); ++i) c += cost.C(i) * std::pow(u(i), cost.q(i));
  return c;
}

// Exact gradient density of the discrete objective (forward RK4 + trapezoid
// quadrature) via a reverse sweep through the integrator stages.
MatrixXd gradient_density(const Scenario& sc, const Trajectory& traj,
                          const ControlTrajectory& u) {
  const int n = sc.model.n;
  const int N = sc.grid_points;
  const VectorXd w = trapezoid_weights(traj.grid);
  const EpidemicModel& m = sc.model;

  MatrixXd ubar = MatrixXd::Zero(N + 1, n);
  VectorXd ybar = VectorXd::Zero(n + 3);
  ybar.segment(1, n) = w(N) * grad_nu(sc.cost, traj.x.row(N));

  for (int k = N - 1; k >= 0; --k) {
    const double h = traj.grid(k + 1) - traj.grid(k);
    const VectorXd y0 = pack_state(traj, k);
    const VectorXd u0 = u.u.row(k);
    const VectorXd u1 = u.u.row(k + 1);
    const VectorXd uh = 0.5 * (u0 + u1);
    const VectorXd k1 = state_rhs(m, y0, u0);
    const VectorXd z2 = y0 + 0.5 * h * k1;
    const VectorXd k2 = state_rhs(m, z2, uh);
    const VectorXd z3 = y0 + 0.5 * h * k2;
    const VectorXd k3 = state_rhs(m, z3, uh);
    const VectorXd z4 = y0 + h * k3;

    const VectorXd a = ybar;
    VectorXd kb4 = (h / 6.0) * a;
    VectorXd kb3 = (h / 3.0) * a + h * rhs_yT(m, z4, u1, kb4);
    VectorXd kb2 = (h / 3.0) * a + 0.5 * h * rhs_yT(m, z3, uh, kb3);
    VectorXd kb1 = (h / 6.0) * a + 0.5 * h * rhs_yT(m, z2, uh, kb2);

    const VectorXd ub1 = rhs_uT(y0, n, kb1);
    const VectorXd ubh = rhs_uT(z2, n, kb2) + rhs_uT(z3, n, kb3);
    const VectorXd ub4 = rhs_uT(z4, n, kb4);
    ubar.row(k) += (ub1 + 0.5 * ubh).transpose();
    ubar.row(k + 1) += (ub4 + 0.5 * ubh).transpose();

    ybar = a + rhs_yT(m, y0, u0, kb1) + rhs_yT(m, z2, uh, kb2) + rhs_yT(m, z3, uh, kb3) +
           rhs_yT(m, z4, u1, kb4);
    ybar.segment(1, n) += w(k) * grad_nu(sc.cost, traj.x.row(k));
  }

  for (int k = 0; k <= N; ++k) {
    for (int i = 0; i < n; ++i) {
      ubar(k, i) +=
          w(k) * sc.cost.q(i) * sc.cost.C(i) * std::pow(u.u(k, i), sc.cost.q(i) - 1.0);
      ubar(k, i) /= w(k);
    }
  }
  return ubar;
}

SolveReport assemble_report(const Scenario& sc, ControlTrajectory u, Trajectory traj,
                            int iterations, bool converged,
                            std::vector<double> residual_history) {
  SolveReport rep;
  rep.costates = integrate_adjoint(sc, traj, u);
  rep.cost_value = cost_evaluate(sc, traj, u);
  rep.iterations = iterations;
  rep.converged = converged;
  rep.residual_history = std::move(residual_history);
  rep.hamiltonian_deviation =
      hamiltonian_constant_check(sc, traj, u, rep.costates).max_deviation;
  rep.structure = classify_structure(u, sc.model.u_bar, rep.costates, sc.cost);
  rep.u_opt = std::move(u);
  rep.traj = std::move(traj);
  return rep;
}

double rel_l1_change(const MatrixXd& u_new, const MatrixXd& u_old) {
  const double change = (u_new - u_old).cwiseAbs().sum();
  return change / std::max(u_old.cwiseAbs().sum(), 1e-12);
}

SolveReport fbsm_from(const Scenario& sc, const SolverConfig& config, ControlTrajectory u) {
  const int n = sc.model.n;
  const int N = sc.grid_points;
  Trajectory traj = simulate_forward(sc, u);
  double J = cost_evaluate(sc, traj, u);

  MatrixXd best_u = u.u;
  double best_J = J;
  std::vector<double> history;
  bool converged = false;
  int it = 0;

  for (it = 1; it <= config.max_iters; ++it) {
    const CostateTrajectory cs = integrate_adjoint(sc, traj, u);
    MatrixXd ustar(N + 1, n);
    for (int k = 0; k <= N; ++k) {
      ustar.row(k) = control_superlinear(sc.cost, cs.eta(k), traj.s(k), traj.x.row(k),
                                         sc.model.u_bar)
                         .transpose();
    }

    double omega = config.omega;
    ControlTrajectory u_new = u;
    Trajectory traj_new;
    double J_new = 0.0;
    int halvings = 0;
    bool decreased = false;
    for (; halvings <= 10; ++halvings) {
      u_new.u = omega * ustar + (1.0 - omega) * u.u;
      traj_new = simulate_forward(sc, u_new);
      J_new = cost_evaluate(sc, traj_new, u_new);
      if (J_new <= J) {
        decreased = true;
        break;
      }
      omega *= 0.5;
    }
    if (!decreased) {
      // The sweep direction is uphill at every relaxation length; take the
      // shortest step anyway so the iteration can leave the stalled point,
      // but such steps never count toward convergence.
      history.push_back(rel_l1_change(u_new.u, u.u));
      u = u_new;
      traj = std::move(traj_new);
      J = J_new;
      continue;
    }

    const double residual = rel_l1_change(u_new.u, u.u);
    history.push_back(residual);
    u = u_new;
    traj = std::move(traj_new);
    J = J_new;
    if (J < best_J) {
      best_J = J;
      best_u = u.u;
    }
    // A halved step shrinks the iterate change without the sweep map being
    // anywhere near stationary; only clean relaxed steps can converge.
    if (residual <= config.tol_rel && halvings == 0) {
      converged = true;
      break;
    }
  }

  if (!converged) {
    u.u = best_u;
    traj = simulate_forward(sc, u);
  }
  return assemble_report(sc, std::move(u), std::move(traj), std::min(it, config.max_iters),
                         converged, std::move(history));
}

}  // namespace

double cost_evaluate(const Scenario& sc, const Trajectory& traj, const ControlTrajectory& u) {
  const int N = sc.grid_points;
  if (traj.grid.size() != N + 1 || u.grid.size() != N + 1 || u.u.cols() != sc.model.n)
    throw GridMismatch("trajectory/control grids do not match the scenario");
  const VectorXd w = trapezoid_weights(traj.grid);
  double J = 0.0;
  for (int k = 0; k <= N; ++k)
    J += w(k) * (eval_nu(sc.cost, traj.x.row(k)) + control_running_cost(sc.cost, u.u.row(k)));
  return J;
}

MatrixXd gradient(const Scenario& sc, const Trajectory& traj, const CostateTrajectory& costates,
                  const ControlTrajectory& u) {
  if (traj.grid.size() != sc.grid_points + 1 || u.grid.size() != sc.grid_points + 1 ||
      costates.grid.size() != sc.grid_points + 1)
    throw GridMismatch("trajectory/costate/control grids do not match the scenario");
  return gradient_density(sc, traj, u);
}

SolveReport solve_fbsm(const Scenario& sc, const SolverConfig& config) {
  if (!sc.cost.all_superlinear())
    throw LinearCostUnsupported(
        "forward-backward sweep requires q > 1 in every component; use the projected-gradient "
        "method for linear control costs");
  return fbsm_from(sc, config, make_zero_control(sc));
}

SolveReport solve_projected_gradient(const Scenario& sc, const SolverConfig& config) {
  const int N = sc.grid_points;
  const VectorXd w = trapezoid_weights(uniform_grid(sc.t_f, N));
  const VectorXd& ub = sc.model.u_bar;

  ControlTrajectory u = make_zero_control(sc);
  Trajectory traj = simulate_forward(sc, u);

  std::vector<double> schedule = config.smoothing_eps_schedule;
  if (schedule.empty()) schedule = {0.0};

  auto smoothed_cost = [&](const Trajectory& t, const ControlTrajectory& c, double eps) {
    double J = cost_evaluate(sc, t, c);
    if (eps > 0.0)
      for (int k = 0; k <= N; ++k) J += eps * w(k) * c.u.row(k).squaredNorm();
    return J;
  };

  std::vector<double> history;
  int total_iters = 0;
  bool converged = false;

  for (size_t pass = 0; pass < schedule.size(); ++pass) {
    const double eps = schedule[pass];
    double J = smoothed_cost(traj, u, eps);
    double alpha = config.step0;
    bool pass_converged = false;

    for (int it = 0; it < config.max_iters; ++it) {
      MatrixXd g = gradient_density(sc, traj, u);
      if (eps > 0.0) g += 2.0 * eps * u.u;

      ControlTrajectory u_new = u;
      Trajectory traj_new;
      double J_new = 0.0;
      bool stationary = false;
      while (true) {
        u_new.u = (u.u - alpha * g).cwiseMax(0.0).cwiseMin(ub.transpose().replicate(N + 1, 1));
        double dec = 0.0;
        for (int k = 0; k <= N; ++k) dec += w(k) * g.row(k).dot(u_new.u.row(k) - u.u.row(k));
        if (dec >= -1e-18) {
          stationary = true;
          break;
        }
        traj_new = simulate_forward(sc, u_new);
        J_new = smoothed_cost(traj_new, u_new, eps);
        if (J_new <= J + config.armijo_c * dec) break;
        alpha *= config.armijo_shrink;
        if (alpha < 1e-16) {
          stationary = true;
          break;
        }
      }

      if (stationary) {
        history.push_back(0.0);
        ++total_iters;
        pass_converged = true;
        break;
      }

      const double residual = rel_l1_change(u_new.u, u.u);
      history.push_back(residual);
      ++total_iters;
      u = std::move(u_new);
      traj = std::move(traj_new);
      J = J_new;
      alpha = std::min(alpha * 2.0, 1e6);
      if (residual <= config.tol_rel) {
        pass_converged = true;
        break;
      }
    }
    if (pass + 1 == schedule.size()) converged = pass_converged;
  }

  if (converged) {
    // Guard against step-collapse exits: a converged point must also be
    // first-order stationary for the unregularized discrete problem.
    const MatrixXd g = gradient_density(sc, traj, u);
    const MatrixXd v =
        (u.u - g).cwiseMax(0.0).cwiseMin(ub.transpose().replicate(N + 1, 1));
    const double stationarity =
        (u.u - v).cwiseAbs().sum() / std::max(u.u.cwiseAbs().sum(), 1e-12);
    if (stationarity > 1e-3) converged = false;
  }

  return assemble_report(sc, std::move(u), std::move(traj), total_iters, converged,
                         std::move(history));
}

SolveReport solve(const Scenario& sc, const SolverConfig& config) {
  if (config.method == SolveMethod::fbsm) return solve_fbsm(sc, config);
  return solve_projected_gradient(sc, config);
}

BruteForceResult brute_force_oracle(const Scenario& sc, int pieces, int levels) {
  const int n = sc.model.n;
  const int N = sc.grid_points;
  if (pieces < 1 || levels < 1) throw Error("pieces and levels must be positive");
  const int digits = pieces * n;
  const double space = static_cast<double>(pieces) * std::pow(static_cast<double>(levels), digits);
  if (space > 1e7)
    throw SearchSpaceTooLarge("brute-force search space exceeds the 1e7 guard");

  std::vector<int> piece_of(N + 1);
  for (int k = 0; k <= N; ++k)
    piece_of[k] = std::min(pieces - 1, k * pieces / N);

  const long long combos =
      std::llround(std::pow(static_cast<double>(levels), static_cast<double>(digits)));
  BruteForceResult best;
  best.best_cost = std::numeric_limits<double>::infinity();
  ControlTrajectory u = make_zero_control(sc);
  MatrixXd values(pieces, n);

  for (long long c = 0; c < combos; ++c) {
    long long rem = c;
    for (int p = 0; p < pieces; ++p) {
      for (int i = 0; i < n; ++i) {
        const int level = static_cast<int>(rem % levels);
        rem /= levels;
        values(p, i) =
            levels == 1 ? 0.0 : sc.model.u_bar(i) * level / (levels - 1);
      }
    }
    for (int k = 0; k <= N; ++k) u.u.row(k) = values.row(piece_of[k]);
    const Trajectory traj = simulate_forward(sc, u);
    const double J = cost_evaluate(sc, traj, u);
    if (J < best.best_cost) {
      best.best_cost = J;
      best.best_u = u;
    }
  }
  return best;
}

UniquenessResult uniqueness_probe(const Scenario& sc, int n_starts, double t_f_short,
                                  unsigned seed) {
  Scenario short_sc = sc;
  short_sc.t_f = t_f_short;
  if (!sc.cost.all_superlinear())
    throw LinearCostUnsupported("uniqueness probe requires superlinear control costs");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<MatrixXd> solutions;
  SolverConfig config;
  for (int s = 0; s < n_starts; ++s) {
    ControlTrajectory u0 = make_zero_control(short_sc);
    for (int k = 0; k < u0.u.rows(); ++k)
      for (int i = 0; i < u0.u.cols(); ++i)
        u0.u(k, i) = unit(rng) * short_sc.model.u_bar(i);
    solutions.push_back(fbsm_from(short_sc, config, std::move(u0)).u_opt.u);
  }

  UniquenessResult out;
  for (size_t a = 0; a < solutions.size(); ++a)
    for (size_t b = a + 1; b < solutions.size(); ++b)
      out.max_pairwise_u_gap = std::max(
          out.max_pairwise_u_gap, (solutions[a] - solutions[b]).cwiseAbs().maxCoeff());
  return out;
}

}  // namespace epicon
