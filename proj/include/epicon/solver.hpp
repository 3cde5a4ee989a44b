#pragma once

#include <vector>

#include "epicon/analysis.hpp"

namespace epicon {

enum class SolveMethod { fbsm, projected_gradient };

struct SolverConfig {
  SolveMethod method = SolveMethod::fbsm;
  int max_iters = 5000;
  double tol_rel = 1e-6;
  double omega = 0.5;
  double step0 = 1.0;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  std::vector<double> smoothing_eps_schedule = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 0.0};
};

struct SolveReport {
  ControlTrajectory u_opt;
  Trajectory traj;
  CostateTrajectory costates;
  double cost_value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
  double hamiltonian_deviation = 0.0;
  ControlStructure structure;
};

double cost_evaluate(const Scenario& sc, const Trajectory& traj, const ControlTrajectory& u);

// Gradient density of the discretized cost with respect to the control nodes:
// pairing it with a direction under the trapezoid inner product gives the
// exact directional derivative of cost_evaluate composed with simulate_forward.
MatrixXd gradient(const Scenario& sc, const Trajectory& traj, const CostateTrajectory& costates,
                  const ControlTrajectory& u);

SolveReport solve_fbsm(const Scenario& sc, const SolverConfig& config);
SolveReport solve_projected_gradient(const Scenario& sc, const SolverConfig& config);
SolveReport solve(const Scenario& sc, const SolverConfig& config);

struct BruteForceResult {
  ControlTrajectory best_u;
  double best_cost = 0.0;
};

BruteForceResult brute_force_oracle(const Scenario& sc, int pieces, int levels);

struct UniquenessResult {
  double max_pairwise_u_gap = 0.0;
};

UniquenessResult uniqueness_probe(const Scenario& sc, int n_starts, double t_f_short,
                                  unsigned seed = 12345);

}  // namespace epicon
