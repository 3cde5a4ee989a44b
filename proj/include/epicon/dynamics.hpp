#pragma once

#include "epicon/model.hpp"

namespace epicon {

// Control values at the N+1 grid nodes, piecewise linear in between,
// componentwise within [0, u_bar_i].
struct ControlTrajectory {
  VectorXd grid;
  MatrixXd u;
};

VectorXd uniform_grid(double t_f, int N);
ControlTrajectory make_zero_control(const Scenario& sc);
ControlTrajectory make_constant_control(const Scenario& sc, const VectorXd& value);
// Linear interpolation of u onto an arbitrary time (clamped to the grid range).
VectorXd control_at(const ControlTrajectory& u, double t);
// Resample onto another uniform grid (used when a stored control is replayed
// at a different resolution).
ControlTrajectory resample_control(const ControlTrajectory& u, const VectorXd& grid);

struct Trajectory {
  VectorXd grid;
  VectorXd s;
  MatrixXd x;
  VectorXd r;
  VectorXd d;
};

Trajectory simulate_forward(const Scenario& sc, const ControlTrajectory& u);
Trajectory simulate_dense(const Scenario& sc, const ControlTrajectory& u, int refine);

struct EpidemicMetrics {
  double peak_infected = 0.0;
  double peak_time = 0.0;
  double final_susceptible = 0.0;
  double total_deceased = 0.0;
};

EpidemicMetrics epidemic_metrics(const Trajectory& traj);

double mass_conservation_error(const Trajectory& traj);

}  // namespace epicon
