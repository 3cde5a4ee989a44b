#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epicon/errors.hpp"

namespace epicon {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// n-compartment epidemic model with susceptible/recovered bookkeeping.
// M couples the infected compartments (lower triangular, Metzler), sigma
// and mu are per-compartment recovery and death rates, rho the rate at
// which recovered individuals lose immunity. Column sums of M must offset
// sigma + mu so that the total population is conserved.
struct EpidemicModel {
  int n = 1;
  MatrixXd M;
  VectorXd sigma;
  VectorXd mu;
  double rho = 0.0;
  VectorXd beta_bar;
  VectorXd u_bar;
};

struct InitialState {
  double s0 = 0.0;
  VectorXd x0;
  double r0 = 0.0;
};

// Running cost nu(x) + sum_i C_i u_i^{q_i} with nu(x) = sum_i w_i x_i^{rexp_i}.
// rexp entries are 1 or 2; q entries lie in [1,2], q_i = 1 meaning a linear
// control cost for component i.
struct CostSpec {
  VectorXd w;
  VectorXd rexp;
  VectorXd C;
  VectorXd q;

  bool all_superlinear() const;
  bool any_linear() const;
};

struct Scenario {
  EpidemicModel model;
  InitialState init;
  CostSpec cost;
  double t_f = 360.0;
  int grid_points = 3600;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(std::string msg) {
    ok = false;
    violations.push_back(std::move(msg));
  }
};

ValidationReport validate_model(const EpidemicModel& model);
ValidationReport validate_init(const InitialState& init, int n);
ValidationReport validate_scenario(const Scenario& sc);

const std::vector<std::string>& preset_names();
Scenario preset(const std::string& name);

double eval_nu(const CostSpec& cost, const VectorXd& x);
VectorXd grad_nu(const CostSpec& cost, const VectorXd& x);
VectorXd hess_nu_diag(const CostSpec& cost, const VectorXd& x);

}  // namespace epicon
