#pragma once

#include "epicon/dynamics.hpp"

namespace epicon {

// Costates conjugate to (s, x, r) with zero terminal data, plus the derived
// quantities eta = p_x1 - p_s, Psi_i = eta*s*x_i and psi_i = Psi_i/(q_i C_i).
struct CostateTrajectory {
  VectorXd grid;
  VectorXd p_s;
  MatrixXd p_x;
  VectorXd p_r;
  VectorXd eta;
  MatrixXd Psi;
  MatrixXd psi_norm;
};

struct StateNode {
  double s = 0.0;
  VectorXd x;
  double r = 0.0;
};

struct CostateNode {
  double p_s = 0.0;
  VectorXd p_x;
  double p_r = 0.0;
};

StateNode state_at(const Trajectory& traj, int k);
CostateNode costate_at(const CostateTrajectory& cs, int k);

double hamiltonian(const EpidemicModel& model, const CostSpec& cost, int t_index,
                   const VectorXd& u_node, const StateNode& state_node,
                   const CostateNode& costate_node);

CostateTrajectory integrate_adjoint(const Scenario& sc, const Trajectory& traj,
                                    const ControlTrajectory& u);

VectorXd control_superlinear(const CostSpec& cost, double eta_node, double s_node,
                             const VectorXd& x_node, const VectorXd& u_bar);

enum class SingularFill { zero, max, hold_previous };

VectorXd control_linear(const CostSpec& cost, const VectorXd& Psi_node, const VectorXd& u_bar,
                        SingularFill singular_fill, const VectorXd* previous = nullptr);

struct FeedbackControl {
  double raw = 0.0;
  double clamped = 0.0;
};

FeedbackControl feedback_singular_n1(const EpidemicModel& model, const CostSpec& cost,
                                     double s_node, double x_node, double eta_node);

struct HamiltonianCheck {
  double k_expected = 0.0;
  double max_deviation = 0.0;
};

HamiltonianCheck hamiltonian_constant_check(const Scenario& sc, const Trajectory& traj,
                                            const ControlTrajectory& u,
                                            const CostateTrajectory& costates);

struct EtaNode {
  double u = 0.0;
  double x = 0.0;
  double eta = 0.0;
  double x_final = 0.0;
};

double eta_derivative(const EpidemicModel& model, const CostSpec& cost, const EtaNode& node);

}  // namespace epicon
