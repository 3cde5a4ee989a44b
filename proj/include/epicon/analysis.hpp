#pragma once

#include <string>
#include <vector>

#include "epicon/pmp.hpp"

namespace epicon {

enum class ArcLabel { zero, max, singular, interior };

std::string to_string(ArcLabel label);

// Node-index range [k_a, k_b] (inclusive) carrying one label; the interval
// in time runs from grid[k_a] to the start of the next run.
struct LabeledInterval {
  double t_a = 0.0;
  double t_b = 0.0;
  int k_a = 0;
  int k_b = 0;
  ArcLabel label = ArcLabel::zero;
};

struct ControlStructure {
  std::vector<std::vector<LabeledInterval>> intervals;  // one list per component
  std::vector<double> switch_times;
  std::string sequence_string;
};

struct ArcInterval {
  int component = 0;
  int k_a = 0;
  int k_b = 0;
  double t_a = 0.0;
  double t_b = 0.0;
};

struct ArcDiagnostics {
  bool applicable = true;
  std::string reason;
  double feedback_residual_max = 0.0;
  bool x_monotone_decreasing = false;
  double s_at_entry = 0.0;
  double discontinuity_jump_at_entry = 0.0;
  double discontinuity_jump_at_exit = 0.0;
  // Trimmed core on which the feedback law and monotonicity were evaluated.
  double core_t_a = 0.0;
  double core_t_b = 0.0;
};

// tol_label / tol_sing < 0 select the defaults 1e-3*u_bar_i and 5e-2*C_i.
ControlStructure classify_structure(const ControlTrajectory& u, const VectorXd& u_bar,
                                    const CostateTrajectory& costates, const CostSpec& cost,
                                    double tol_label = -1.0, double tol_sing = -1.0);

std::vector<ArcInterval> detect_singular_arcs(const CostateTrajectory& costates,
                                              const CostSpec& cost, double tol_sing = -1.0);

struct SolveReport;

ArcDiagnostics verify_singular_arc(const Scenario& sc, const SolveReport& report,
                                   const ArcInterval& arc);

bool terminal_deactivation_check(const ControlTrajectory& u, const CostateTrajectory& costates,
                                 const CostSpec& cost);

}  // namespace epicon
