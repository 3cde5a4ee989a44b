#include "epicon/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "epicon/solver.hpp"

namespace epicon {

namespace {

constexpr int kMinArcNodes = 3;
constexpr double kCoreResidualTol = 2e-3;
constexpr double kCoreTrimFraction = 0.1;

struct Run {
  int k_a;
  int k_b;
  ArcLabel label;
  int nodes() const { return k_b - k_a + 1; }
};

std::vector<Run> merge_nodes(const std::vector<ArcLabel>& labels) {
  std::vector<Run> runs;
  for (int k = 0; k < static_cast<int>(labels.size()); ++k) {
    if (!runs.empty() && runs.back().label == labels[k])
      runs.back().k_b = k;
    else
      runs.push_back({k, k, labels[k]});
  }
  return runs;
}

void fuse_same_label(std::vector<Run>& runs) {
  for (size_t j = 1; j < runs.size();) {
    if (runs[j].label == runs[j - 1].label) {
      runs[j - 1].k_b = runs[j].k_b;
      runs.erase(runs.begin() + j);
    } else {
      ++j;
    }
  }
}

void absorb_short_runs(std::vector<Run>& runs) {
  while (runs.size() > 1) {
    int shortest = -1;
    for (int j = 0; j < static_cast<int>(runs.size()); ++j) {
      if (runs[j].nodes() < kMinArcNodes &&
          (shortest < 0 || runs[j].nodes() < runs[shortest].nodes()))
        shortest = j;
    }
    if (shortest < 0) break;
    const int j = shortest;
    int target;
    if (j == 0)
      target = 1;
    else if (j == static_cast<int>(runs.size()) - 1)
      target = j - 1;
    else
      target = runs[j + 1].nodes() > runs[j - 1].nodes() ? j + 1 : j - 1;
    if (target < j)
      runs[target].k_b = runs[j].k_b;
    else
      runs[target].k_a = runs[j].k_a;
    runs.erase(runs.begin() + j);
    fuse_same_label(runs);
  }
}

std::string sequence_token(const Run& run) {
  switch (run.label) {
    case ArcLabel::zero: return "bang(0)";
    case ArcLabel::max: return "bang(max)";
    case ArcLabel::singular: return "singular";
    case ArcLabel::interior: return "interior";
  }
  return "?";
}

}  // namespace

std::string to_string(ArcLabel label) {
  switch (label) {
    case ArcLabel::zero: return "zero";
    case ArcLabel::max: return "max";
    case ArcLabel::singular: return "singular";
    case ArcLabel::interior: return "interior";
  }
  return "?";
}

ControlStructure classify_structure(const ControlTrajectory& u, const VectorXd& u_bar,
                                    const CostateTrajectory& costates, const CostSpec& cost,
                                    double tol_label, double tol_sing) {
  const int N = static_cast<int>(u.grid.size()) - 1;
  const int n = static_cast<int>(u.u.cols());
  ControlStructure out;
  out.intervals.resize(n);
  std::vector<std::string> sequences;

  for (int i = 0; i < n; ++i) {
    const double tol = tol_label > 0.0 ? tol_label : 1e-3 * u_bar(i);
    const double tols = tol_sing > 0.0 ? tol_sing : 5e-2 * cost.C(i);
    const bool linear = cost.q(i) == 1.0;
    std::vector<ArcLabel> labels(N + 1);
    for (int k = 0; k <= N; ++k) {
      const double v = u.u(k, i);
      if (v <= tol)
        labels[k] = ArcLabel::zero;
      else if (v >= u_bar(i) - tol)
        labels[k] = ArcLabel::max;
      else if (linear && std::abs(costates.Psi(k, i) - cost.C(i)) <= tols)
        labels[k] = ArcLabel::singular;
      else
        labels[k] = ArcLabel::interior;
    }
    std::vector<Run> runs = merge_nodes(labels);
    absorb_short_runs(runs);

    std::string seq;
    for (size_t j = 0; j < runs.size(); ++j) {
      LabeledInterval iv;
      iv.k_a = runs[j].k_a;
      iv.k_b = runs[j].k_b;
      iv.t_a = u.grid(runs[j].k_a);
      iv.t_b = j + 1 < runs.size() ? u.grid(runs[j + 1].k_a) : u.grid(N);
      iv.label = runs[j].label;
      out.intervals[i].push_back(iv);
      if (j > 0) {
        seq += "-";
        out.switch_times.push_back(iv.t_a);
      }
      seq += sequence_token(runs[j]);
    }
    sequences.push_back(seq);
  }

  std::sort(out.switch_times.begin(), out.switch_times.end());
  out.switch_times.erase(std::unique(out.switch_times.begin(), out.switch_times.end(),
                                     [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                         out.switch_times.end());

  if (n == 1) {
    out.sequence_string = sequences[0];
  } else {
    for (int i = 0; i < n; ++i) {
      if (i > 0) out.sequence_string += ";";
      out.sequence_string += "u" + std::to_string(i + 1) + "=" + sequences[i];
    }
  }
  return out;
}

std::vector<ArcInterval> detect_singular_arcs(const CostateTrajectory& costates,
                                              const CostSpec& cost, double tol_sing) {
  if (!cost.any_linear())
    throw NoLinearComponents("singular arc detection requires a linear cost component");
  const int N = static_cast<int>(costates.grid.size()) - 1;
  std::vector<ArcInterval> arcs;
  for (int i = 0; i < cost.q.size(); ++i) {
    if (cost.q(i) != 1.0) continue;
    const double tol = tol_sing > 0.0 ? tol_sing : 5e-2 * cost.C(i);
    int start = -1;
    for (int k = 0; k <= N + 1; ++k) {
      const bool on = k <= N && std::abs(costates.Psi(k, i) - cost.C(i)) <= tol;
      if (on && start < 0) start = k;
      if (!on && start >= 0) {
        if (k - start >= kMinArcNodes)
          arcs.push_back({i, start, k - 1, costates.grid(start), costates.grid(k - 1)});
        start = -1;
      }
    }
  }
  return arcs;
}

ArcDiagnostics verify_singular_arc(const Scenario& sc, const SolveReport& report,
                                   const ArcInterval& arc) {
  ArcDiagnostics diag;
  if (sc.model.n != 1 || sc.model.rho != 0.0) {
    diag.applicable = false;
    diag.reason = "requires n=1 and rho=0";
    return diag;
  }
  const VectorXd x_entry = report.traj.x.row(arc.k_a);
  if (hess_nu_diag(sc.cost, x_entry)(0) <= 0.0) {
    diag.applicable = false;
    diag.reason = "feedback law degenerates";
    return diag;
  }

  const int len = arc.k_b - arc.k_a + 1;
  const int max_trim = static_cast<int>(kCoreTrimFraction * len);
  std::vector<double> residual(len);
  for (int k = arc.k_a; k <= arc.k_b; ++k) {
    FeedbackControl fb;
    try {
      fb = feedback_singular_n1(sc.model, sc.cost, report.traj.s(k), report.traj.x(k, 0),
                                report.costates.eta(k));
    } catch (const Error& e) {
      diag.applicable = false;
      diag.reason = e.what();
      return diag;
    }
    residual[k - arc.k_a] = std::abs(report.u_opt.u(k, arc.component) - fb.clamped);
  }

  int a = arc.k_a, b = arc.k_b;
  while (a - arc.k_a < max_trim && residual[a - arc.k_a] > kCoreResidualTol) ++a;
  while (arc.k_b - b < max_trim && residual[b - arc.k_a] > kCoreResidualTol) --b;
  if (a >= b) {
    a = arc.k_a;
    b = arc.k_b;
  }

  diag.feedback_residual_max = 0.0;
  for (int k = a; k <= b; ++k)
    diag.feedback_residual_max = std::max(diag.feedback_residual_max, residual[k - arc.k_a]);
  diag.x_monotone_decreasing = true;
  for (int k = a; k < b; ++k) {
    if (!(report.traj.x(k + 1, 0) < report.traj.x(k, 0))) {
      diag.x_monotone_decreasing = false;
      break;
    }
  }
  diag.s_at_entry = report.traj.s(arc.k_a);
  diag.discontinuity_jump_at_entry =
      arc.k_a > 0 ? std::abs(report.u_opt.u(a, arc.component) -
                             report.u_opt.u(arc.k_a - 1, arc.component))
                  : 0.0;
  const int N = static_cast<int>(report.traj.grid.size()) - 1;
  diag.discontinuity_jump_at_exit =
      arc.k_b < N ? std::abs(report.u_opt.u(b, arc.component) -
                             report.u_opt.u(arc.k_b + 1, arc.component))
                  : 0.0;
  diag.core_t_a = report.traj.grid(a);
  diag.core_t_b = report.traj.grid(b);
  return diag;
}

bool terminal_deactivation_check(const ControlTrajectory& u, const CostateTrajectory& costates,
                                 const CostSpec& cost) {
  (void)costates;
  const int N = static_cast<int>(u.grid.size()) - 1;
  if (N + 1 < kMinArcNodes) return false;
  for (int i = 0; i < cost.q.size(); ++i) {
    if (cost.q(i) != 1.0) continue;
    for (int k = N - kMinArcNodes + 1; k <= N; ++k)
      if (u.u(k, i) > 1e-12) return false;
  }
  return true;
}

}  // namespace epicon
