#include "meran/dlda.hpp"

#include <cmath>

namespace meran {

double optimal_local_frequency(const TaskSpec& task) {
  return task.cycles / task.deadline;
}

double local_power(double f, double kappa, double nu) {
  return kappa * std::pow(f, nu);
}

double min_offload_rate(const TaskSpec& task, double clone_speed) {
  double window = task.deadline - task.cycles / clone_speed;
  if (window <= 0.0)
    throw CloudInfeasible("task misses its deadline even on a mobile clone");
  return task.bits / window;
}

double min_tx_power(double r_min, const CVector& h, double sigma2,
                    double bandwidth) {
  double h2 = h.squaredNorm();
  if (h2 <= 0.0) throw std::invalid_argument("min_tx_power: zero channel");
  return (std::exp2(r_min / bandwidth) - 1.0) * sigma2 / h2;
}

double max_local_power_budget(const TaskSpec& task, double e_local_star,
                              double clone_speed) {
  double window = task.deadline - task.cycles / clone_speed;
  if (window <= 0.0)
    throw CloudInfeasible("task misses its deadline even on a mobile clone");
  return e_local_star / window;
}

std::pair<Classification, std::vector<LocalDecision>> classify(const Scenario& sc) {
  const int n = sc.n();
  const SystemConfig& cfg = sc.cfg;
  Classification cls;
  cls.labels.assign(n, UEClass::R);
  std::vector<LocalDecision> dec(n);

  for (int i = 0; i < n; ++i) {
    const UEProfile& ue = sc.ues[i];
    LocalDecision& d = dec[i];
    d.f_star = optimal_local_frequency(ue.task);
    d.p_local_star = local_power(d.f_star, ue.kappa, ue.nu);
    d.e_local_star = d.p_local_star * ue.task.deadline;

    double window = ue.task.deadline - ue.task.cycles / cfg.clone_speed;
    d.cloud_feasible = window > 0.0;

    const bool local_feasible = d.f_star <= ue.f_local_max;
    if (!local_feasible) {
      if (!d.cloud_feasible) {
        // Infeasible everywhere: bypass admission, reschedule.
        d.w = false;
        d.s = false;
        cls.labels[i] = UEClass::R;
        continue;
      }
      d.r_min = min_offload_rate(ue.task, cfg.clone_speed);
      d.w = false;
      d.s = true;
      cls.labels[i] = UEClass::OH;
      continue;
    }

    d.w = true;
    d.s = true;
    if (!d.cloud_feasible) {
      d.s = false;  // can only run locally
      cls.labels[i] = UEClass::L;
      continue;
    }
    d.r_min = min_offload_rate(ue.task, cfg.clone_speed);
    // Channels are noise-normalized, so sigma2 = 1 and the result is scaled
    // back to watts for the budget comparison.
    d.p_tr_min = sc.to_watts(
        min_tx_power(d.r_min, sc.channels[i], 1.0, cfg.bandwidth));
    d.p_local_max = max_local_power_budget(ue.task, d.e_local_star, cfg.clone_speed);
    if (d.p_tr_min >= d.p_local_max) {
      d.s = false;
      cls.labels[i] = UEClass::L;
    } else {
      cls.labels[i] = UEClass::OL;
    }
  }
  return {cls, dec};
}

}  // namespace meran
