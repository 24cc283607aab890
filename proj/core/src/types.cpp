#include "meran/types.hpp"

namespace meran {

namespace {

void check_positive(std::vector<std::string>& out, double v, const char* name) {
  if (!(v > 0.0)) out.push_back(std::string(name) + " must be positive");
}

}  // namespace

std::vector<std::string> validate_config(const SystemConfig& cfg) {
  std::vector<std::string> out;
  check_positive(out, cfg.bandwidth, "bandwidth");
  check_positive(out, static_cast<double>(cfg.clone_capacity), "clone_capacity");
  check_positive(out, cfg.bbu_capacity, "bbu_capacity");
  check_positive(out, cfg.cycles_per_bit, "cycles_per_bit");
  check_positive(out, cfg.clone_speed, "clone_speed");
  check_positive(out, cfg.theta, "theta");
  check_positive(out, static_cast<double>(cfg.sca_max_iters), "sca_max_iters");
  check_positive(out, cfg.sca_tol, "sca_tol");
  check_positive(out, static_cast<double>(cfg.fp_max_iters), "fp_max_iters");
  check_positive(out, cfg.fp_tol, "fp_tol");
  check_positive(out, cfg.zero_threshold, "zero_threshold");
  check_positive(out, cfg.solver_tol, "solver_tol");
  check_positive(out, cfg.duality_tol, "duality_tol");
  check_positive(out, cfg.f_local_max, "f_local_max");
  check_positive(out, cfg.kappa, "kappa");
  check_positive(out, cfg.d_min_m, "d_min_m");
  if (cfg.big_m < 0.0) out.push_back("big_m must be nonnegative (0 = auto)");
  if (!(cfg.nu >= 2.0)) out.push_back("nu must be >= 2");
  return out;
}

std::vector<std::string> validate_profile(const UEProfile& ue) {
  std::vector<std::string> out;
  check_positive(out, ue.task.cycles, "task.cycles");
  check_positive(out, ue.task.bits, "task.bits");
  check_positive(out, ue.task.deadline, "task.deadline");
  check_positive(out, ue.f_local_max, "f_local_max");
  check_positive(out, ue.kappa, "kappa");
  if (!(ue.nu >= 2.0)) out.push_back("nu must be >= 2");
  return out;
}

}  // namespace meran
