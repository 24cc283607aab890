// Decentralized per-UE pre-screening: local feasibility, minimum offload
// rate/power, and offloading interest.
#pragma once

#include <stdexcept>
#include <vector>

#include "meran/scenario.hpp"
#include "meran/types.hpp"

namespace meran {

// Raised when a task cannot meet its deadline even on a mobile clone.
struct CloudInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-UE outcome of the local decision. Powers in watts.
struct LocalDecision {
  double f_star = 0.0;        // optimal local frequency, cycles/s
  double p_local_star = 0.0;  // power at f_star, W
  double e_local_star = 0.0;  // energy at f_star, J
  double r_min = 0.0;         // minimum offload rate, bits/s
  double p_tr_min = 0.0;      // interference-free minimum offload power, W
  double p_local_max = 0.0;   // local power budget for the offload window, W
  bool w = false;             // can complete (locally or offloaded)
  bool s = false;             // wants to offload
  bool cloud_feasible = true;
};

double optimal_local_frequency(const TaskSpec& task);
double local_power(double f, double kappa, double nu);

// R_min = D / (T - F/f^C). Throws CloudInfeasible when the deadline leaves
// no transmission time.
double min_offload_rate(const TaskSpec& task, double clone_speed);

// Interference-free MMSE bound (2^(R/B)-1) * sigma2 / ||h||^2.
double min_tx_power(double r_min, const CVector& h, double sigma2, double bandwidth);

// p^L_max = E^L* / (T - F/f^C). Same feasibility precondition as the rate.
double max_local_power_budget(const TaskSpec& task, double e_local_star,
                              double clone_speed);

// Algorithm: per UE, f* > f_local_max sends it to OH; otherwise it goes OL
// unless p_tr_min >= p_local_max, which keeps it local. UEs infeasible both
// locally and in the cloud go straight to R.
std::pair<Classification, std::vector<LocalDecision>> classify(const Scenario& sc);

}  // namespace meran
