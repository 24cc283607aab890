// Monte-Carlo sweeps over the BBU and mobile-clone capacities with CSV
// emission and trend checking.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "meran/car.hpp"
#include "meran/scenario.hpp"
#include "meran/types.hpp"

namespace meran {

enum class SweptParam { FB, FC };

inline const char* to_string(SweptParam p) {
  return p == SweptParam::FB ? "F_B" : "F_C";
}

struct SweepSpec {
  SweptParam param = SweptParam::FB;
  std::vector<double> values;
  double fixed_other = 0.0;  // F^C when sweeping F^B and vice versa
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> algorithms;  // local, es, car, car-p, car-d
  int n = 20;
  int j = 20;
  int k = 2;
  double area_m = 2000.0;
  SystemConfig base_cfg;
  int es_n_cap = 12;
  int jobs = 1;
};

struct MetricsRow {
  std::string algorithm;
  std::string swept_param;
  double value = 0.0;
  int seed_count = 0;
  double mean_sum_power_w = 0.0;
  double mean_completed = 0.0;
  double mc_util = 0.0;
  double bbu_util = 0.0;
  bool flagged = false;  // at least one seed failed and was excluded
};

std::vector<std::string> validate_spec(const SweepSpec& spec);

// Runs one algorithm by name on a prepared scenario.
Allocation run_algorithm(const std::string& name, const Scenario& sc,
                         const Classification& cls,
                         const std::vector<LocalDecision>& dec,
                         int es_n_cap = 12, RunLog* log = nullptr);

// All algorithms within one (value, seed) cell consume the identical
// scenario; rows are ordered (algorithm, value) and deterministic.
std::vector<MetricsRow> run_sweep(const SweepSpec& spec);

// Fixed schema: algorithm,swept_param,value,seed_count,mean_sum_power_w,
// mean_completed,mc_util,bbu_util
void write_csv(const std::vector<MetricsRow>& rows, std::ostream& os);

struct TrendReport {
  bool passed = true;
  std::vector<std::string> notes;     // in-band wobbles and observations
  std::vector<std::string> failures;  // offending (algorithm, value) pairs
};

// Mean sum power must be non-increasing in the swept capacity within a 2%
// band and flat (2%) past completion saturation, per algorithm.
TrendReport trend_checks(const std::vector<MetricsRow>& rows);

}  // namespace meran
