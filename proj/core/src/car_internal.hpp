// Internal helpers shared between car.cpp and car_fast.cpp.
#pragma once

#include <string>
#include <vector>

#include "meran/beamforming.hpp"
#include "meran/car.hpp"
#include "vd_problem.hpp"

namespace meran::detail_car {

void note(RunLog* log, const std::string& s);

std::vector<double> targets_of(const std::vector<LocalDecision>& dec,
                               const std::vector<int>& members);
std::vector<CVector> channels_of(const Scenario& sc,
                                 const std::vector<int>& members);

PowerControlResult recover_powers(const Scenario& sc,
                                  const std::vector<int>& members,
                                  const std::vector<LocalDecision>& dec,
                                  const std::vector<CVector>& v);

Allocation finalize(const Scenario& sc, const std::vector<LocalDecision>& dec,
                    const Classification& base, const std::vector<int>& served,
                    const PowerControlResult& pr, RunLog* log);

double rate_weight_sum(const Scenario& sc, const std::vector<LocalDecision>& dec,
                       const std::vector<int>& members);

std::vector<double> vd_rates(const detail::VdBuilder& b,
                             const Eigen::VectorXd& x);

}  // namespace meran::detail_car
