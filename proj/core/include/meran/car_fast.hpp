// Iteration-free greedy admission: CAR-P (largest saved power first) and
// CAR-D (smallest required rate first). Case I is shared with the car module;
// each fast run is at most two solves plus one sort.
#pragma once

#include "meran/car.hpp"

namespace meran {

// Full dispatchers: Case I -> case1, otherwise the greedy case handlers.
Allocation carp(const Scenario& sc, const Classification& cls,
                const std::vector<LocalDecision>& dec, RunLog* log = nullptr);
Allocation card(const Scenario& sc, const Classification& cls,
                const std::vector<LocalDecision>& dec, RunLog* log = nullptr);

Allocation carp_case2(const Scenario& sc, const Classification& cls,
                      const std::vector<LocalDecision>& dec,
                      RunLog* log = nullptr);
Allocation carp_case3(const Scenario& sc, const Classification& cls,
                      const std::vector<LocalDecision>& dec,
                      RunLog* log = nullptr);
Allocation card_case2(const Scenario& sc, const Classification& cls,
                      const std::vector<LocalDecision>& dec,
                      RunLog* log = nullptr);
Allocation card_case3(const Scenario& sc, const Classification& cls,
                      const std::vector<LocalDecision>& dec,
                      RunLog* log = nullptr);

}  // namespace meran
