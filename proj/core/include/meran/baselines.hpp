// Reference points: local-only execution and exhaustive search over
// offloading subsets.
#pragma once

#include <stdexcept>

#include "meran/car.hpp"
#include "meran/dlda.hpp"
#include "meran/scenario.hpp"

namespace meran {

struct SubsetTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every locally-feasible UE runs at f*; the rest are deferred.
Allocation local_only(const Scenario& sc);

// Enumerates all subsets of O = OH u OL (2^|O| candidates), keeps those
// meeting the capacity caps, radio feasibility, and C5 for the O^L part,
// and selects by the priority-lexicographic order: max |S n OH|, then
// max |S n OL|, then min sum power. Throws SubsetTooLarge past n_cap.
Allocation exhaustive_search(const Scenario& sc, const Classification& cls,
                             const std::vector<LocalDecision>& dec,
                             int n_cap = 12, RunLog* log = nullptr);

}  // namespace meran
