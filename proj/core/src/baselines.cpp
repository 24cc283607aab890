#include "meran/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "meran/beamforming.hpp"
#include "car_internal.hpp"

namespace meran {

using namespace detail_car;

Allocation local_only(const Scenario& sc) {
  const int n = sc.n();
  Allocation a = make_empty_allocation(n);
  for (int i = 0; i < n; ++i) {
    const UEProfile& ue = sc.ues[i];
    double f_star = optimal_local_frequency(ue.task);
    if (f_star <= ue.f_local_max) {
      a.classification.labels[i] = UEClass::L;
      a.local_power[i] = local_power(f_star, ue.kappa, ue.nu);
      a.completed[i] = true;
    }
  }
  a.sum_power = a.recompute_sum_power();
  return a;
}

Allocation exhaustive_search(const Scenario& sc, const Classification& cls,
                             const std::vector<LocalDecision>& dec, int n_cap,
                             RunLog* log) {
  if (log) {
    if (log->algorithm.empty()) log->algorithm = "es";
  }
  const SystemConfig& cfg = sc.cfg;
  std::vector<int> o = cls.members(UEClass::OH);
  {
    auto ol = cls.members(UEClass::OL);
    o.insert(o.end(), ol.begin(), ol.end());
    std::sort(o.begin(), o.end());
  }
  const int no = (int)o.size();
  if (no > n_cap)
    throw SubsetTooLarge("exhaustive_search: |O| = " + std::to_string(no) +
                         " exceeds n_cap = " + std::to_string(n_cap));

  // Power of UEs that run locally in every subset (the DLDA L set).
  double base_local = 0.0;
  for (int i : cls.members(UEClass::L)) base_local += dec[i].p_local_star;

  bool have_best = false;
  int best_oh = -1, best_ol = -1;
  double best_power = 0.0;
  std::vector<int> best_set;
  PowerControlResult best_pr;

  const long total = 1L << no;
  for (long mask = 0; mask < total; ++mask) {
    std::vector<int> s;
    for (int t = 0; t < no; ++t)
      if (mask & (1L << t)) s.push_back(o[t]);

    if ((int)s.size() > cfg.clone_capacity) continue;
    if (rate_weight_sum(sc, dec, s) > cfg.bbu_capacity) continue;

    PowerControlResult pr;
    if (!s.empty()) {
      pr = fixed_point_power(channels_of(sc, s), targets_of(dec, s), cfg);
      if (!pr.converged) continue;
    }

    int n_oh = 0, n_ol = 0;
    double power = base_local;
    bool c5_ok = true;
    for (size_t t = 0; t < s.size(); ++t) {
      int i = s[t];
      if (cls.labels[i] == UEClass::OH) {
        ++n_oh;
      } else {
        ++n_ol;
        if (sc.to_watts(pr.powers[t]) > dec[i].p_local_star * (1.0 + 1e-9)) {
          c5_ok = false;
          break;
        }
      }
      power += sc.to_watts(pr.powers[t]);
    }
    if (!c5_ok) continue;
    // O^L members outside S run locally.
    for (int i : cls.members(UEClass::OL))
      if (std::find(s.begin(), s.end(), i) == s.end())
        power += dec[i].p_local_star;

    if (!have_best || n_oh > best_oh ||
        (n_oh == best_oh &&
         (n_ol > best_ol || (n_ol == best_ol && power < best_power)))) {
      have_best = true;
      best_oh = n_oh;
      best_ol = n_ol;
      best_power = power;
      best_set = s;
      best_pr = pr;
    }
  }
  if (log) log->subsets_enumerated = total;

  if (!have_best)  // only the empty set was feasible-checkable; serve no one
    return finalize(sc, dec, cls, {}, PowerControlResult{}, log);
  return finalize(sc, dec, cls, best_set, best_pr, log);
}

}  // namespace meran
