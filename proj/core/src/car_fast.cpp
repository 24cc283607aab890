#include "meran/car_fast.hpp"

#include <algorithm>
#include <cmath>

#include "meran/socp.hpp"
#include "car_internal.hpp"
#include "vd_problem.hpp"

namespace meran {

using namespace detail_car;

namespace {

enum class GreedyKey { Power, SavedPower, Rate };

struct Candidate {
  int ue = -1;
  double score = 0.0;  // sort key, ascending
  CVector v;           // capacity-free beamformer (may be empty in fallback)
};

// Re-solves powers for the accepted set. Tries the optimal fixed point
// first, then frozen-receiver recovery from the capacity-free beamformers,
// then sheds the last accepted candidate (prefix order is preserved).
PowerControlResult final_resolve(const Scenario& sc,
                                 const std::vector<LocalDecision>& dec,
                                 std::vector<int>& served,
                                 std::vector<CVector>& v, int protected_count,
                                 RunLog* log) {
  while (true) {
    if (served.empty()) return PowerControlResult{};
    auto h = channels_of(sc, served);
    auto t = targets_of(dec, served);
    PowerControlResult pr = fixed_point_power(h, t, sc.cfg);
    if (pr.converged) return pr;
    bool have_v = std::all_of(v.begin(), v.end(),
                              [](const CVector& vi) { return vi.size() > 0; });
    if (have_v) {
      pr = uplink_powers_from_duality(v, h, t, sc.cfg);
      if (pr.converged) return pr;
    }
    if ((int)served.size() <= protected_count) {
      note(log, "final re-solve failed on committed set");
      return pr;
    }
    note(log, "final re-solve failed; shedding ue " +
                  std::to_string(served.back()));
    served.pop_back();
    v.pop_back();
  }
}

// Closed-form degraded mode: order candidates by the interference-free
// minimum transmit power and accept greedily under C6/C7.
Allocation closed_form_fallback(const Scenario& sc, const Classification& cls,
                                const std::vector<LocalDecision>& dec,
                                bool case3, RunLog* log) {
  note(log, "conic failure; closed-form p_tr_min ordering");
  const SystemConfig& cfg = sc.cfg;
  auto ptr_min = [&](int i) {
    return min_tx_power(dec[i].r_min, sc.channels[i], 1.0, cfg.bandwidth);
  };

  std::vector<int> served;
  double rate_used = 0.0;
  auto try_accept = [&](int i) {
    double ru = dec[i].r_min * cfg.cycles_per_bit;
    if ((int)served.size() + 1 > cfg.clone_capacity) return false;
    if (rate_used + ru > cfg.bbu_capacity) return false;
    served.push_back(i);
    rate_used += ru;
    return true;
  };

  std::vector<int> oh = cls.members(UEClass::OH);
  std::sort(oh.begin(), oh.end(), [&](int a, int b) {
    double pa = ptr_min(a), pb = ptr_min(b);
    return pa != pb ? pa < pb : a < b;
  });
  int protected_count = 0;
  if (case3) {
    // O^H is committed by the Case III branch condition.
    served = cls.members(UEClass::OH);
    rate_used = rate_weight_sum(sc, dec, served);
    protected_count = (int)served.size();
    std::vector<int> ol = cls.members(UEClass::OL);
    std::sort(ol.begin(), ol.end(), [&](int a, int b) {
      double pa = ptr_min(a), pb = ptr_min(b);
      return pa != pb ? pa < pb : a < b;
    });
    for (int i : ol)
      if (!try_accept(i)) break;
  } else {
    for (int i : oh)
      if (!try_accept(i)) break;
  }
  std::sort(served.begin() + protected_count, served.end());
  std::vector<CVector> v(served.size());
  PowerControlResult pr =
      final_resolve(sc, dec, served, v, protected_count, log);
  return finalize(sc, dec, cls, served, pr, log);
}

Allocation greedy_case(const Scenario& sc, const Classification& cls,
                       const std::vector<LocalDecision>& dec, bool case3,
                       GreedyKey key, const char* algo, RunLog* log) {
  if (log) {
    if (log->algorithm.empty()) log->algorithm = algo;
    log->case_id = case3 ? 3 : 2;
  }
  const SystemConfig& cfg = sc.cfg;
  std::vector<int> oh = cls.members(UEClass::OH);
  std::vector<int> ol = case3 ? cls.members(UEClass::OL) : std::vector<int>{};

  std::vector<int> members = oh;
  members.insert(members.end(), ol.begin(), ol.end());
  std::sort(members.begin(), members.end());
  if (members.empty())
    return finalize(sc, dec, cls, {}, PowerControlResult{}, log);

  std::vector<char> slacked(members.size(), 1);
  if (case3)
    for (size_t t = 0; t < members.size(); ++t)
      if (cls.labels[members[t]] == UEClass::OH) slacked[t] = 0;

  // One capacity-free solve: rate targets, no capacity caps.
  detail::VdBuilder b(sc, members, targets_of(dec, members), slacked);
  SocpSolution sol = solve(b.base_problem(effective_big_m(sc, dec)),
                           cfg.solver_tol);
  if (sol.status != SolveStatus::Optimal)
    return closed_form_fallback(sc, cls, dec, case3, log);

  auto norms = b.vnorm2(sol.x);
  auto rates = vd_rates(b, sol.x);
  std::vector<CVector> vfull = b.lift(sol.x);

  // Members actually served in the capacity-free solution.
  std::vector<int> feas_pos;
  for (size_t t = 0; t < members.size(); ++t) {
    bool hard = !slacked[t];
    if (hard || (norms[t] >= cfg.zero_threshold &&
                 rates[t] >= dec[members[t]].r_min * (1.0 - 1e-6)))
      feas_pos.push_back((int)t);
    else if (!case3)
      note(log, "ue " + std::to_string(members[t]) +
                    " radio-infeasible in capacity-free solve");
  }
  std::vector<int> feas_ue;
  std::vector<CVector> feas_v;
  for (int t : feas_pos) {
    feas_ue.push_back(members[t]);
    feas_v.push_back(vfull[t]);
  }
  PowerControlResult pr0 = recover_powers(sc, feas_ue, dec, feas_v);
  if (!pr0.converged) return closed_form_fallback(sc, cls, dec, case3, log);

  // Greedy admission.
  std::vector<int> served;
  std::vector<CVector> v_served;
  double rate_used = 0.0;
  int protected_count = 0;
  std::vector<Candidate> cand;
  const char* set_id = case3 ? (key == GreedyKey::Rate ? "D2" : "D1") : "";
  for (size_t q = 0; q < feas_ue.size(); ++q) {
    int i = feas_ue[q];
    if (case3 && cls.labels[i] == UEClass::OH) {
      served.push_back(i);
      v_served.push_back(feas_v[q]);
      rate_used += dec[i].r_min * cfg.cycles_per_bit;
      continue;
    }
    double score = 0.0;
    if (case3) {
      // D1/D2 membership: offloading must save power versus local.
      double p_local = sc.to_normalized(dec[i].p_local_star);
      if (pr0.powers[q] > p_local) {
        if (log) log->prunes.push_back({set_id, i, 0.0});
        continue;
      }
      score = key == GreedyKey::Rate
                  ? dec[i].r_min
                  : -(p_local - pr0.powers[q]) / p_local;  // -epsilon
    } else {
      score = key == GreedyKey::Rate ? dec[i].r_min : pr0.powers[q];
    }
    cand.push_back({i, score, feas_v[q]});
  }
  protected_count = (int)served.size();
  std::stable_sort(cand.begin(), cand.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.score != b.score ? a.score < b.score
                                               : a.ue < b.ue;
                   });
  for (const Candidate& c : cand) {
    double ru = dec[c.ue].r_min * cfg.cycles_per_bit;
    if ((int)served.size() + 1 > cfg.clone_capacity ||
        rate_used + ru > cfg.bbu_capacity) {
      if (log) log->prunes.push_back({case3 ? set_id : "C6/C7", c.ue, c.score});
      break;  // prefix rule: stop at the first capacity violation
    }
    served.push_back(c.ue);
    v_served.push_back(c.v);
    rate_used += ru;
  }

  PowerControlResult pr =
      final_resolve(sc, dec, served, v_served, protected_count, log);
  return finalize(sc, dec, cls, served, pr, log);
}

}  // namespace

Allocation carp_case2(const Scenario& sc, const Classification& cls,
                      const std::vector<LocalDecision>& dec, RunLog* log) {
  return greedy_case(sc, cls, dec, false, GreedyKey::Power, "car-p", log);
}

Allocation carp_case3(const Scenario& sc, const Classification& cls,
                      const std::vector<LocalDecision>& dec, RunLog* log) {
  return greedy_case(sc, cls, dec, true, GreedyKey::SavedPower, "car-p", log);
}

Allocation card_case2(const Scenario& sc, const Classification& cls,
                      const std::vector<LocalDecision>& dec, RunLog* log) {
  return greedy_case(sc, cls, dec, false, GreedyKey::Rate, "car-d", log);
}

Allocation card_case3(const Scenario& sc, const Classification& cls,
                      const std::vector<LocalDecision>& dec, RunLog* log) {
  return greedy_case(sc, cls, dec, true, GreedyKey::Rate, "car-d", log);
}

namespace {

Allocation fast_dispatch(const Scenario& sc, const Classification& cls,
                         const std::vector<LocalDecision>& dec, bool carp_mode,
                         RunLog* log) {
  if (log && log->algorithm.empty()) log->algorithm = carp_mode ? "car-p" : "car-d";
  const SystemConfig& cfg = sc.cfg;
  std::vector<int> o = cls.members(UEClass::OH);
  {
    auto olm = cls.members(UEClass::OL);
    o.insert(o.end(), olm.begin(), olm.end());
  }
  auto oh = cls.members(UEClass::OH);
  if ((int)o.size() <= cfg.clone_capacity &&
      rate_weight_sum(sc, dec, o) <= cfg.bbu_capacity)
    return case1(sc, cls, dec, log);
  if ((int)oh.size() <= cfg.clone_capacity &&
      rate_weight_sum(sc, dec, oh) <= cfg.bbu_capacity)
    return carp_mode ? carp_case3(sc, cls, dec, log)
                     : card_case3(sc, cls, dec, log);
  return carp_mode ? carp_case2(sc, cls, dec, log)
                   : card_case2(sc, cls, dec, log);
}

}  // namespace

Allocation carp(const Scenario& sc, const Classification& cls,
                const std::vector<LocalDecision>& dec, RunLog* log) {
  return fast_dispatch(sc, cls, dec, true, log);
}

Allocation card(const Scenario& sc, const Classification& cls,
                const std::vector<LocalDecision>& dec, RunLog* log) {
  return fast_dispatch(sc, cls, dec, false, log);
}

}  // namespace meran
