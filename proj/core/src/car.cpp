#include "meran/car.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "meran/beamforming.hpp"
#include "meran/car_fast.hpp"
#include "meran/socp.hpp"
#include "car_internal.hpp"
#include "vd_problem.hpp"

namespace meran {

double f_theta(double x, double theta) { return x / (x + theta); }

double f_theta_grad(double x, double theta) {
  const double d = x + theta;
  return theta / (d * d);
}

void RunLog::write(std::ostream& os) const {
  os << "run algorithm=" << algorithm << " case=" << case_id << "\n";
  for (size_t t = 0; t < sca_traces.size(); ++t) {
    os << "sca_trace " << t;
    for (double v : sca_traces[t].objective) os << ' ' << v;
    os << "\n";
  }
  for (const auto& p : prunes)
    os << "prune set=" << p.set_id << " ue=" << p.ue << " score=" << p.score
       << "\n";
  os << "accepted";
  for (int i : accepted) os << ' ' << i;
  os << "\n";
  if (subsets_enumerated > 0)
    os << "subsets_enumerated " << subsets_enumerated << "\n";
  for (const auto& s : notes) os << "note " << s << "\n";
}

double effective_big_m(const Scenario& sc, const std::vector<LocalDecision>& dec) {
  if (sc.cfg.big_m > 0.0) return sc.cfg.big_m;
  // The penalty must dominate every power term of the objective. Local
  // powers alone are not enough: the transmit side can be orders of
  // magnitude larger after pathloss, so the interference-free minimum
  // transmit powers of the offload candidates enter the bound too.
  double pmax = 0.0;
  for (size_t i = 0; i < dec.size(); ++i) {
    const auto& d = dec[i];
    if (d.p_local_max > 0.0 && std::isfinite(d.p_local_max))
      pmax = std::max(pmax, sc.to_normalized(d.p_local_max));
    if (d.r_min > 0.0 && d.cloud_feasible)
      pmax = std::max(pmax, min_tx_power(d.r_min, sc.channels[i], 1.0,
                                         sc.cfg.bandwidth));
  }
  if (pmax == 0.0)
    for (const auto& d : dec)
      pmax = std::max(pmax, sc.to_normalized(d.p_local_star));
  pmax = std::max(pmax, 1.0);
  return 1e3 * sc.n() * pmax;
}

namespace detail_car {

void note(RunLog* log, const std::string& s) {
  if (log) log->notes.push_back(s);
}

std::vector<double> targets_of(const std::vector<LocalDecision>& dec,
                               const std::vector<int>& members) {
  std::vector<double> t(members.size());
  for (size_t m = 0; m < members.size(); ++m) t[m] = dec[members[m]].r_min;
  return t;
}

std::vector<CVector> channels_of(const Scenario& sc,
                                 const std::vector<int>& members) {
  std::vector<CVector> h(members.size());
  for (size_t m = 0; m < members.size(); ++m) h[m] = sc.channels[members[m]];
  return h;
}

// Duality-based power recovery with a fixed-point fallback.
PowerControlResult recover_powers(const Scenario& sc,
                                  const std::vector<int>& members,
                                  const std::vector<LocalDecision>& dec,
                                  const std::vector<CVector>& v) {
  auto h = channels_of(sc, members);
  auto t = targets_of(dec, members);
  if (!v.empty()) {
    PowerControlResult pr = uplink_powers_from_duality(v, h, t, sc.cfg);
    if (pr.converged) return pr;
  }
  return fixed_point_power(h, t, sc.cfg);
}

Allocation finalize(const Scenario& sc, const std::vector<LocalDecision>& dec,
                    const Classification& base, const std::vector<int>& served,
                    const PowerControlResult& pr, RunLog* log) {
  const int n = sc.n();
  Allocation a = make_empty_allocation(n);
  std::vector<int> served_pos(n, -1);
  for (size_t t = 0; t < served.size(); ++t) served_pos[served[t]] = (int)t;

  for (int i = 0; i < n; ++i) {
    switch (base.labels[i]) {
      case UEClass::OH:
        a.classification.labels[i] =
            served_pos[i] >= 0 ? UEClass::OH : UEClass::R;
        break;
      case UEClass::OL:
        a.classification.labels[i] =
            served_pos[i] >= 0 ? UEClass::OL : UEClass::L;
        break;
      case UEClass::L:
        a.classification.labels[i] = UEClass::L;
        break;
      case UEClass::R:
        a.classification.labels[i] = UEClass::R;
        break;
    }
    if (a.classification.labels[i] == UEClass::L) {
      a.local_power[i] = dec[i].p_local_star;
      a.completed[i] = true;
    } else if (served_pos[i] >= 0) {
      int t = served_pos[i];
      a.tx_power[i] = sc.to_watts(pr.powers[t]);
      a.rx_beamformers[i] = pr.beamformers[t];
      a.rates[i] = pr.rates[t];
      a.completed[i] = true;
    }
  }
  a.sum_power = a.recompute_sum_power();
  if (log) log->accepted = served;
  return a;
}

double rate_weight_sum(const Scenario& sc, const std::vector<LocalDecision>& dec,
                       const std::vector<int>& members) {
  double s = 0.0;
  for (int i : members) s += dec[i].r_min * sc.cfg.cycles_per_bit;
  return s;
}

// Virtual-downlink rates achieved by the (possibly thresholded) iterate.
std::vector<double> vd_rates(const detail::VdBuilder& b,
                             const Eigen::VectorXd& x) {
  std::vector<double> rates(b.nm, 0.0);
  for (int i = 0; i < b.nm; ++i) {
    CVector vi = lift_complex(x, b.offsets[i], b.nm);
    double sig = std::norm(b.hred[i].dot(vi));
    double interf = 1.0;
    for (int k = 0; k < b.nm; ++k) {
      if (k == i) continue;
      CVector vk = lift_complex(x, b.offsets[k], b.nm);
      interf += std::norm(b.hred[i].dot(vk));
    }
    rates[i] = rate_uplink(sig / interf, b.sc->cfg.bandwidth);
  }
  return rates;
}

struct ScaResult {
  bool ok = false;
  Eigen::VectorXd x;           // final iterate, sparsified blocks zeroed
  std::vector<double> norms;   // post-threshold squared norms per member
  std::vector<double> rates;   // post-threshold virtual-downlink rates
  ScaTrace trace;
};

// SCA loop shared by Cases II and III. capped_pos lists the member positions
// subject to the smoothed capacity caps (all of them in Case II, the O^L part
// in Case III); the remaining members carry hard rate constraints.
ScaResult run_sca(const detail::VdBuilder& b, const Scenario& sc,
                  const std::vector<LocalDecision>& dec,
                  const std::vector<int>& capped_pos, double rhs_count,
                  double rhs_rate, double big_m, RunLog* log) {
  ScaResult out;
  const SystemConfig& cfg = sc.cfg;
  const double theta = cfg.theta;

  SocpProblem base = b.base_problem(big_m);
  SocpSolution free_sol = solve(base, cfg.solver_tol);
  if (free_sol.status != SolveStatus::Optimal) {
    note(log, "sca: capacity-free subproblem failed: " +
                  std::string(to_string(free_sol.status)));
    return out;
  }

  std::vector<double> rw(capped_pos.size());
  for (size_t t = 0; t < capped_pos.size(); ++t)
    rw[t] = dec[b.members[capped_pos[t]]].r_min * cfg.cycles_per_bit;

  // Initialize from the capacity-free solution when it already satisfies the
  // smoothed caps. Otherwise keep the cheapest capped blocks until the caps
  // are met and zero the rest: the linearized caps at that point hold with
  // equality, so the first subproblem is feasible, while a plain zero start
  // (alpha = 1/theta everywhere) would trap the iteration at v = 0.
  Eigen::VectorXd x_lin = free_sol.x;
  {
    auto norms = b.vnorm2(x_lin);
    double used_count = 0.0, used_rate = 0.0;
    for (size_t t = 0; t < capped_pos.size(); ++t) {
      double f = f_theta(norms[capped_pos[t]], theta);
      used_count += f;
      used_rate += f * rw[t];
    }
    if (used_count > rhs_count || used_rate > rhs_rate) {
      std::vector<int> order(capped_pos.size());
      for (size_t t = 0; t < order.size(); ++t) order[t] = (int)t;
      std::sort(order.begin(), order.end(), [&](int a, int c) {
        double na = norms[capped_pos[a]], nc = norms[capped_pos[c]];
        return na != nc ? na < nc : capped_pos[a] < capped_pos[c];
      });
      double cum_count = 0.0, cum_rate = 0.0;
      for (int q : order) {
        double f = f_theta(norms[capped_pos[q]], theta);
        if (cum_count + f > rhs_count || cum_rate + f * rw[q] > rhs_rate) {
          x_lin.segment(b.offsets[capped_pos[q]], b.block).setZero();
        } else {
          cum_count += f;
          cum_rate += f * rw[q];
        }
      }
      note(log, "sca: capacity-free start violates smoothed caps; "
                "greedy-trimmed start");
    }
  }

  std::optional<Eigen::VectorXd> warm;
  double prev_obj = 0.0;
  bool have_prev = false;
  for (int t = 0; t < cfg.sca_max_iters; ++t) {
    auto norms = b.vnorm2(x_lin);
    SocpProblem p = base;
    std::vector<double> w_count(capped_pos.size()), w_rate(capped_pos.size());
    double c_count = 0.0, c_rate = 0.0;
    for (size_t q = 0; q < capped_pos.size(); ++q) {
      double xn = norms[capped_pos[q]];
      double alpha = f_theta_grad(xn, theta);
      double offset = f_theta(xn, theta) - alpha * xn;
      w_count[q] = alpha;
      w_rate[q] = alpha * rw[q];
      c_count += offset;
      c_rate += offset * rw[q];
    }
    b.add_cap(p, capped_pos, w_count, rhs_count - c_count);
    b.add_cap(p, capped_pos, w_rate, rhs_rate - c_rate);

    SocpSolution sol = solve(p, cfg.solver_tol, warm);
    if (sol.status != SolveStatus::Optimal) {
      if (!have_prev) {
        note(log, "sca: first linearized subproblem failed: " +
                      std::string(to_string(sol.status)));
        return out;
      }
      note(log, "sca: subproblem failed at iteration " + std::to_string(t) +
                    "; keeping previous iterate");
      break;
    }
    out.trace.objective.push_back(sol.objective_value);
    bool converged =
        have_prev && std::abs(sol.objective_value - prev_obj) <=
                         cfg.sca_tol * std::max(1.0, std::abs(sol.objective_value));
    prev_obj = sol.objective_value;
    have_prev = true;
    x_lin = sol.x;
    warm = sol.x;
    if (converged) break;
  }
  if (!have_prev) return out;

  // Sparsify: capped blocks below the squared-norm cutoff are switched off.
  auto norms = b.vnorm2(x_lin);
  for (int pos : capped_pos)
    if (norms[pos] < cfg.zero_threshold)
      x_lin.segment(b.offsets[pos], b.block).setZero();

  out.x = x_lin;
  out.norms = b.vnorm2(x_lin);
  out.rates = vd_rates(b, x_lin);
  out.ok = true;
  if (log) log->sca_traces.push_back(out.trace);
  return out;
}

// Drops accepted members (ascending beamformer norm) until the hard caps and
// a successful power recovery hold. `protected_count` members at the front of
// `served` (the O^H commitments in Case III) are never dropped.
PowerControlResult enforce_and_recover(const Scenario& sc,
                                       const std::vector<LocalDecision>& dec,
                                       std::vector<int>& served,
                                       std::vector<CVector>& v,
                                       int protected_count, double cap_count,
                                       double cap_rate, RunLog* log) {
  auto weakest = [&]() {
    int pick = -1;
    double best = 0.0;
    for (size_t t = protected_count; t < served.size(); ++t) {
      double nrm = v[t].squaredNorm();
      if (pick < 0 || nrm < best) {
        pick = (int)t;
        best = nrm;
      }
    }
    return pick;
  };
  auto drop = [&](int t, const char* why) {
    note(log, std::string("dropped ue ") + std::to_string(served[t]) + ": " + why);
    served.erase(served.begin() + t);
    v.erase(v.begin() + t);
  };
  while ((int)served.size() > protected_count &&
         ((double)served.size() > cap_count ||
          rate_weight_sum(sc, dec, served) > cap_rate * (1.0 + 1e-9)))
    drop(weakest(), "capacity guard");
  while (true) {
    if (served.empty()) return PowerControlResult{};
    PowerControlResult pr = recover_powers(sc, served, dec, v);
    if (pr.converged) return pr;
    if ((int)served.size() <= protected_count) {
      note(log, "power recovery failed on committed set");
      return pr;
    }
    drop(weakest(), "power recovery failed");
  }
}

}  // namespace detail_car

using namespace detail_car;

Allocation case1(const Scenario& sc, const Classification& cls,
                 const std::vector<LocalDecision>& dec, RunLog* log) {
  if (log) {
    if (log->algorithm.empty()) log->algorithm = "car";
    log->case_id = 1;
  }
  std::vector<int> active = cls.members(UEClass::OH);
  {
    auto ol = cls.members(UEClass::OL);
    active.insert(active.end(), ol.begin(), ol.end());
    std::sort(active.begin(), active.end());
  }

  bool ol_fallback_done = false;
  while (true) {
    if (active.empty())
      return finalize(sc, dec, cls, {}, PowerControlResult{}, log);

    detail::VdBuilder b(sc, active, targets_of(dec, active),
                        std::vector<char>(active.size(), 0));
    SocpSolution sol = solve(b.base_problem(0.0), sc.cfg.solver_tol);
    if (sol.status != SolveStatus::Optimal) {
      bool has_ol = std::any_of(active.begin(), active.end(), [&](int i) {
        return cls.labels[i] == UEClass::OL;
      });
      if (has_ol && !ol_fallback_done) {
        note(log, "case1: joint solve infeasible; demoting all O^L to L");
        std::vector<int> oh_only;
        for (int i : active)
          if (cls.labels[i] == UEClass::OH) oh_only.push_back(i);
        active = oh_only;
        ol_fallback_done = true;
        continue;
      }
      note(log, "case1: O^H-only solve infeasible; routing to case2");
      return case2(sc, cls, dec, log);
    }

    std::vector<CVector> v = b.lift(sol.x);
    PowerControlResult pr = recover_powers(sc, active, dec, v);
    if (!pr.converged) {
      note(log, "case1: power recovery failed; routing to case2");
      return case2(sc, cls, dec, log);
    }

    // B1 = {i in O^L : p^Tr >= p^L}; prune the worst normalized violation.
    int worst = -1;
    double worst_eta = 0.0;
    for (size_t t = 0; t < active.size(); ++t) {
      int i = active[t];
      if (cls.labels[i] != UEClass::OL) continue;
      double p_local = sc.to_normalized(dec[i].p_local_star);
      if (pr.powers[t] >= p_local) {
        double eta = (pr.powers[t] - p_local) / p_local;
        if (worst < 0 || eta > worst_eta) {
          worst = (int)t;
          worst_eta = eta;
        }
      }
    }
    if (worst < 0) return finalize(sc, dec, cls, active, pr, log);
    if (log) log->prunes.push_back({"B1", active[worst], worst_eta});
    active.erase(active.begin() + worst);
  }
}

Allocation case2(const Scenario& sc, const Classification& cls,
                 const std::vector<LocalDecision>& dec, RunLog* log) {
  if (log) {
    if (log->algorithm.empty()) log->algorithm = "car";
    log->case_id = 2;
  }
  const SystemConfig& cfg = sc.cfg;
  std::vector<int> oh = cls.members(UEClass::OH);
  if (oh.empty()) return finalize(sc, dec, cls, {}, PowerControlResult{}, log);

  detail::VdBuilder b(sc, oh, targets_of(dec, oh),
                      std::vector<char>(oh.size(), 1));
  std::vector<int> capped(oh.size());
  for (size_t t = 0; t < oh.size(); ++t) capped[t] = (int)t;
  double fb = cfg.bbu_capacity;
  ScaResult sca = run_sca(b, sc, dec, capped, (double)cfg.clone_capacity, fb,
                          effective_big_m(sc, dec), log);
  if (!sca.ok) {
    note(log, "case2: SCA failed; degraded greedy ordering");
    return card_case2(sc, cls, dec, log);
  }

  std::vector<int> served;
  std::vector<CVector> vfull = b.lift(sca.x);
  std::vector<CVector> v_served;
  for (size_t t = 0; t < oh.size(); ++t) {
    if (sca.norms[t] >= cfg.zero_threshold &&
        sca.rates[t] >= dec[oh[t]].r_min * (1.0 - 1e-6)) {
      served.push_back(oh[t]);
      v_served.push_back(vfull[t]);
    }
  }
  PowerControlResult pr =
      enforce_and_recover(sc, dec, served, v_served, 0,
                          (double)cfg.clone_capacity, fb, log);
  return finalize(sc, dec, cls, served, pr, log);
}

Allocation case3(const Scenario& sc, const Classification& cls,
                 const std::vector<LocalDecision>& dec, RunLog* log) {
  if (log) {
    if (log->algorithm.empty()) log->algorithm = "car";
    log->case_id = 3;
  }
  const SystemConfig& cfg = sc.cfg;
  std::vector<int> oh = cls.members(UEClass::OH);
  std::vector<int> ol_active = cls.members(UEClass::OL);
  const double oh_rate = rate_weight_sum(sc, dec, oh);
  const double res_count = (double)cfg.clone_capacity - (double)oh.size();
  const double res_rate = cfg.bbu_capacity - oh_rate;

  // With no residual resource (or no O^L) this is Case I restricted to O^H.
  auto oh_only = [&]() {
    Classification trimmed = cls;
    for (int i : ol_active) trimmed.labels[i] = UEClass::L;
    return case1(sc, trimmed, dec, log);
  };
  if (ol_active.empty() || res_count <= 0.0 || res_rate <= 0.0) {
    if (!ol_active.empty())
      note(log, "case3: no residual capacity; all O^L to L");
    Allocation a = oh_only();
    if (log) log->case_id = 3;
    return a;
  }

  while (true) {
    std::vector<int> members = oh;
    members.insert(members.end(), ol_active.begin(), ol_active.end());
    std::sort(members.begin(), members.end());
    std::vector<char> slacked(members.size(), 0);
    std::vector<int> capped;
    for (size_t t = 0; t < members.size(); ++t)
      if (cls.labels[members[t]] == UEClass::OL) {
        slacked[t] = 1;
        capped.push_back((int)t);
      }

    detail::VdBuilder b(sc, members, targets_of(dec, members), slacked);
    ScaResult sca = run_sca(b, sc, dec, capped, res_count, res_rate,
                            effective_big_m(sc, dec), log);
    if (!sca.ok) {
      note(log, "case3: SCA failed; degraded greedy ordering");
      return card_case3(sc, cls, dec, log);
    }

    std::vector<CVector> vfull = b.lift(sca.x);
    std::vector<int> served;
    std::vector<CVector> v_served;
    // O^H first so the capacity/recovery guard never drops them.
    for (size_t t = 0; t < members.size(); ++t)
      if (!slacked[t]) {
        served.push_back(members[t]);
        v_served.push_back(vfull[t]);
      }
    int protected_count = (int)served.size();
    for (size_t t = 0; t < members.size(); ++t)
      if (slacked[t] && sca.norms[t] >= cfg.zero_threshold &&
          sca.rates[t] >= dec[members[t]].r_min * (1.0 - 1e-6)) {
        served.push_back(members[t]);
        v_served.push_back(vfull[t]);
      }
    PowerControlResult pr = enforce_and_recover(
        sc, dec, served, v_served, protected_count,
        (double)cfg.clone_capacity, cfg.bbu_capacity, log);
    if (!pr.converged && served.size() <= (size_t)protected_count) {
      note(log, "case3: committed O^H set unrecoverable; O^H-only fallback");
      Allocation a = oh_only();
      if (log) log->case_id = 3;
      return a;
    }

    // B2 = {accepted O^L : p^Tr >= p^L}; prune max eta and redo the SCA.
    int worst = -1;
    double worst_eta = 0.0;
    for (size_t t = 0; t < served.size(); ++t) {
      int i = served[t];
      if (cls.labels[i] != UEClass::OL) continue;
      double p_local = sc.to_normalized(dec[i].p_local_star);
      if (pr.powers[t] >= p_local) {
        double eta = (pr.powers[t] - p_local) / p_local;
        if (worst < 0 || eta > worst_eta) {
          worst = (int)t;
          worst_eta = eta;
        }
      }
    }
    if (worst < 0) return finalize(sc, dec, cls, served, pr, log);
    if (log) log->prunes.push_back({"B2", served[worst], worst_eta});
    ol_active.erase(
        std::find(ol_active.begin(), ol_active.end(), served[worst]));
    if (ol_active.empty()) {
      Allocation a = oh_only();
      if (log) log->case_id = 3;
      return a;
    }
  }
}

Allocation dispatch(const Scenario& sc, const Classification& cls,
                    const std::vector<LocalDecision>& dec, RunLog* log) {
  if (log && log->algorithm.empty()) log->algorithm = "car";
  const SystemConfig& cfg = sc.cfg;
  std::vector<int> o = cls.members(UEClass::OH);
  {
    auto ol = cls.members(UEClass::OL);
    o.insert(o.end(), ol.begin(), ol.end());
  }
  auto oh = cls.members(UEClass::OH);
  const double fb = cfg.bbu_capacity;
  if ((int)o.size() <= cfg.clone_capacity &&
      rate_weight_sum(sc, dec, o) <= fb)
    return case1(sc, cls, dec, log);
  if ((int)oh.size() <= cfg.clone_capacity &&
      rate_weight_sum(sc, dec, oh) <= fb)
    return case3(sc, cls, dec, log);
  return case2(sc, cls, dec, log);
}

}  // namespace meran
