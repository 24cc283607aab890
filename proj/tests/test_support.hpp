// Shared helpers for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <meran/beamforming.hpp>
#include <meran/dlda.hpp>
#include <meran/scenario.hpp>
#include <meran/types.hpp>

namespace test_support {

// Scenario with hand-picked noise-normalized channels (one antenna per RRH,
// J = channel length). Positions are synthetic; algorithms only read
// channels, tasks, and config.
inline meran::Scenario custom_scenario(std::vector<meran::CVector> channels,
                                       std::vector<meran::TaskSpec> tasks,
                                       meran::SystemConfig cfg) {
  meran::Scenario sc;
  sc.cfg = cfg;
  sc.seed = 0;
  sc.antennas_per_rrh = 1;
  int j = channels.empty() ? 1 : (int)channels[0].size();
  sc.rrh_positions.resize(j);
  for (int t = 0; t < j; ++t)
    sc.rrh_positions[t] = meran::Position{100.0 * t, 0.0};
  sc.ues.resize(tasks.size());
  for (size_t i = 0; i < tasks.size(); ++i) {
    sc.ues[i].task = tasks[i];
    sc.ues[i].f_local_max = cfg.f_local_max;
    sc.ues[i].kappa = cfg.kappa;
    sc.ues[i].nu = cfg.nu;
    sc.ues[i].position = meran::Position{50.0 * i, 50.0};
  }
  sc.channels = std::move(channels);
  return sc;
}

// Task that is locally infeasible (f* > f_local_max) -> DLDA class OH.
inline meran::TaskSpec oh_task(double cycles = 1.2e6, double bits = 4e5) {
  return meran::TaskSpec{cycles, bits, 1.0};
}

// Task that is locally feasible; whether it lands in OL or L depends on the
// channel/power tradeoff.
inline meran::TaskSpec ol_task(double cycles = 8e5, double bits = 2e5) {
  return meran::TaskSpec{cycles, bits, 1.0};
}

// Deterministic complex channel from simple integers: gain g spread over j
// entries with varied phases.
inline meran::CVector flat_channel(int j, double g, int phase_seed = 0) {
  meran::CVector h(j);
  for (int t = 0; t < j; ++t) {
    double ph = 0.7 * (t + 1) * (phase_seed + 1);
    h(t) = std::sqrt(g / j) * meran::Complex(std::cos(ph), std::sin(ph));
  }
  return h;
}

// Feasibility audit for an allocation against its DLDA classification:
// C6 (clone count), C7 (BBU rate), C3/C9 (rates), C5 (O^L power budget),
// the O^H priority rule, and label/bookkeeping consistency.
// Returns an empty string when everything holds.
inline std::string check_allocation(const meran::Scenario& sc,
                                    const meran::Classification& dlda,
                                    const std::vector<meran::LocalDecision>& dec,
                                    const meran::Allocation& a,
                                    double rtol = 1e-6) {
  using namespace meran;
  const SystemConfig& cfg = sc.cfg;
  std::vector<int> accepted;
  for (int i = 0; i < a.n(); ++i) {
    UEClass base = dlda.labels[i], out = a.classification.labels[i];
    switch (base) {
      case UEClass::OH:
        if (out != UEClass::OH && out != UEClass::R)
          return "label: OH member " + std::to_string(i) + " became " +
                 to_string(out);
        break;
      case UEClass::OL:
        if (out != UEClass::OL && out != UEClass::L)
          return "label: OL member " + std::to_string(i) + " became " +
                 to_string(out);
        break;
      default:
        if (out != base)
          return "label: member " + std::to_string(i) + " changed class";
    }
    if (out == UEClass::OH || out == UEClass::OL) accepted.push_back(i);
    if (out == UEClass::R && a.completed[i]) return "R member marked completed";
    if (out != UEClass::R && !a.completed[i])
      return "served member " + std::to_string(i) + " not completed";
  }
  // C6
  if ((int)accepted.size() > cfg.clone_capacity)
    return "C6: " + std::to_string(accepted.size()) + " > F^C";
  // C7 (rates pinned at R_min by the power minimization)
  double rate_cycles = 0.0;
  for (int i : accepted) rate_cycles += dec[i].r_min * cfg.cycles_per_bit;
  if (rate_cycles > cfg.bbu_capacity * (1.0 + rtol)) return "C7 violated";
  // C3/C9: recompute rates from powers and receivers
  std::vector<CVector> h;
  std::vector<double> p;
  for (int i : accepted) {
    h.push_back(sc.channels[i]);
    p.push_back(sc.to_normalized(a.tx_power[i]));
  }
  for (size_t t = 0; t < accepted.size(); ++t) {
    int i = accepted[t];
    if (a.rx_beamformers[i].size() == 0) return "missing receiver";
    std::vector<CVector> recv(accepted.size(), a.rx_beamformers[i]);
    double rate =
        rate_uplink(sinr_uplink(p, recv, h, (int)t), cfg.bandwidth);
    if (rate < dec[i].r_min * (1.0 - rtol))
      return "C9: ue " + std::to_string(i) + " rate " + std::to_string(rate) +
             " < " + std::to_string(dec[i].r_min);
    if (a.tx_power[i] < 0.0) return "negative transmit power";
  }
  // C5 for accepted O^L
  for (int i : accepted)
    if (dlda.labels[i] == UEClass::OL &&
        a.tx_power[i] > dec[i].p_local_star * (1.0 + rtol) + 1e-12)
      return "C5: ue " + std::to_string(i) + " tx " +
             std::to_string(a.tx_power[i]) + " > local " +
             std::to_string(dec[i].p_local_star);
  // priority: no accepted O^L while an O^H member sits in R
  bool oh_rejected = false, ol_accepted = false;
  for (int i = 0; i < a.n(); ++i) {
    if (dlda.labels[i] == UEClass::OH &&
        a.classification.labels[i] == UEClass::R)
      oh_rejected = true;
    if (dlda.labels[i] == UEClass::OL &&
        a.classification.labels[i] == UEClass::OL)
      ol_accepted = true;
  }
  if (oh_rejected && ol_accepted) return "priority: OL admitted over OH";
  // bookkeeping
  if (std::abs(a.sum_power - a.recompute_sum_power()) >
      1e-9 * std::max(1.0, a.sum_power))
    return "sum_power mismatch";
  return {};
}

}  // namespace test_support
