// Uplink receive-beamforming math: MMSE receivers, SINR/rate evaluation,
// fixed-point minimum-power control, and the uplink/virtual-downlink bridge.
// All powers here are in noise-normalized units (sigma^2 == 1 by default).
#pragma once

#include <vector>

#include "meran/types.hpp"

namespace meran {

struct PowerControlResult {
  std::vector<double> powers;        // per active UE, normalized units
  std::vector<CVector> beamformers;  // unit-norm receivers
  std::vector<double> rates;         // bits/s
  bool converged = false;
  int iterations = 0;
};

// MMSE receiver for UE i given everyone's powers; unit-normalized.
CVector mmse_receiver(const std::vector<CVector>& channels,
                      const std::vector<double>& powers, int i,
                      double sigma2 = 1.0);

// SINR of UE i under receiver set m; scale-invariant in m_i.
double sinr_uplink(const std::vector<double>& powers,
                   const std::vector<CVector>& receivers,
                   const std::vector<CVector>& channels, int i,
                   double sigma2 = 1.0);

double rate_uplink(double sinr, double bandwidth);

// Minimum-power control for the given rate targets: alternate MMSE receiver
// updates and standard-interference power updates until the powers settle.
// converged == false signals an infeasible target set (divergence cap hit
// or iteration budget exhausted).
PowerControlResult fixed_point_power(const std::vector<CVector>& channels,
                                     const std::vector<double>& rate_targets,
                                     const SystemConfig& cfg,
                                     double sigma2 = 1.0);

// Uplink power recovery from virtual-downlink beamformers: receivers are
// frozen to v (normalized) and only the power balance is solved, so the
// rate targets are met with equality. Sum power matches sum ||v||^2 within
// duality tolerance when v solves the virtual-downlink problem.
PowerControlResult uplink_powers_from_duality(
    const std::vector<CVector>& v, const std::vector<CVector>& channels,
    const std::vector<double>& rate_targets, const SystemConfig& cfg,
    double sigma2 = 1.0);

}  // namespace meran
