// Core domain types shared by every algorithm in the ME-RAN simulator.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace meran {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

// One UE's workload: CPU cycles, payload bits, and a hard deadline.
struct TaskSpec {
  double cycles = 0.0;    // F_i, CPU cycles
  double bits = 0.0;      // D_i, payload size in bits
  double deadline = 0.0;  // T_i, seconds
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance_m(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Per-UE compute profile. kappa * f^nu is the CPU power model.
struct UEProfile {
  TaskSpec task;
  double f_local_max = 1e6;  // cycles/s
  double kappa = 1e-18;      // W s^3 / cycle^3 at nu = 3
  double nu = 3.0;           // power-model exponent, >= 2
  Position position;
};

// System-wide configuration. All algorithms consume noise-normalized
// channels (sigma^2 == 1 internally); sigma2_w keeps the raw noise power
// in watts for de-normalization of reported powers.
struct SystemConfig {
  double bandwidth = 1e7;            // B, Hz
  double noise_psd_dbm_hz = -75.0;   // noise PSD
  int clone_capacity = 20;           // F^C, number of mobile clones
  double bbu_capacity = 9e6;         // F^B, cycles/s
  double cycles_per_bit = 1.0;       // U
  double clone_speed = 1e8;          // f^C_max, cycles/s, uniform
  double theta = 1e-3;               // l0-smoothing parameter
  double big_m = 0.0;                // slack penalty; 0 selects the auto rule
  int sca_max_iters = 50;
  double sca_tol = 1e-5;
  int fp_max_iters = 500;
  double fp_tol = 1e-8;
  double zero_threshold = 1e-3;      // beamformer squared-norm cutoff
  double solver_tol = 1e-6;
  double duality_tol = 1e-3;
  // Scenario-generation defaults shared by all UEs.
  double f_local_max = 1e6;
  double kappa = 1e-18;
  double nu = 3.0;
  double d_min_m = 10.0;             // placement guard for the pathloss model

  // Noise power in watts: PSD (dBm/Hz) integrated over the bandwidth.
  double sigma2_w() const {
    return std::pow(10.0, noise_psd_dbm_hz / 10.0) * 1e-3 * bandwidth;
  }
};

enum class UEClass : std::uint8_t { OH, OL, L, R };

inline const char* to_string(UEClass c) {
  switch (c) {
    case UEClass::OH: return "OH";
    case UEClass::OL: return "OL";
    case UEClass::L: return "L";
    case UEClass::R: return "R";
  }
  return "?";
}

// Partition of the UE index set into {OH, OL, L, R}.
struct Classification {
  std::vector<UEClass> labels;

  std::vector<int> members(UEClass c) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
      if (labels[i] == c) out.push_back(i);
    return out;
  }
  int count(UEClass c) const { return static_cast<int>(members(c).size()); }

  // DLDA flag mapping: (w=0,s=1) OH, (w=1,s=1) OL, (w=1,s=0) L, (w=0,s=0) R.
  bool w(int i) const {
    return labels[i] == UEClass::OL || labels[i] == UEClass::L;
  }
  bool s(int i) const {
    return labels[i] == UEClass::OH || labels[i] == UEClass::OL;
  }
};

// Final output of any allocation algorithm. Powers are reported in watts.
struct Allocation {
  Classification classification;
  std::vector<double> tx_power;           // p^Tr_i, W; zero for non-offloaders
  std::vector<CVector> rx_beamformers;    // m_i, empty for non-offloaders
  std::vector<double> rates;              // r^UP_i, bits/s
  std::vector<double> local_power;        // p^L_i, W
  std::vector<bool> completed;
  double sum_power = 0.0;                 // W

  int n() const { return static_cast<int>(classification.labels.size()); }

  double recompute_sum_power() const {
    double s = 0.0;
    for (int i = 0; i < n(); ++i) s += tx_power[i] + local_power[i];
    return s;
  }
};

inline Allocation make_empty_allocation(int n) {
  Allocation a;
  a.classification.labels.assign(n, UEClass::R);
  a.tx_power.assign(n, 0.0);
  a.rx_beamformers.assign(n, CVector());
  a.rates.assign(n, 0.0);
  a.local_power.assign(n, 0.0);
  a.completed.assign(n, false);
  return a;
}

std::vector<std::string> validate_config(const SystemConfig& cfg);
std::vector<std::string> validate_profile(const UEProfile& ue);

}  // namespace meran
