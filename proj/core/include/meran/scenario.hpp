// Reproducible network scenarios: placement, pathloss, fading, channels.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "meran/types.hpp"

namespace meran {

// Immutable input to every algorithm. Channels are stored noise-normalized
// (divided by sigma) so the internal noise power is exactly 1.
struct Scenario {
  std::vector<UEProfile> ues;          // N entries
  std::vector<Position> rrh_positions; // J entries
  int antennas_per_rrh = 0;            // K
  std::vector<CVector> channels;       // per UE, length K*J, RRH-major
  SystemConfig cfg;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(ues.size()); }
  int j() const { return static_cast<int>(rrh_positions.size()); }
  int k() const { return antennas_per_rrh; }

  // De-normalization: internal power units -> watts, and back.
  double to_watts(double p_norm) const { return p_norm * cfg.sigma2_w(); }
  double to_normalized(double p_w) const { return p_w / cfg.sigma2_w(); }
};

// 148.1 + 37.6 log10(d) with d in km. Throws std::domain_error below d_min.
double pathloss_db(double distance_km, double d_min_km = 0.01);

// Deterministic scenario generation; same arguments give the same scenario.
Scenario generate(std::uint64_t seed, int n, int j, int k, double area_m,
                  const SystemConfig& cfg);

// The 20 reference workloads, bits/cycles scaled by 1e6, deadline 1 s.
std::vector<TaskSpec> table1_tasks();

// Field-for-field text serialization (complex entries as re/im pairs).
void save_scenario(const Scenario& sc, std::ostream& os);
Scenario load_scenario(std::istream& is);

// Deterministic RNG used by generation: mt19937_64 bits with explicit
// uniform/normal transforms so results do not depend on libstdc++'s
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform01();                 // [0, 1)
  double normal();                    // standard normal (Box-Muller)
  Complex cn01() {                    // CN(0, 1)
    const double inv_sqrt2 = 0.7071067811865475244;
    double re = normal(), im = normal();
    return Complex(re * inv_sqrt2, im * inv_sqrt2);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace meran
