// Centralized decision and resource allocation: the case dispatcher, the
// duality-based resource allocation (Case I) and the SCA-based admission
// control (Cases II/III) with l0 smoothing.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "meran/dlda.hpp"
#include "meran/scenario.hpp"
#include "meran/types.hpp"

namespace meran {

// Fractional l0 surrogate x / (x + theta) and its derivative.
double f_theta(double x, double theta);
double f_theta_grad(double x, double theta);

// SCA iterate: virtual-downlink beamformers, slacks, linearization weights.
struct SCAState {
  std::vector<CVector> v;               // per candidate
  std::vector<double> y;                // per slacked candidate
  std::vector<double> alpha;            // per capped candidate
  int t = 0;
  std::vector<double> objective_trace;  // length t
};

struct PruneEvent {
  std::string set_id;  // B1, B2, D1, D2
  int ue = -1;
  double score = 0.0;  // eta or epsilon
};

struct ScaTrace {
  std::vector<double> objective;
};

// Per-run decision log: iteration traces, prune events, accepted sets.
struct RunLog {
  std::string algorithm;
  int case_id = 0;
  std::vector<ScaTrace> sca_traces;
  std::vector<PruneEvent> prunes;
  std::vector<int> accepted;
  long subsets_enumerated = 0;
  std::vector<std::string> notes;

  void write(std::ostream& os) const;
};

// Algorithm 2 branching: Case I when all of O fits, Case III when only the
// high-priority set fits, Case II otherwise.
Allocation dispatch(const Scenario& sc, const Classification& cls,
                    const std::vector<LocalDecision>& dec, RunLog* log = nullptr);

Allocation case1(const Scenario& sc, const Classification& cls,
                 const std::vector<LocalDecision>& dec, RunLog* log = nullptr);
Allocation case2(const Scenario& sc, const Classification& cls,
                 const std::vector<LocalDecision>& dec, RunLog* log = nullptr);
Allocation case3(const Scenario& sc, const Classification& cls,
                 const std::vector<LocalDecision>& dec, RunLog* log = nullptr);

// Slack penalty: big_m from the config when set, otherwise the auto rule
// 1e3 * N * max_i p^L_(i,max) in noise-normalized units.
double effective_big_m(const Scenario& sc, const std::vector<LocalDecision>& dec);

}  // namespace meran
