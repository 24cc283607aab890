// Canonical second-order-cone form for the convex subproblems, with a
// self-contained log-barrier interior-point solver. The rest of the system
// only depends on this module boundary, so the solver is replaceable.
#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "meran/types.hpp"

namespace meran {

// ||A x + b|| <= c^T x + d
struct SocConstraint {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double d = 0.0;
};

// x^T diag(w) x <= r^T x + s  (C16/C17-style smoothed capacity caps)
struct QuadCap {
  Eigen::VectorXd w;  // nonnegative diagonal weights, size n
  Eigen::VectorXd r;  // affine bound, size n
  double s = 0.0;
};

// minimize  x^T diag(quad_obj) x + lin_obj^T x
struct SocpProblem {
  int n = 0;
  Eigen::VectorXd quad_obj;
  Eigen::VectorXd lin_obj;
  std::vector<SocConstraint> socs;
  std::vector<QuadCap> caps;
  std::vector<int> nonneg;  // indices constrained to x_j >= 0
};

enum class SolveStatus { Optimal, Infeasible, MaxIter };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIter: return "MaxIter";
  }
  return "?";
}

struct SocpSolution {
  Eigen::VectorXd x;
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
  int newton_steps = 0;
};

// Deterministic barrier method with an infeasibility phase when no strictly
// interior start is supplied.
SocpSolution solve(const SocpProblem& p, double tol = 1e-6,
                   const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

// Rate constraint of the virtual downlink in SOC form:
//   sqrt(1 - 2^(-target/B)) * ||[h^H v_k for all blocks; sigma]||
//     <= Re(h^H v_i)  (+ y slack when slack_idx >= 0)
// Complex beamformers are embedded as [Re(v); Im(v)] at the given offsets,
// each block of real length 2 * h.size().
SocConstraint build_rate_soc(const CVector& h,
                             const std::vector<int>& v_offsets, int self_block,
                             double target, double sigma, double bandwidth,
                             int n_vars, int slack_idx = -1);

// Writes a human-readable dump for cross-checking against external solvers.
void dump_problem(const SocpProblem& p, std::ostream& os);

// Helpers for the complex-to-real embedding.
Eigen::VectorXd embed_complex(const CVector& v);
CVector lift_complex(const Eigen::VectorXd& x, int offset, int complex_len);

}  // namespace meran
