// Internal helper shared by car.cpp and car_fast.cpp: builds virtual-downlink
// beamforming SOCPs over a candidate set in a reduced span.
//
// Every beamformer lives in span(candidate channels), so with H the K*J x n
// channel matrix, G = H^H H = L L^H, we optimize u_i = L^H c_i (v_i = H c_i).
// Then ||v_i|| = ||u_i|| and h_k^H v_i = (row k of L) u_i, which shrinks the
// per-candidate dimension from K*J to n.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "meran/scenario.hpp"
#include "meran/socp.hpp"

namespace meran::detail {

struct VdBuilder {
  const Scenario* sc = nullptr;
  std::vector<int> members;      // UE indices, ascending
  std::vector<double> targets;   // rate targets per member
  std::vector<char> slacked;     // per member: rate SOC carries a slack?

  int nm = 0;                    // candidate count
  int block = 0;                 // real vars per beamformer block = 2 * nm
  int n_slacks = 0;
  int n_vars = 0;
  std::vector<int> offsets;      // block offset per member
  std::vector<int> slack_index;  // variable index of y_i, -1 if hard
  Eigen::MatrixXcd Hmat;         // K*J x nm candidate channel matrix
  Eigen::MatrixXcd L;            // Cholesky factor of the Gram matrix
  std::vector<CVector> hred;     // reduced channels, row m of L conjugated

  VdBuilder(const Scenario& scenario, std::vector<int> members_,
            std::vector<double> targets_, std::vector<char> slacked_);

  // Objective sum ||u_i||^2 + big_m * sum y_i, rate SOCs, y >= 0.
  SocpProblem base_problem(double big_m) const;

  // Appends sum_i w_i ||u_i||^2 <= rhs over the given member positions.
  void add_cap(SocpProblem& p, const std::vector<int>& member_pos,
               const std::vector<double>& weights, double rhs) const;

  std::vector<double> vnorm2(const Eigen::VectorXd& x) const;
  std::vector<double> y_values(const Eigen::VectorXd& x) const;
  // Lifts the reduced solution back to full K*J dimensional beamformers.
  std::vector<CVector> lift(const Eigen::VectorXd& x) const;
};

}  // namespace meran::detail
