#include "vd_problem.hpp"

#include <stdexcept>
#include <utility>

namespace meran::detail {

VdBuilder::VdBuilder(const Scenario& scenario, std::vector<int> members_,
                     std::vector<double> targets_, std::vector<char> slacked_)
    : sc(&scenario),
      members(std::move(members_)),
      targets(std::move(targets_)),
      slacked(std::move(slacked_)) {
  nm = static_cast<int>(members.size());
  block = 2 * nm;
  offsets.resize(nm);
  slack_index.assign(nm, -1);
  for (int m = 0; m < nm; ++m) offsets[m] = m * block;
  n_slacks = 0;
  for (int m = 0; m < nm; ++m)
    if (slacked[m]) slack_index[m] = nm * block + n_slacks++;
  n_vars = nm * block + n_slacks;

  Eigen::MatrixXcd H(scenario.k() * scenario.j(), nm);
  for (int m = 0; m < nm; ++m) H.col(m) = scenario.channels[members[m]];
  Hmat = H;

  Eigen::MatrixXcd G = H.adjoint() * H;
  double jitter = 1e-12 * G.real().trace() / std::max(nm, 1);
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::LLT<Eigen::MatrixXcd> llt(G);
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
      break;
    }
    G.diagonal().array() += jitter;
    jitter *= 10.0;
    if (attempt == 5)
      throw std::runtime_error("vd_problem: channel Gram matrix not PSD");
  }
  hred.resize(nm);
  for (int m = 0; m < nm; ++m) hred[m] = L.row(m).adjoint();
}

SocpProblem VdBuilder::base_problem(double big_m) const {
  SocpProblem p;
  p.n = n_vars;
  p.quad_obj = Eigen::VectorXd::Zero(n_vars);
  p.quad_obj.head(nm * block).setOnes();
  p.lin_obj = Eigen::VectorXd::Zero(n_vars);
  for (int m = 0; m < nm; ++m) {
    if (slack_index[m] >= 0) {
      p.lin_obj(slack_index[m]) = big_m;
      p.nonneg.push_back(slack_index[m]);
    }
    p.socs.push_back(build_rate_soc(hred[m], offsets, m, targets[m],
                                    /*sigma=*/1.0, sc->cfg.bandwidth, n_vars,
                                    slack_index[m]));
  }
  return p;
}

void VdBuilder::add_cap(SocpProblem& p, const std::vector<int>& member_pos,
                        const std::vector<double>& weights, double rhs) const {
  QuadCap cap;
  cap.w = Eigen::VectorXd::Zero(n_vars);
  cap.r = Eigen::VectorXd::Zero(n_vars);
  cap.s = rhs;
  for (size_t t = 0; t < member_pos.size(); ++t)
    cap.w.segment(offsets[member_pos[t]], block).setConstant(weights[t]);
  p.caps.push_back(std::move(cap));
}

std::vector<double> VdBuilder::vnorm2(const Eigen::VectorXd& x) const {
  std::vector<double> out(nm);
  for (int m = 0; m < nm; ++m) out[m] = x.segment(offsets[m], block).squaredNorm();
  return out;
}

std::vector<double> VdBuilder::y_values(const Eigen::VectorXd& x) const {
  std::vector<double> out(nm, 0.0);
  for (int m = 0; m < nm; ++m)
    if (slack_index[m] >= 0) out[m] = x(slack_index[m]);
  return out;
}

std::vector<CVector> VdBuilder::lift(const Eigen::VectorXd& x) const {
  std::vector<CVector> v(nm);
  for (int m = 0; m < nm; ++m) {
    CVector u = lift_complex(x, offsets[m], nm);
    CVector c = L.adjoint().triangularView<Eigen::Upper>().solve(u);
    v[m] = Hmat * c;
  }
  return v;
}

}  // namespace meran::detail
