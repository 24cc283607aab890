#include "meran/beamforming.hpp"

#include <cmath>
#include <stdexcept>

namespace meran {

CVector mmse_receiver(const std::vector<CVector>& channels,
                      const std::vector<double>& powers, int i,
                      double sigma2) {
  const int dim = static_cast<int>(channels[i].size());
  Eigen::MatrixXcd cov = sigma2 * Eigen::MatrixXcd::Identity(dim, dim);
  for (int k = 0; k < static_cast<int>(channels.size()); ++k) {
    if (k == i) continue;
    cov.noalias() += powers[k] * (channels[k] * channels[k].adjoint());
  }
  CVector m = cov.llt().solve(channels[i]);
  double nrm = m.norm();
  if (nrm > 0.0) m /= nrm;
  return m;
}

double sinr_uplink(const std::vector<double>& powers,
                   const std::vector<CVector>& receivers,
                   const std::vector<CVector>& channels, int i,
                   double sigma2) {
  const CVector& m = receivers[i];
  double sig = powers[i] * std::norm(m.dot(channels[i]));
  double intf = sigma2 * m.squaredNorm();
  for (int k = 0; k < static_cast<int>(channels.size()); ++k) {
    if (k == i) continue;
    intf += powers[k] * std::norm(m.dot(channels[k]));
  }
  return sig / intf;
}

double rate_uplink(double sinr, double bandwidth) {
  return bandwidth * std::log2(1.0 + sinr);
}

namespace {

std::vector<double> sinr_targets(const std::vector<double>& rate_targets,
                                 double bandwidth) {
  std::vector<double> g(rate_targets.size());
  for (size_t i = 0; i < g.size(); ++i)
    g[i] = std::exp2(rate_targets[i] / bandwidth) - 1.0;
  return g;
}

void fill_rates(PowerControlResult& r, const std::vector<CVector>& channels,
                double bandwidth, double sigma2) {
  const int n = static_cast<int>(channels.size());
  r.rates.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    r.rates[i] = rate_uplink(
        sinr_uplink(r.powers, r.beamformers, channels, i, sigma2), bandwidth);
}

}  // namespace

PowerControlResult fixed_point_power(const std::vector<CVector>& channels,
                                     const std::vector<double>& rate_targets,
                                     const SystemConfig& cfg, double sigma2) {
  const int n = static_cast<int>(channels.size());
  PowerControlResult res;
  if (n == 0) {
    res.converged = true;
    return res;
  }
  const auto gamma = sinr_targets(rate_targets, cfg.bandwidth);

  // Interference-free lower bounds and the divergence cap derived from them.
  std::vector<double> p_lb(n), p_cap(n);
  for (int i = 0; i < n; ++i) {
    double h2 = channels[i].squaredNorm();
    if (h2 <= 0.0) throw std::invalid_argument("fixed_point_power: zero channel");
    p_lb[i] = gamma[i] * sigma2 / h2;
    p_cap[i] = 1e6 * p_lb[i];
  }

  res.powers = p_lb;
  res.beamformers.assign(n, CVector());
  for (int it = 1; it <= cfg.fp_max_iters; ++it) {
    res.iterations = it;
    for (int i = 0; i < n; ++i)
      res.beamformers[i] = mmse_receiver(channels, res.powers, i, sigma2);
    double max_rel = 0.0;
    for (int i = 0; i < n; ++i) {
      const CVector& m = res.beamformers[i];
      double intf = sigma2 * m.squaredNorm();
      for (int k = 0; k < n; ++k)
        if (k != i) intf += res.powers[k] * std::norm(m.dot(channels[k]));
      double p_new = gamma[i] * intf / std::norm(m.dot(channels[i]));
      max_rel = std::max(max_rel,
                         std::abs(p_new - res.powers[i]) /
                             std::max(res.powers[i], 1e-300));
      res.powers[i] = p_new;
      if (p_new > p_cap[i]) {  // monotone divergence: targets infeasible
        res.converged = false;
        fill_rates(res, channels, cfg.bandwidth, sigma2);
        return res;
      }
    }
    if (max_rel < cfg.fp_tol) {
      res.converged = true;
      break;
    }
  }
  fill_rates(res, channels, cfg.bandwidth, sigma2);
  return res;
}

PowerControlResult uplink_powers_from_duality(
    const std::vector<CVector>& v, const std::vector<CVector>& channels,
    const std::vector<double>& rate_targets, const SystemConfig& cfg,
    double sigma2) {
  const int n = static_cast<int>(channels.size());
  PowerControlResult res;
  if (n == 0) {
    res.converged = true;
    return res;
  }
  const auto gamma = sinr_targets(rate_targets, cfg.bandwidth);

  res.beamformers.resize(n);
  for (int i = 0; i < n; ++i) {
    double nrm = v[i].norm();
    if (nrm <= 0.0)
      throw std::invalid_argument("uplink_powers_from_duality: zero beamformer");
    res.beamformers[i] = v[i] / nrm;
  }

  // Fixed point of the frozen-receiver power update, solved as the linear
  // balance p_i |m_i^H h_i|^2 / gamma_i - sum_{k!=i} p_k |m_i^H h_k|^2 = sigma^2.
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Constant(n, sigma2);
  for (int i = 0; i < n; ++i) {
    const CVector& m = res.beamformers[i];
    for (int k = 0; k < n; ++k) {
      double g = std::norm(m.dot(channels[k]));
      a(i, k) = (k == i) ? g / gamma[i] : -g;
    }
  }
  Eigen::VectorXd p = a.partialPivLu().solve(b);
  res.converged = true;
  res.powers.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(p(i)) || p(i) < 0.0) res.converged = false;
    res.powers[i] = std::max(p(i), 0.0);
  }
  res.iterations = 1;
  fill_rates(res, channels, cfg.bandwidth, sigma2);
  return res;
}

}  // namespace meran
