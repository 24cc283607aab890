#include "meran/socp.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace meran {

Eigen::VectorXd embed_complex(const CVector& v) {
  Eigen::VectorXd x(2 * v.size());
  x.head(v.size()) = v.real();
  x.tail(v.size()) = v.imag();
  return x;
}

CVector lift_complex(const Eigen::VectorXd& x, int offset, int complex_len) {
  CVector v(complex_len);
  for (int i = 0; i < complex_len; ++i)
    v(i) = Complex(x(offset + i), x(offset + complex_len + i));
  return v;
}

SocConstraint build_rate_soc(const CVector& h,
                             const std::vector<int>& v_offsets, int self_block,
                             double target, double sigma, double bandwidth,
                             int n_vars, int slack_idx) {
  const int len = static_cast<int>(h.size());
  const double coef = std::sqrt(1.0 - std::exp2(-target / bandwidth));
  const int nb = static_cast<int>(v_offsets.size());

  SocConstraint sc;
  sc.A = Eigen::MatrixXd::Zero(2 * nb + 1, n_vars);
  sc.b = Eigen::VectorXd::Zero(2 * nb + 1);
  sc.c = Eigen::VectorXd::Zero(n_vars);
  sc.d = 0.0;

  // h^H v = (Re h^T Re v + Im h^T Im v) + i (Re h^T Im v - Im h^T Re v)
  const Eigen::VectorXd hr = h.real(), hi = h.imag();
  for (int k = 0; k < nb; ++k) {
    const int off = v_offsets[k];
    sc.A.row(2 * k).segment(off, len) = coef * hr.transpose();
    sc.A.row(2 * k).segment(off + len, len) = coef * hi.transpose();
    sc.A.row(2 * k + 1).segment(off, len) = -coef * hi.transpose();
    sc.A.row(2 * k + 1).segment(off + len, len) = coef * hr.transpose();
  }
  sc.b(2 * nb) = coef * sigma;

  const int soff = v_offsets[self_block];
  sc.c.segment(soff, len) = hr;
  sc.c.segment(soff + len, len) = hi;
  if (slack_idx >= 0) sc.c(slack_idx) = 1.0;
  return sc;
}

void dump_problem(const SocpProblem& p, std::ostream& os) {
  os << "socp n=" << p.n << " socs=" << p.socs.size()
     << " caps=" << p.caps.size() << " nonneg=" << p.nonneg.size() << "\n";
  os << "quad_obj " << p.quad_obj.transpose() << "\n";
  os << "lin_obj " << p.lin_obj.transpose() << "\n";
  for (size_t l = 0; l < p.socs.size(); ++l) {
    const auto& s = p.socs[l];
    os << "soc " << l << " rows=" << s.A.rows() << " d=" << s.d << "\n";
    os << "A\n" << s.A << "\nb " << s.b.transpose() << "\nc "
       << s.c.transpose() << "\n";
  }
  for (size_t m = 0; m < p.caps.size(); ++m) {
    const auto& c = p.caps[m];
    os << "cap " << m << " s=" << c.s << "\nw " << c.w.transpose() << "\nr "
       << c.r.transpose() << "\n";
  }
  os << "nonneg";
  for (int j : p.nonneg) os << ' ' << j;
  os << "\n";
}

namespace {

// Internal scaled form. Linear inequalities a^T x + b > 0 generalize the
// nonneg indices so phase I can shift them by the relaxation variable.
struct LinIneq {
  Eigen::VectorXd a;
  double b = 0.0;
};

struct Internal {
  int n = 0;
  Eigen::VectorXd quad;  // objective x' diag(quad) x
  Eigen::VectorXd lin;
  std::vector<SocConstraint> socs;
  std::vector<Eigen::MatrixXd> soc_ata;  // precomputed A^T A
  std::vector<QuadCap> caps;
  std::vector<LinIneq> lins;
  double nu = 0.0;  // barrier complexity

  void finish() {
    nu = 2.0 * socs.size() + caps.size() + lins.size();
    soc_ata.clear();
    soc_ata.reserve(socs.size());
    for (const auto& s : socs) soc_ata.push_back(s.A.transpose() * s.A);
  }

  double objective(const Eigen::VectorXd& x) const {
    return x.dot(quad.cwiseProduct(x)) + lin.dot(x);
  }

  // Residuals; any nonpositive value means x is outside the domain.
  bool residuals(const Eigen::VectorXd& x, std::vector<double>& soc_r,
                 std::vector<double>& cap_r, std::vector<double>& lin_r) const {
    soc_r.resize(socs.size());
    cap_r.resize(caps.size());
    lin_r.resize(lins.size());
    for (size_t l = 0; l < socs.size(); ++l) {
      const auto& s = socs[l];
      double w = s.c.dot(x) + s.d;
      if (w <= 0.0) return false;
      double u2 = (s.A * x + s.b).squaredNorm();
      soc_r[l] = w * w - u2;
      if (soc_r[l] <= 0.0) return false;
    }
    for (size_t m = 0; m < caps.size(); ++m) {
      const auto& c = caps[m];
      cap_r[m] = c.r.dot(x) + c.s - x.dot(c.w.cwiseProduct(x));
      if (cap_r[m] <= 0.0) return false;
    }
    for (size_t l = 0; l < lins.size(); ++l) {
      lin_r[l] = lins[l].a.dot(x) + lins[l].b;
      if (lin_r[l] <= 0.0) return false;
    }
    return true;
  }

  // Barrier value; +inf outside the domain.
  double barrier(const Eigen::VectorXd& x) const {
    std::vector<double> sr, cr, lr;
    if (!residuals(x, sr, cr, lr)) return std::numeric_limits<double>::infinity();
    double phi = 0.0;
    for (double r : sr) phi -= std::log(r);
    for (double r : cr) phi -= std::log(r);
    for (double r : lr) phi -= std::log(r);
    return phi;
  }
};

struct BarrierResult {
  Eigen::VectorXd x;
  bool converged = false;
  bool hit_budget = false;
  int newton_steps = 0;
};

// Minimizes t*objective + barrier along the central path starting from a
// strictly interior x. early_exit, when set, is checked after every Newton
// step (used by phase I to bail out once a comfortable margin is reached).
template <typename EarlyExit>
BarrierResult barrier_solve(const Internal& in, Eigen::VectorXd x, double tol,
                            int newton_budget, EarlyExit early_exit) {
  BarrierResult out;
  const int n = in.n;
  const double mu = 20.0;

  double f0 = std::abs(in.objective(x));
  double t = in.nu / std::max(f0, 1.0);

  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd grad(n);
  std::vector<double> sr, cr, lr;

  while (out.newton_steps < newton_budget) {
    // Center for the current t.
    for (int inner = 0; inner < 200; ++inner) {
      if (out.newton_steps >= newton_budget) {
        out.hit_budget = true;
        out.x = x;
        return out;
      }
      if (!in.residuals(x, sr, cr, lr)) {
        out.x = x;  // lost the domain numerically; report what we have
        return out;
      }
      grad = 2.0 * t * in.quad.cwiseProduct(x) + t * in.lin;
      hess.setZero();
      hess.diagonal() = 2.0 * t * in.quad;
      for (size_t l = 0; l < in.socs.size(); ++l) {
        const auto& s = in.socs[l];
        const double r = sr[l];
        const double w = s.c.dot(x) + s.d;
        Eigen::VectorXd u = s.A * x + s.b;
        Eigen::VectorXd dr = 2.0 * w * s.c - 2.0 * (s.A.transpose() * u);
        grad.noalias() -= dr / r;
        hess.noalias() += (dr / r) * (dr / r).transpose();
        hess.noalias() += (2.0 / r) * in.soc_ata[l];
        hess.noalias() -= (2.0 / r) * (s.c * s.c.transpose());
      }
      for (size_t m = 0; m < in.caps.size(); ++m) {
        const auto& c = in.caps[m];
        const double r = cr[m];
        Eigen::VectorXd dr = c.r - 2.0 * c.w.cwiseProduct(x);
        grad.noalias() -= dr / r;
        hess.noalias() += (dr / r) * (dr / r).transpose();
        hess.diagonal() += (2.0 / r) * c.w;
      }
      for (size_t l = 0; l < in.lins.size(); ++l) {
        const auto& li = in.lins[l];
        const double r = lr[l];
        grad.noalias() -= li.a / r;
        hess.noalias() += (li.a / (r * r)) * li.a.transpose();
      }

      Eigen::VectorXd step;
      double lambda2 = 0.0;
      bool ridged = false;
      const double gnorm = grad.norm();
      for (double ridge = 0.0;; ridge = std::max(10.0 * ridge, 1e-12)) {
        Eigen::MatrixXd h = hess;
        if (ridge > 0.0) h.diagonal().array() += ridge * (1.0 + hess.diagonal().maxCoeff());
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        step = ldlt.solve(-grad);
        lambda2 = -grad.dot(step);
        // A valid direction must actually solve the (regularized) system;
        // a singular Hessian with a gradient outside its range yields a
        // finite but useless step that stalls the centering otherwise.
        const double solve_err = (h * step + grad).norm();
        if (std::isfinite(lambda2) && lambda2 >= 0.0 &&
            std::isfinite(step.norm()) &&
            solve_err <= 1e-8 * std::max(gnorm, 1.0)) {
          ridged = ridge > 0.0;
          break;
        }
        if (ridge > 1e10) {  // give up on this direction
          out.x = x;
          return out;
        }
      }
      if (!ridged && lambda2 / 2.0 < 1e-10) break;
      if (ridged && lambda2 / 2.0 < 1e-16) break;

      // Backtracking line search on t*f + barrier.
      const double fx = t * in.objective(x) + in.barrier(x);
      double alpha = 1.0;
      while (alpha > 1e-14) {
        Eigen::VectorXd xn = x + alpha * step;
        double fn = t * in.objective(xn) + in.barrier(xn);
        if (fn <= fx - 0.25 * alpha * lambda2) {
          x = xn;
          break;
        }
        alpha *= 0.5;
      }
      ++out.newton_steps;
      if (alpha <= 1e-14) break;  // stalled; accept current center
      if (early_exit(x)) {
        out.x = x;
        out.converged = true;
        return out;
      }
    }

    double gap = in.nu / t;
    if (gap <= tol * std::max(std::abs(in.objective(x)), 1e-6)) {
      out.x = x;
      out.converged = true;
      return out;
    }
    t *= mu;
  }
  out.hit_budget = true;
  out.x = x;
  return out;
}

Internal scale_problem(const SocpProblem& p) {
  Internal in;
  in.n = p.n;
  in.quad = p.quad_obj;
  in.lin = p.lin_obj;
  for (const auto& s : p.socs) {
    double sc = std::max({s.c.cwiseAbs().maxCoeff(), std::abs(s.d),
                          s.A.cwiseAbs().maxCoeff(), s.b.cwiseAbs().maxCoeff(),
                          1e-30});
    SocConstraint t;
    t.A = s.A / sc;
    t.b = s.b / sc;
    t.c = s.c / sc;
    t.d = s.d / sc;
    in.socs.push_back(std::move(t));
  }
  for (const auto& c : p.caps) {
    double sc = std::max({std::abs(c.s), c.r.cwiseAbs().maxCoeff(), 1e-30});
    QuadCap t;
    t.w = c.w / sc;
    t.r = c.r / sc;
    t.s = c.s / sc;
    in.caps.push_back(std::move(t));
  }
  for (int j : p.nonneg) {
    LinIneq li;
    li.a = Eigen::VectorXd::Zero(p.n);
    li.a(j) = 1.0;
    in.lins.push_back(std::move(li));
  }
  in.finish();
  return in;
}

enum class PhaseOneOutcome { Interior, Infeasible, Budget };

// Phase I: minimize the uniform relaxation s over the shifted constraints.
// Produces a strictly interior point of the original domain when one exists.
PhaseOneOutcome phase_one(const Internal& orig, const Eigen::VectorXd& xstart,
                          int newton_budget, int& steps_used,
                          Eigen::VectorXd& interior) {
  Internal ph;
  const int n = orig.n;
  ph.n = n + 1;
  ph.quad = Eigen::VectorXd::Zero(n + 1);
  ph.lin = Eigen::VectorXd::Zero(n + 1);
  ph.lin(n) = 1.0;
  for (const auto& s : orig.socs) {
    SocConstraint t = s;
    t.A.conservativeResize(t.A.rows(), n + 1);
    t.A.col(n).setZero();
    t.c.conservativeResize(n + 1);
    t.c(n) = 1.0;
    ph.socs.push_back(std::move(t));
  }
  for (const auto& c : orig.caps) {
    QuadCap t;
    t.w = Eigen::VectorXd::Zero(n + 1);
    t.w.head(n) = c.w;
    t.r = Eigen::VectorXd::Zero(n + 1);
    t.r.head(n) = c.r;
    t.r(n) = 1.0;
    t.s = c.s;
    ph.caps.push_back(std::move(t));
  }
  for (const auto& li : orig.lins) {
    LinIneq t;
    t.a = Eigen::VectorXd::Zero(n + 1);
    t.a.head(n) = li.a;
    t.a(n) = 1.0;
    t.b = li.b;
    ph.lins.push_back(std::move(t));
  }
  ph.finish();

  // Pick s0 just above the worst violation at xstart.
  double s0 = 0.0;
  for (const auto& s : orig.socs)
    s0 = std::max(s0, (s.A * xstart + s.b).norm() - (s.c.dot(xstart) + s.d));
  for (const auto& c : orig.caps)
    s0 = std::max(s0, xstart.dot(c.w.cwiseProduct(xstart)) - c.r.dot(xstart) - c.s);
  for (const auto& li : orig.lins) s0 = std::max(s0, -(li.a.dot(xstart) + li.b));
  Eigen::VectorXd x0(n + 1);
  x0.head(n) = xstart;
  x0(n) = s0 + 1.0;

  auto is_interior = [&](const Eigen::VectorXd& x) {
    return x(n) < -1e-4;  // constraints are scaled O(1)
  };
  auto res = barrier_solve(ph, x0, 1e-8, newton_budget, is_interior);
  steps_used = res.newton_steps;
  if (res.x.size() != 0 && res.x(n) < -1e-9) {
    std::vector<double> sr, cr, lr;
    Eigen::VectorXd x = res.x.head(n);
    if (orig.residuals(x, sr, cr, lr)) {
      interior = x;
      return PhaseOneOutcome::Interior;
    }
  }
  return res.hit_budget ? PhaseOneOutcome::Budget : PhaseOneOutcome::Infeasible;
}

}  // namespace

SocpSolution solve(const SocpProblem& p, double tol,
                   const std::optional<Eigen::VectorXd>& x0) {
  Internal in = scale_problem(p);
  SocpSolution sol;

  if (in.socs.empty() && in.caps.empty() && in.lins.empty()) {
    // Unconstrained diagonal QP; solved in closed form.
    sol.x = Eigen::VectorXd::Zero(p.n);
    for (int j = 0; j < p.n; ++j)
      if (in.quad(j) > 0.0) sol.x(j) = -in.lin(j) / (2.0 * in.quad(j));
    sol.objective_value = in.objective(sol.x);
    sol.status = SolveStatus::Optimal;
    return sol;
  }

  Eigen::VectorXd start;
  std::vector<double> sr, cr, lr;
  if (x0 && x0->size() == p.n && in.residuals(*x0, sr, cr, lr)) {
    start = *x0;
  } else {
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(p.n);
    int steps = 0;
    Eigen::VectorXd interior;
    auto outcome = phase_one(in, guess, 4000, steps, interior);
    sol.newton_steps += steps;
    if (outcome != PhaseOneOutcome::Interior) {
      sol.status = outcome == PhaseOneOutcome::Budget ? SolveStatus::MaxIter
                                                      : SolveStatus::Infeasible;
      return sol;
    }
    start = interior;
  }

  auto never = [](const Eigen::VectorXd&) { return false; };
  auto res = barrier_solve(in, start, tol, 6000, never);
  sol.newton_steps += res.newton_steps;
  sol.x = res.x;
  sol.objective_value = sol.x.size() ? in.objective(sol.x) : 0.0;
  sol.status = res.converged ? SolveStatus::Optimal : SolveStatus::MaxIter;
  return sol;
}

}  // namespace meran
