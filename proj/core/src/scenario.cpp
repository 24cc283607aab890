#include "meran/scenario.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace meran {

double Rng::uniform01() {
  // 53 random bits mapped to [0, 1); independent of library distributions.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01(), u2 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

double pathloss_db(double distance_km, double d_min_km) {
  if (distance_km < d_min_km)
    throw std::domain_error("pathloss_db: distance below placement guard");
  return 148.1 + 37.6 * std::log10(distance_km);
}

std::vector<TaskSpec> table1_tasks() {
  static const double kBits[20] = {0.08, 0.65, 0.4,  0.15, 0.15, 0.4,  0.6,
                                   0.7,  0.25, 0.6,  0.15, 0.69, 0.55, 0.56,
                                   0.15, 0.65, 0.28, 0.19, 0.14, 0.25};
  static const double kCycles[20] = {0.2,  1.0,  0.96, 1.1,  0.8,  1.1,  0.8,
                                     1.21, 1.4,  1.3,  1.1,  0.95, 0.9,  0.8,
                                     1.08, 0.9,  0.75, 0.88, 0.95, 0.93};
  std::vector<TaskSpec> out(20);
  for (int i = 0; i < 20; ++i)
    out[i] = TaskSpec{kCycles[i] * 1e6, kBits[i] * 1e6, 1.0};
  return out;
}

Scenario generate(std::uint64_t seed, int n, int j, int k, double area_m,
                  const SystemConfig& cfg) {
  if (n < 1 || j < 1 || k < 1)
    throw std::invalid_argument("generate: N, J, K must be >= 1");
  if (!(area_m > 0.0)) throw std::invalid_argument("generate: area_m must be positive");

  Rng rng(seed);
  Scenario sc;
  sc.cfg = cfg;
  sc.seed = seed;
  sc.antennas_per_rrh = k;

  sc.rrh_positions.resize(j);
  for (auto& p : sc.rrh_positions)
    p = Position{rng.uniform01() * area_m, rng.uniform01() * area_m};

  auto tasks = table1_tasks();
  sc.ues.resize(n);
  for (int i = 0; i < n; ++i) {
    UEProfile ue;
    ue.task = tasks[i % tasks.size()];
    ue.f_local_max = cfg.f_local_max;
    ue.kappa = cfg.kappa;
    ue.nu = cfg.nu;
    // Resample until the UE is at least d_min away from every RRH; the
    // pathloss model diverges at d -> 0.
    for (;;) {
      ue.position = Position{rng.uniform01() * area_m, rng.uniform01() * area_m};
      double dmin = 1e300;
      for (const auto& r : sc.rrh_positions)
        dmin = std::min(dmin, distance_m(ue.position, r));
      if (dmin >= cfg.d_min_m) break;
    }
    sc.ues[i] = ue;
  }

  const double sigma = std::sqrt(cfg.sigma2_w());
  sc.channels.resize(n);
  for (int i = 0; i < n; ++i) {
    CVector h(k * j);
    for (int rj = 0; rj < j; ++rj) {
      double d_km = distance_m(sc.ues[i].position, sc.rrh_positions[rj]) / 1000.0;
      double pl = pathloss_db(d_km, cfg.d_min_m / 1000.0);
      double amp = std::sqrt(std::pow(10.0, -pl / 10.0));
      for (int a = 0; a < k; ++a) h(rj * k + a) = amp * rng.cn01();
    }
    sc.channels[i] = h / sigma;  // stored noise-normalized, sigma^2 == 1
  }
  return sc;
}

namespace {

void put(std::ostream& os, const char* key, double v) {
  os << key << ' ' << std::setprecision(17) << v << '\n';
}

double get(std::istream& is, const char* key) {
  std::string k;
  double v;
  if (!(is >> k >> v) || k != key)
    throw std::runtime_error(std::string("scenario parse: expected ") + key);
  return v;
}

}  // namespace

void save_scenario(const Scenario& sc, std::ostream& os) {
  os << "meran-scenario 1\n";
  put(os, "seed", static_cast<double>(sc.seed));
  put(os, "n", sc.n());
  put(os, "j", sc.j());
  put(os, "k", sc.k());
  const SystemConfig& c = sc.cfg;
  put(os, "bandwidth", c.bandwidth);
  put(os, "noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  put(os, "clone_capacity", c.clone_capacity);
  put(os, "bbu_capacity", c.bbu_capacity);
  put(os, "cycles_per_bit", c.cycles_per_bit);
  put(os, "clone_speed", c.clone_speed);
  put(os, "theta", c.theta);
  put(os, "big_m", c.big_m);
  put(os, "sca_max_iters", c.sca_max_iters);
  put(os, "sca_tol", c.sca_tol);
  put(os, "fp_max_iters", c.fp_max_iters);
  put(os, "fp_tol", c.fp_tol);
  put(os, "zero_threshold", c.zero_threshold);
  put(os, "solver_tol", c.solver_tol);
  put(os, "duality_tol", c.duality_tol);
  put(os, "f_local_max", c.f_local_max);
  put(os, "kappa", c.kappa);
  put(os, "nu", c.nu);
  put(os, "d_min_m", c.d_min_m);
  for (const auto& r : sc.rrh_positions)
    os << "rrh " << std::setprecision(17) << r.x << ' ' << r.y << '\n';
  for (int i = 0; i < sc.n(); ++i) {
    const auto& u = sc.ues[i];
    os << "ue " << std::setprecision(17) << u.task.cycles << ' ' << u.task.bits
       << ' ' << u.task.deadline << ' ' << u.f_local_max << ' ' << u.kappa
       << ' ' << u.nu << ' ' << u.position.x << ' ' << u.position.y << '\n';
    os << "channel";
    for (int e = 0; e < sc.channels[i].size(); ++e)
      os << ' ' << std::setprecision(17) << sc.channels[i](e).real() << ' '
         << sc.channels[i](e).imag();
    os << '\n';
  }
}

Scenario load_scenario(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "meran-scenario" || version != 1)
    throw std::runtime_error("scenario parse: bad header");
  Scenario sc;
  sc.seed = static_cast<std::uint64_t>(get(is, "seed"));
  int n = static_cast<int>(get(is, "n"));
  int j = static_cast<int>(get(is, "j"));
  int k = static_cast<int>(get(is, "k"));
  sc.antennas_per_rrh = k;
  SystemConfig& c = sc.cfg;
  c.bandwidth = get(is, "bandwidth");
  c.noise_psd_dbm_hz = get(is, "noise_psd_dbm_hz");
  c.clone_capacity = static_cast<int>(get(is, "clone_capacity"));
  c.bbu_capacity = get(is, "bbu_capacity");
  c.cycles_per_bit = get(is, "cycles_per_bit");
  c.clone_speed = get(is, "clone_speed");
  c.theta = get(is, "theta");
  c.big_m = get(is, "big_m");
  c.sca_max_iters = static_cast<int>(get(is, "sca_max_iters"));
  c.sca_tol = get(is, "sca_tol");
  c.fp_max_iters = static_cast<int>(get(is, "fp_max_iters"));
  c.fp_tol = get(is, "fp_tol");
  c.zero_threshold = get(is, "zero_threshold");
  c.solver_tol = get(is, "solver_tol");
  c.duality_tol = get(is, "duality_tol");
  c.f_local_max = get(is, "f_local_max");
  c.kappa = get(is, "kappa");
  c.nu = get(is, "nu");
  c.d_min_m = get(is, "d_min_m");
  sc.rrh_positions.resize(j);
  for (auto& r : sc.rrh_positions) {
    std::string key;
    if (!(is >> key >> r.x >> r.y) || key != "rrh")
      throw std::runtime_error("scenario parse: expected rrh");
  }
  sc.ues.resize(n);
  sc.channels.resize(n);
  for (int i = 0; i < n; ++i) {
    std::string key;
    UEProfile& u = sc.ues[i];
    if (!(is >> key >> u.task.cycles >> u.task.bits >> u.task.deadline >>
          u.f_local_max >> u.kappa >> u.nu >> u.position.x >> u.position.y) ||
        key != "ue")
      throw std::runtime_error("scenario parse: expected ue");
    if (!(is >> key) || key != "channel")
      throw std::runtime_error("scenario parse: expected channel");
    CVector h(k * j);
    for (int e = 0; e < k * j; ++e) {
      double re, im;
      if (!(is >> re >> im)) throw std::runtime_error("scenario parse: channel entry");
      h(e) = Complex(re, im);
    }
    sc.channels[i] = h;
  }
  return sc;
}

}  // namespace meran
