// Operator entry point: simulate one scenario, run capacity sweeps, or
// compare algorithms against exhaustive search.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <meran/baselines.hpp>
#include <meran/car_fast.hpp>
#include <meran/experiments.hpp>

using nlohmann::json;
using namespace meran;

namespace {

// INI-style config: [section] headers, key = value lines, '#' comments.
std::map<std::string, std::string> parse_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  std::string line, section;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad config line: " + line);
    std::string key = trim(line.substr(0, eq));
    kv[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Seed lists accept "1 2 3", "1,2,3", and ranges like "1..20".
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::string tok;
  std::istringstream is(s);
  std::string norm = s;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream in(norm);
  while (in >> tok) {
    size_t dots = tok.find("..");
    if (dots != std::string::npos) {
      std::uint64_t a = std::stoull(tok.substr(0, dots));
      std::uint64_t b = std::stoull(tok.substr(dots + 2));
      for (std::uint64_t v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(std::stoull(tok));
    }
  }
  return out;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::string norm = s;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream in(norm);
  double v;
  while (in >> v) out.push_back(v);
  return out;
}

std::vector<std::string> parse_words(const std::string& s) {
  std::vector<std::string> out;
  std::string norm = s;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream in(norm);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

struct Options {
  std::string config;
  std::string algo = "car";
  std::uint64_t seed = 1;
  int n = 20, j = 20, k = 2;
  double area_m = 2000.0;
  double fb = 0.0, fc = 0.0;  // 0 = not overridden
  std::string out;            // empty = stdout
  std::string svg;            // prefix for chart files
  int jobs = 0;               // 0 = hardware concurrency
  int es_n_cap = 12;
  // track which flags were set on the command line for precedence
  std::map<std::string, bool> set;
};

double cfg_num(const std::map<std::string, std::string>& kv,
               const std::string& key, double dflt) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : std::stod(it->second);
}

// Precedence: command line > config file > defaults.
void apply_config(const std::map<std::string, std::string>& kv, Options& opt,
                  SystemConfig& sys) {
  sys.bandwidth = cfg_num(kv, "system.bandwidth", sys.bandwidth);
  sys.noise_psd_dbm_hz = cfg_num(kv, "system.noise_psd_dbm_hz", sys.noise_psd_dbm_hz);
  sys.clone_capacity = (int)cfg_num(kv, "system.clone_capacity", sys.clone_capacity);
  sys.bbu_capacity = cfg_num(kv, "system.bbu_capacity", sys.bbu_capacity);
  sys.cycles_per_bit = cfg_num(kv, "system.cycles_per_bit", sys.cycles_per_bit);
  sys.clone_speed = cfg_num(kv, "system.clone_speed", sys.clone_speed);
  sys.theta = cfg_num(kv, "system.theta", sys.theta);
  sys.big_m = cfg_num(kv, "system.big_m", sys.big_m);
  sys.sca_max_iters = (int)cfg_num(kv, "system.sca_max_iters", sys.sca_max_iters);
  sys.sca_tol = cfg_num(kv, "system.sca_tol", sys.sca_tol);
  sys.fp_max_iters = (int)cfg_num(kv, "system.fp_max_iters", sys.fp_max_iters);
  sys.fp_tol = cfg_num(kv, "system.fp_tol", sys.fp_tol);
  sys.zero_threshold = cfg_num(kv, "system.zero_threshold", sys.zero_threshold);
  sys.solver_tol = cfg_num(kv, "system.solver_tol", sys.solver_tol);
  sys.duality_tol = cfg_num(kv, "system.duality_tol", sys.duality_tol);
  sys.f_local_max = cfg_num(kv, "system.f_local_max", sys.f_local_max);
  sys.kappa = cfg_num(kv, "system.kappa", sys.kappa);
  sys.nu = cfg_num(kv, "system.nu", sys.nu);
  sys.d_min_m = cfg_num(kv, "system.d_min_m", sys.d_min_m);

  if (!opt.set["n"]) opt.n = (int)cfg_num(kv, "scenario.n", opt.n);
  if (!opt.set["j"]) opt.j = (int)cfg_num(kv, "scenario.j", opt.j);
  if (!opt.set["k"]) opt.k = (int)cfg_num(kv, "scenario.k", opt.k);
  if (!opt.set["seed"])
    opt.seed = (std::uint64_t)cfg_num(kv, "scenario.seed", (double)opt.seed);
  opt.area_m = cfg_num(kv, "scenario.area_m", opt.area_m);
  if (!opt.set["algo"]) {
    auto it = kv.find("scenario.algo");
    if (it != kv.end()) opt.algo = it->second;
  }
  opt.es_n_cap = (int)cfg_num(kv, "sweep.es_n_cap", opt.es_n_cap);
}

void echo_config(std::ostream& os, const SystemConfig& sys, const Options& opt,
                 const char* prefix) {
  os << prefix << " bandwidth=" << sys.bandwidth
     << " noise_psd_dbm_hz=" << sys.noise_psd_dbm_hz
     << " clone_capacity=" << sys.clone_capacity
     << " bbu_capacity=" << sys.bbu_capacity
     << " cycles_per_bit=" << sys.cycles_per_bit
     << " clone_speed=" << sys.clone_speed << "\n"
     << prefix << " theta=" << sys.theta << " big_m=" << sys.big_m
     << " zero_threshold=" << sys.zero_threshold
     << " solver_tol=" << sys.solver_tol << " sca_tol=" << sys.sca_tol
     << " f_local_max=" << sys.f_local_max << " kappa=" << sys.kappa
     << " nu=" << sys.nu << "\n"
     << prefix << " n=" << opt.n << " j=" << opt.j << " k=" << opt.k
     << " area_m=" << opt.area_m << " seed=" << opt.seed << "\n";
}

json allocation_json(const Allocation& a, const Scenario& sc) {
  json ues = json::array();
  for (int i = 0; i < a.n(); ++i) {
    json u;
    u["ue"] = i;
    u["class"] = to_string(a.classification.labels[i]);
    u["completed"] = (bool)a.completed[i];
    u["tx_power_w"] = a.tx_power[i];
    u["local_power_w"] = a.local_power[i];
    u["rate_bps"] = a.rates[i];
    ues.push_back(u);
  }
  json out;
  out["seed"] = sc.seed;
  out["sum_power_w"] = a.sum_power;
  out["ues"] = ues;
  return out;
}

int cmd_simulate(const Options& opt, const SystemConfig& sys) {
  auto errs = validate_config(sys);
  if (!errs.empty()) {
    std::cerr << "config error: " << errs.front() << "\n";
    return 1;
  }
  if (opt.algo == "es" && opt.n > opt.es_n_cap) {
    std::cerr << "es refused: n = " << opt.n << " exceeds n_cap = "
              << opt.es_n_cap << " (subset count 2^|O| is unbounded)\n";
    return 1;
  }
  Scenario sc = generate(opt.seed, opt.n, opt.j, opt.k, opt.area_m, sys);
  auto [cls, dec] = classify(sc);
  RunLog log;
  Allocation a;
  try {
    a = run_algorithm(opt.algo, sc, cls, dec, opt.es_n_cap, &log);
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) {
      std::cerr << "cannot write " << opt.out << "\n";
      return 1;
    }
    os = &file;
  }
  echo_config(*os, sys, opt, "# config");
  *os << allocation_json(a, sc).dump(2) << "\n";

  int completed = 0, accepted = 0;
  double rate_cycles = 0.0;
  for (int i = 0; i < a.n(); ++i) {
    if (a.completed[i]) ++completed;
    auto c = a.classification.labels[i];
    if (c == UEClass::OH || c == UEClass::OL) {
      ++accepted;
      rate_cycles += dec[i].r_min * sys.cycles_per_bit;
    }
  }
  std::cerr << "algo=" << opt.algo << " case=" << log.case_id
            << " completed=" << completed << "/" << a.n()
            << " incomplete=" << (a.n() - completed)
            << " accepted=" << accepted
            << " sum_power_w=" << a.sum_power
            << " mc_util=" << accepted / (double)sys.clone_capacity
            << " bbu_util=" << rate_cycles / sys.bbu_capacity << "\n";
  return 0;
}

// Minimal polyline chart: one series per algorithm, linear axes.
void write_svg(const std::string& path, const std::string& title,
               const std::vector<MetricsRow>& rows,
               double MetricsRow::*field) {
  std::vector<std::string> algos;
  for (const auto& r : rows)
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end())
      algos.push_back(r.algorithm);
  double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
  for (const auto& r : rows) {
    xmin = std::min(xmin, r.value);
    xmax = std::max(xmax, r.value);
    ymax = std::max(ymax, r.*field);
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  auto X = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto Y = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e"};
  std::ofstream os(path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
     << H << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
     << "<text x='" << W / 2 << "' y='20' text-anchor='middle' "
        "font-family='sans-serif' font-size='14'>" << title << "</text>\n"
     << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
     << "' y2='" << H - mb << "' stroke='black'/>\n"
     << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << H - mb << "' stroke='black'/>\n";
  for (int t = 0; t <= 4; ++t) {
    double xv = xmin + (xmax - xmin) * t / 4.0;
    double yv = ymin + (ymax - ymin) * t / 4.0;
    os << "<text x='" << X(xv) << "' y='" << H - mb + 18
       << "' text-anchor='middle' font-family='sans-serif' font-size='10'>"
       << xv << "</text>\n"
       << "<text x='" << ml - 8 << "' y='" << Y(yv) + 4
       << "' text-anchor='end' font-family='sans-serif' font-size='10'>" << yv
       << "</text>\n";
  }
  for (size_t s = 0; s < algos.size(); ++s) {
    os << "<polyline fill='none' stroke='" << colors[s % 5]
       << "' stroke-width='1.5' points='";
    std::vector<const MetricsRow*> series;
    for (const auto& r : rows)
      if (r.algorithm == algos[s]) series.push_back(&r);
    std::sort(series.begin(), series.end(),
              [](const MetricsRow* a, const MetricsRow* b) {
                return a->value < b->value;
              });
    for (auto* r : series) os << X(r->value) << ',' << Y(r->*field) << ' ';
    os << "'/>\n<text x='" << W - mr - 100 << "' y='" << mt + 16 * s + 12
       << "' font-family='sans-serif' font-size='12' fill='" << colors[s % 5]
       << "'>" << algos[s] << "</text>\n";
  }
  os << "</svg>\n";
}

SweepSpec sweep_from_config(const std::map<std::string, std::string>& kv,
                            const Options& opt, const SystemConfig& sys) {
  SweepSpec spec;
  spec.base_cfg = sys;
  spec.n = opt.n;
  spec.j = opt.j;
  spec.k = opt.k;
  spec.area_m = opt.area_m;
  spec.es_n_cap = opt.es_n_cap;
  spec.jobs = opt.jobs > 0 ? opt.jobs
                           : (int)std::max(1u, std::thread::hardware_concurrency());
  auto get = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    return it == kv.end() ? std::string() : it->second;
  };
  std::string p = get("sweep.param");
  if (p == "F_C" || p == "FC" || p == "fc") spec.param = SweptParam::FC;
  else if (p == "F_B" || p == "FB" || p == "fb" || p.empty()) spec.param = SweptParam::FB;
  else throw std::runtime_error("sweep.param must be F_B or F_C");
  spec.values = parse_values(get("sweep.values"));
  spec.fixed_other = cfg_num(kv, "sweep.fixed_other",
                             spec.param == SweptParam::FB
                                 ? (double)sys.clone_capacity
                                 : sys.bbu_capacity);
  spec.seeds = parse_seeds(get("sweep.seeds"));
  auto algos = parse_words(get("sweep.algorithms"));
  spec.algorithms = algos.empty()
                        ? std::vector<std::string>{"local", "car", "car-p", "car-d"}
                        : algos;
  return spec;
}

int cmd_sweep(const Options& opt, const SystemConfig& sys,
              const std::map<std::string, std::string>& kv) {
  SweepSpec spec;
  try {
    spec = sweep_from_config(kv, opt, sys);
    auto errs = validate_spec(spec);
    if (!errs.empty()) throw std::runtime_error(errs.front());
  } catch (const std::exception& e) {
    std::cerr << "sweep config error: " << e.what() << "\n";
    return 1;
  }
  auto rows = run_sweep(spec);

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) {
      std::cerr << "cannot write " << opt.out << "\n";
      return 1;
    }
    os = &file;
  }
  echo_config(*os, sys, opt, "# config");
  *os << "# sweep param=" << to_string(spec.param)
      << " fixed_other=" << spec.fixed_other
      << " seeds=" << spec.seeds.size() << "\n";
  write_csv(rows, *os);

  std::string svg_prefix = opt.svg;
  if (opt.set.count("svg") && svg_prefix.empty()) {
    // bare --svg: derive the prefix from the CSV path (or use "charts")
    svg_prefix = opt.out.empty() ? std::string("charts") : opt.out;
    auto dot = svg_prefix.rfind('.');
    if (dot != std::string::npos && dot > svg_prefix.rfind('/') + 0)
      svg_prefix = svg_prefix.substr(0, dot);
  }
  if (!svg_prefix.empty()) {
    std::string xlabel = spec.param == SweptParam::FB ? "F_B" : "F_C";
    write_svg(svg_prefix + "_power.svg", "mean sum power (W) vs " + xlabel,
              rows, &MetricsRow::mean_sum_power_w);
    write_svg(svg_prefix + "_completed.svg", "mean completed vs " + xlabel,
              rows, &MetricsRow::mean_completed);
    write_svg(svg_prefix + "_mc_util.svg", "MC utilization vs " + xlabel, rows,
              &MetricsRow::mc_util);
    write_svg(svg_prefix + "_bbu_util.svg", "BBU utilization vs " + xlabel,
              rows, &MetricsRow::bbu_util);
  }
  auto rep = trend_checks(rows);
  for (const auto& n : rep.notes) std::cerr << "note: " << n << "\n";
  for (const auto& f : rep.failures) std::cerr << "trend failure: " << f << "\n";
  return 0;
}

int cmd_compare(const Options& opt, const SystemConfig& sys,
                const std::map<std::string, std::string>& kv) {
  auto it = kv.find("sweep.seeds");
  std::vector<std::uint64_t> seeds =
      it != kv.end() ? parse_seeds(it->second)
                     : std::vector<std::uint64_t>{opt.seed};
  if (opt.n > opt.es_n_cap) {
    std::cerr << "compare refused: n = " << opt.n << " exceeds n_cap = "
              << opt.es_n_cap << "\n";
    return 1;
  }
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!opt.out.empty()) {
    file.open(opt.out);
    os = &file;
  }
  echo_config(*os, sys, opt, "# config");
  *os << "seed,algorithm,completed,accepted,sum_power_w,es_power_gap\n";
  const std::vector<std::string> algos = {"car", "car-p", "car-d"};
  for (auto seed : seeds) {
    Scenario sc = generate(seed, opt.n, opt.j, opt.k, opt.area_m, sys);
    auto [cls, dec] = classify(sc);
    Allocation es = exhaustive_search(sc, cls, dec, opt.es_n_cap);
    auto summarize = [&](const std::string& name, const Allocation& a) {
      int completed = 0, accepted = 0;
      for (int i = 0; i < a.n(); ++i) {
        if (a.completed[i]) ++completed;
        auto c = a.classification.labels[i];
        if (c == UEClass::OH || c == UEClass::OL) ++accepted;
      }
      double gap = es.sum_power > 0.0
                       ? (a.sum_power - es.sum_power) / es.sum_power
                       : 0.0;
      *os << seed << ',' << name << ',' << completed << ',' << accepted << ','
          << a.sum_power << ',' << gap << "\n";
    };
    summarize("es", es);
    for (const auto& name : algos)
      summarize(name, run_algorithm(name, sc, cls, dec, opt.es_n_cap));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ME-RAN offloading and resource-allocation simulator"};
  app.require_subcommand(1);
  Options opt;

  std::vector<CLI::Option*> svg_opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "config file (INI-style)");
    sub->add_option("--seed", opt.seed)->each([&](const std::string&) { opt.set["seed"] = true; });
    sub->add_option("--algo", opt.algo, "local|es|car|car-p|car-d")
        ->each([&](const std::string&) { opt.set["algo"] = true; });
    sub->add_option("--n", opt.n)->each([&](const std::string&) { opt.set["n"] = true; });
    sub->add_option("--j", opt.j)->each([&](const std::string&) { opt.set["j"] = true; });
    sub->add_option("--k", opt.k)->each([&](const std::string&) { opt.set["k"] = true; });
    sub->add_option("--fb", opt.fb, "BBU capacity override, cycles/s")
        ->each([&](const std::string&) { opt.set["fb"] = true; });
    sub->add_option("--fc", opt.fc, "clone capacity override, count")
        ->each([&](const std::string&) { opt.set["fc"] = true; });
    sub->add_option("--out", opt.out, "output file (default stdout)");
    sub->add_option("--jobs", opt.jobs, "worker threads (default: cores)");
    svg_opts.push_back(sub->add_option("--svg", opt.svg,
                                       "emit SVG charts (optional value: "
                                       "path prefix)")
                           ->expected(0, 1));
  };
  auto* sim = app.add_subcommand("simulate", "run one scenario end-to-end");
  auto* swp = app.add_subcommand("sweep", "Monte-Carlo capacity sweep, CSV out");
  auto* cmp = app.add_subcommand("compare", "paired-run gap report vs exhaustive search");
  add_common(sim);
  add_common(swp);
  add_common(cmp);

  CLI11_PARSE(app, argc, argv);
  for (const auto* o : svg_opts)
    if (o->count() > 0) opt.set["svg"] = true;

  SystemConfig sys;
  std::map<std::string, std::string> kv;
  try {
    if (!opt.config.empty()) kv = parse_config(opt.config);
    apply_config(kv, opt, sys);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (opt.set["fb"]) sys.bbu_capacity = opt.fb;
  if (opt.set["fc"]) sys.clone_capacity = (int)opt.fc;

  try {
    if (sim->parsed()) return cmd_simulate(opt, sys);
    if (swp->parsed()) return cmd_sweep(opt, sys, kv);
    if (cmp->parsed()) return cmd_compare(opt, sys, kv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
