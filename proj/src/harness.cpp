#include "tripssqp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "tripssqp/analytic_suite.hpp"
#include "tripssqp/errors.hpp"
#include "tripssqp/rng.hpp"

namespace tripssqp {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr std::uint64_t kProblemSalt = 0x70726f626c656dULL;

const std::vector<HessianKind> kAllHessians = {HessianKind::identity, HessianKind::sr1, HessianKind::estimated,
                                               HessianKind::averaged};

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::barrier_schedules: return "exp1-barrier-schedules";
    case ExperimentKind::hessians_flops: return "exp2-hessians-flops";
    case ExperimentKind::adaptive_vs_fixed: return "exp3-adaptive-vs-fixed";
    case ExperimentKind::logistic: return "logistic";
  }
  return "exp1-barrier-schedules";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  std::string t = lower(text);
  for (ExperimentKind k : {ExperimentKind::barrier_schedules, ExperimentKind::hessians_flops,
                           ExperimentKind::adaptive_vs_fixed, ExperimentKind::logistic}) {
    std::string name = to_string(k);
    if (t == name || t == name.substr(0, 4)) return k;
  }
  throw ConfigError("unknown experiment '" + text + "'");
}

std::string to_string(Algorithm algorithm) {
  return algorithm == Algorithm::adaptive ? "adaptive" : "fully-stochastic";
}

Algorithm parse_algorithm(const std::string& text) {
  std::string t = lower(text);
  if (t == "adaptive" || t == "tr-ip-ssqp") return Algorithm::adaptive;
  if (t == "fully-stochastic" || t == "fixed" || t == "fully-tr-ip-ssqp") return Algorithm::fully_stochastic;
  throw ConfigError("unknown algorithm '" + text + "'");
}

std::string MethodSpec::id() const {
  std::string out = algorithm == Algorithm::adaptive ? "TR-IP-SSQP-" : "Fully-TR-IP-SSQP-";
  out += to_string(hessian);
  if (schedule) out += "@" + schedule->to_string();
  return out;
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.noise_levels = {1e-8, 1e-4, 1e-2, 1e-1};
  c.solver.max_iters = 10000000;
  switch (kind) {
    case ExperimentKind::barrier_schedules:
      for (HessianKind h : kAllHessians) {
        for (const char* s : {"geom:0.9999", "geom:0.999", "power:0.1", "power:0.5"}) {
          c.methods.push_back({Algorithm::adaptive, h, BarrierSchedule::parse(s)});
        }
      }
      c.solver.budget = {BudgetKind::iterations, 1e4};
      c.oracle.max_batch = 10000;
      break;
    case ExperimentKind::hessians_flops:
      for (HessianKind h : kAllHessians) c.methods.push_back({Algorithm::adaptive, h, std::nullopt});
      c.solver.budget = {BudgetKind::flops, 1e6};
      c.oracle.max_batch = 10000;
      break;
    case ExperimentKind::adaptive_vs_fixed:
      for (Algorithm a : {Algorithm::adaptive, Algorithm::fully_stochastic}) {
        for (HessianKind h : kAllHessians) c.methods.push_back({a, h, std::nullopt});
      }
      c.solver.budget = {BudgetKind::gradient_evaluations, 1e5};
      c.oracle.max_batch = 1000;
      break;
    case ExperimentKind::logistic:
      c.noise_levels = {0.0};
      c.noise_kind = NoiseKind::subsample;
      for (const char* s : {"geom:0.9999", "power:0.1"}) {
        for (Algorithm a : {Algorithm::adaptive, Algorithm::fully_stochastic}) {
          for (HessianKind h : kAllHessians) c.methods.push_back({a, h, BarrierSchedule::parse(s)});
        }
      }
      c.solver.budget = {BudgetKind::epochs, 200.0};
      c.oracle.max_batch = 1000;
      c.logistic_instances = 10;
      break;
  }
  c.solver.schedule = BarrierSchedule::geometric(0.9999);
  return c;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("experiment needs at least one method");
  if (noise_levels.empty()) throw ConfigError("experiment needs at least one noise level");
  for (double s : noise_levels) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("noise levels must be finite and >= 0");
  }
  if (runs_per_instance < 1) throw ConfigError("runs_per_instance must be at least 1");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (experiment == ExperimentKind::logistic) {
    if (logistic_instances < 1) throw ConfigError("logistic_instances must be at least 1");
  } else if (suite_count < 1) {
    throw ConfigError("suite.count must be at least 1");
  }
  for (const MethodSpec& m : methods) {
    SolverConfig s = solver;
    s.hessian = m.hessian;
    if (m.schedule) s.schedule = *m.schedule;
    s.validate(oracle);
  }
}

Json to_json(const ExperimentConfig& c) {
  Json methods = Json::array();
  for (const MethodSpec& m : c.methods) {
    Json jm = {{"algorithm", to_string(m.algorithm)}, {"hessian", to_string(m.hessian)}};
    if (m.schedule) jm["schedule"] = m.schedule->to_string();
    methods.push_back(jm);
  }
  Json exp;
  exp["experiment"] = to_string(c.experiment);
  exp["noise_levels"] = c.noise_levels;
  exp["methods"] = methods;
  exp["runs_per_instance"] = c.runs_per_instance;
  exp["seed"] = c.seed;
  exp["threads"] = c.threads;
  exp["suite"] = {{"count", c.suite_count}, {"seed", c.suite_seed}};
  exp["logistic_instances"] = c.logistic_instances;
  Json j;
  j["experiment"] = exp;
  j["solver"] = to_json(c.solver);
  j["oracle"] = to_json(c.oracle);
  j["noise"] = {{"kind", to_string(c.noise_kind)}};
  j["logistic"] = to_json(c.logistic);
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig c) {
  check_keys(j, {"experiment", "solver", "oracle", "noise", "logistic"}, "config");
  if (j.contains("solver")) c.solver = solver_config_from_json(j.at("solver"), c.solver);
  if (j.contains("oracle")) c.oracle = oracle_config_from_json(j.at("oracle"), c.oracle);
  if (j.contains("logistic")) c.logistic = logistic_config_from_json(j.at("logistic"), c.logistic);
  if (j.contains("noise")) {
    NoiseModel n;
    n.kind = c.noise_kind;
    n = noise_model_from_json(j.at("noise"), n);
    c.noise_kind = n.kind;
    if (j.at("noise").contains("sigma2")) c.noise_levels = {n.sigma2};
  }
  if (j.contains("experiment")) {
    const Json& e = j.at("experiment");
    const std::string w = "experiment";
    check_keys(e, {"experiment", "noise_levels", "methods", "runs_per_instance", "seed", "threads", "suite",
                   "logistic_instances"},
               w);
    try {
      if (e.contains("experiment")) {
        ExperimentKind kind = parse_experiment_kind(e.at("experiment").get<std::string>());
        if (kind != c.experiment) throw ConfigError("config names experiment '" + to_string(kind) +
                                                    "' but '" + to_string(c.experiment) + "' was requested");
      }
      if (e.contains("noise_levels")) c.noise_levels = e.at("noise_levels").get<std::vector<double>>();
      if (e.contains("methods")) {
        c.methods.clear();
        for (const Json& m : e.at("methods")) {
          check_keys(m, {"algorithm", "hessian", "schedule"}, "experiment.methods[]");
          MethodSpec spec;
          if (m.contains("algorithm")) spec.algorithm = parse_algorithm(m.at("algorithm").get<std::string>());
          if (m.contains("hessian")) spec.hessian = parse_hessian_kind(m.at("hessian").get<std::string>());
          if (m.contains("schedule")) spec.schedule = BarrierSchedule::parse(m.at("schedule").get<std::string>());
          c.methods.push_back(spec);
        }
      }
      if (e.contains("runs_per_instance")) c.runs_per_instance = e.at("runs_per_instance").get<int>();
      if (e.contains("seed")) c.seed = e.at("seed").get<std::uint64_t>();
      if (e.contains("threads")) c.threads = e.at("threads").get<int>();
      if (e.contains("suite")) {
        const Json& s = e.at("suite");
        check_keys(s, {"count", "seed"}, "experiment.suite");
        if (s.contains("count")) c.suite_count = s.at("count").get<int>();
        if (s.contains("seed")) c.suite_seed = s.at("seed").get<std::uint64_t>();
      }
      if (e.contains("logistic_instances")) c.logistic_instances = e.at("logistic_instances").get<int>();
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("experiment section has a field of the wrong type: ") + ex.what());
    }
  }
  return c;
}

std::size_t ResultTable::failed_runs() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return is_failure(r.status); }));
}

std::uint64_t run_seed(std::uint64_t master, int instance, int run) {
  return hash_key({master, static_cast<std::uint64_t>(instance), static_cast<std::uint64_t>(run)});
}

std::vector<ProblemInstance> experiment_problems(const ExperimentConfig& config) {
  if (config.experiment != ExperimentKind::logistic) {
    return make_analytic_suite(config.suite_count, config.suite_seed);
  }
  std::vector<ProblemInstance> out;
  std::optional<Dataset> data;
  if (config.logistic.dataset == LogisticDataset::csv_file) {
    data = load_csv_dataset(config.logistic.csv_path, config.logistic.label_column);
  } else {
    data = generate_synthetic_dataset(config.logistic.dataset, config.logistic.d, config.logistic.N,
                                      hash_key({config.seed, kProblemSalt}));
  }
  for (int i = 0; i < config.logistic_instances; ++i) {
    LogisticProblemConfig lc = config.logistic;
    lc.seed = hash_key({config.seed, kProblemSalt, static_cast<std::uint64_t>(i)});
    ProblemInstance p = make_logistic_problem(*data, lc);
    p.name = "logistic-" + to_string(config.logistic.dataset) + "#" + std::to_string(i);
    out.push_back(std::move(p));
  }
  return out;
}

RunTrace run_method(const ProblemInstance& problem, const MethodSpec& method, const SolverConfig& solver,
                    const OracleConfig& oracle, NoiseModel noise, std::uint64_t seed) {
  SolverConfig s = solver;
  s.hessian = method.hessian;
  if (method.schedule) s.schedule = *method.schedule;
  RunTrace trace = method.algorithm == Algorithm::adaptive ? solve(problem, noise, s, oracle, seed)
                                                           : solve_fully_stochastic(problem, noise, s, oracle, seed);
  trace.method = method.id();
  return trace;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, experiment_problems(config));
}

ResultTable run_experiment(const ExperimentConfig& config, const std::vector<ProblemInstance>& problems) {
  config.validate();
  struct Job {
    int instance, method, noise, run;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < static_cast<int>(problems.size()); ++i) {
    for (int m = 0; m < static_cast<int>(config.methods.size()); ++m) {
      for (int n = 0; n < static_cast<int>(config.noise_levels.size()); ++n) {
        for (int r = 0; r < config.runs_per_instance; ++r) jobs.push_back({i, m, n, r});
      }
    }
  }
  ResultTable table;
  table.rows.resize(jobs.size());
  auto work = [&](std::size_t idx) {
    const Job& job = jobs[idx];
    const ProblemInstance& p = problems[job.instance];
    const MethodSpec& method = config.methods[job.method];
    NoiseModel noise;
    noise.kind = config.noise_kind;
    noise.sigma2 = config.noise_levels[job.noise];
    ResultRow row;
    row.problem = p.name;
    row.instance = job.instance;
    row.method = method.id();
    row.noise = noise.sigma2;
    row.run = job.run;
    row.seed = run_seed(config.seed, job.instance, job.run);
    row.budget_kind = config.solver.budget.kind;
    RunTrace trace = run_method(p, method, config.solver, config.oracle, noise, row.seed);
    row.status = trace.status;
    row.final_rel_kkt = trace.final_rel_kkt;
    row.iterations = trace.iterations();
    row.budget_used = trace.budget_used;
    table.rows[idx] = std::move(row);
  };
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : static_cast<unsigned>(config.threads);
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
    return table;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return table;
}

namespace {

const char* kResultColumns =
    "problem,instance,method,noise,run,seed,status,final_rel_kkt,iterations,budget_kind,budget_used";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw CsvParseError("line " + std::to_string(line) + ": '" + s + "' is not a number");
}

std::int64_t to_int(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw CsvParseError("line " + std::to_string(line) + ": '" + s + "' is not an integer");
}

std::uint64_t to_uint(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used == s.size() && !s.empty() && s[0] != '-') return v;
  } catch (const std::logic_error&) {
  }
  throw CsvParseError("line " + std::to_string(line) + ": '" + s + "' is not a seed");
}

}  // namespace

void write_results_csv(const ResultTable& table, std::ostream& out) {
  out << kResultsCsvHeader << '\n' << kResultColumns << '\n';
  for (const ResultRow& r : table.rows) {
    out << r.problem << ',' << r.instance << ',' << r.method << ',' << format(r.noise) << ',' << r.run << ','
        << r.seed << ',' << to_string(r.status) << ',' << format(r.final_rel_kkt) << ',' << r.iterations << ','
        << to_string(r.budget_kind) << ',' << format(r.budget_used) << '\n';
  }
}

ResultTable read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader) {
    throw CsvParseError("line 1: expected version line '" + std::string(kResultsCsvHeader) + "'");
  }
  if (!std::getline(in, line) || line != kResultColumns) {
    throw CsvParseError("line 2: unexpected column header");
  }
  ResultTable table;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != 11) {
      throw CsvParseError("line " + std::to_string(lineno) + ": expected 11 fields, found " +
                          std::to_string(f.size()));
    }
    ResultRow r;
    r.problem = f[0];
    r.instance = static_cast<int>(to_int(f[1], lineno));
    r.method = f[2];
    r.noise = to_double(f[3], lineno);
    r.run = static_cast<int>(to_int(f[4], lineno));
    r.seed = to_uint(f[5], lineno);
    try {
      r.status = parse_run_status(f[6]);
      r.budget_kind = parse_budget_kind(f[9]);
    } catch (const Error& e) {
      throw CsvParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    r.final_rel_kkt = to_double(f[7], lineno);
    r.iterations = to_int(f[8], lineno);
    r.budget_used = to_double(f[10], lineno);
    table.rows.push_back(std::move(r));
  }
  if (table.rows.empty()) throw EmptyDatasetError("results table has no rows");
  return table;
}

namespace {

template <typename F>
void for_each_group(const ResultTable& table, F f) {
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : table.rows) {
    auto key = std::make_pair(r.method, r.noise);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  for (const auto& key : order) f(key.first, key.second, groups.at(key));
}

}  // namespace

std::vector<ProfileCurve> performance_profile(const ResultTable& table, const std::vector<double>& budgets) {
  std::vector<ProfileCurve> out;
  for_each_group(table, [&](const std::string& method, double noise, const std::vector<const ResultRow*>& rows) {
    ProfileCurve curve;
    curve.method = method;
    curve.noise = noise;
    curve.budgets = budgets;
    for (double b : budgets) {
      std::size_t solved = 0;
      for (const ResultRow* r : rows) solved += (r->solved() && r->budget_used <= b) ? 1 : 0;
      curve.fraction.push_back(static_cast<double>(solved) / static_cast<double>(rows.size()));
    }
    out.push_back(std::move(curve));
  });
  return out;
}

std::vector<double> default_budget_grid(const ResultTable& table, int points) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const ResultRow& r : table.rows) {
    if (r.budget_used > 0.0) {
      lo = std::min(lo, r.budget_used);
      hi = std::max(hi, r.budget_used);
    }
  }
  if (!(hi > 0.0)) return {0.0};
  if (lo == hi || points < 2) return {hi};
  std::vector<double> grid;
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < points; ++i) grid.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

void write_profile_csv(const std::vector<ProfileCurve>& curves, std::ostream& out) {
  out << kProfileCsvHeader << '\n' << "method,noise,budget,fraction\n";
  for (const ProfileCurve& c : curves) {
    for (std::size_t i = 0; i < c.budgets.size(); ++i) {
      out << c.method << ',' << format(c.noise) << ',' << format(c.budgets[i]) << ',' << format(c.fraction[i])
          << '\n';
    }
  }
}

double quantile_sorted(const std::vector<double>& x, double p) {
  if (x.empty()) throw Error("quantile of an empty sample");
  double h = (static_cast<double>(x.size()) - 1.0) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= x.size()) return x.back();
  return x[lo] + (h - static_cast<double>(lo)) * (x[lo + 1] - x[lo]);
}

std::vector<BoxStats> residual_summary(const ResultTable& table) {
  std::vector<BoxStats> out;
  for_each_group(table, [&](const std::string& method, double noise, const std::vector<const ResultRow*>& rows) {
    std::vector<double> v;
    for (const ResultRow* r : rows) v.push_back(r->final_rel_kkt);
    std::sort(v.begin(), v.end());
    BoxStats b;
    b.method = method;
    b.noise = noise;
    b.count = v.size();
    b.min = v.front();
    b.q1 = quantile_sorted(v, 0.25);
    b.median = quantile_sorted(v, 0.5);
    b.q3 = quantile_sorted(v, 0.75);
    b.max = v.back();
    out.push_back(b);
  });
  return out;
}

void write_boxes_csv(const std::vector<BoxStats>& boxes, std::ostream& out) {
  out << kBoxesCsvHeader << '\n' << "method,noise,count,min,q1,median,q3,max\n";
  for (const BoxStats& b : boxes) {
    out << b.method << ',' << format(b.noise) << ',' << b.count << ',' << format(b.min) << ',' << format(b.q1)
        << ',' << format(b.median) << ',' << format(b.q3) << ',' << format(b.max) << '\n';
  }
}

}  // namespace tripssqp
