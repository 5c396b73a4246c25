#include "tripssqp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

#include "tripssqp/errors.hpp"

namespace tripssqp {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

void read_string(const Json& j, const char* key, std::string& out, const std::string& where) {
  read(j, key, out, where);
}

// JSON has no infinity; null stands for an unlimited budget.
double read_limit(const Json& value, const std::string& where) {
  if (value.is_null()) return std::numeric_limits<double>::infinity();
  if (!value.is_number()) throw ConfigError(where + " must be a number or null");
  return value.get<double>();
}

Json limit_json(double limit) { return std::isfinite(limit) ? Json(limit) : Json(nullptr); }

}  // namespace

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

std::string to_string(NoiseKind kind) { return kind == NoiseKind::gaussian ? "gaussian" : "subsample"; }

NoiseKind parse_noise_kind(const std::string& text) {
  std::string t = lower(text);
  if (t == "gaussian") return NoiseKind::gaussian;
  if (t == "subsample") return NoiseKind::subsample;
  throw ConfigError("unknown noise kind '" + text + "'");
}

std::string to_string(LogisticDataset kind) {
  switch (kind) {
    case LogisticDataset::normal_synthetic: return "normal-synthetic";
    case LogisticDataset::exponential_synthetic: return "exponential-synthetic";
    case LogisticDataset::csv_file: return "csv";
  }
  return "normal-synthetic";
}

LogisticDataset parse_logistic_dataset(const std::string& text) {
  std::string t = lower(text);
  if (t == "normal-synthetic") return LogisticDataset::normal_synthetic;
  if (t == "exponential-synthetic") return LogisticDataset::exponential_synthetic;
  if (t == "csv") return LogisticDataset::csv_file;
  throw ConfigError("unknown logistic dataset '" + text + "'");
}

Json to_json(const SolverConfig& c) {
  Json j;
  j["eta"] = c.eta;
  j["zeta"] = c.zeta;
  j["eps_s"] = c.eps_s;
  j["kappa_fcd"] = c.kappa_fcd;
  j["Delta_max"] = c.delta_max;
  j["rho"] = c.rho;
  j["gamma"] = c.gamma;
  j["Delta_0"] = c.delta_0;
  j["eps_bar_0"] = c.eps_bar_0;
  j["mu_bar_0"] = c.mu_bar_0;
  j["mu_cap"] = c.mu_cap;
  j["s_min"] = c.s_min;
  j["tol_rel_kkt"] = c.tol_rel_kkt;
  j["max_iters"] = c.max_iters;
  j["barrier_schedule"] = c.schedule.to_string();
  j["budget"] = {{"kind", to_string(c.budget.kind)}, {"limit", limit_json(c.budget.limit)}};
  j["hessian"] = to_string(c.hessian);
  j["baseline"] = {{"zeta", c.fs_zeta},     {"delta", c.fs_delta}, {"beta", c.fs_beta},
                   {"mu_0", c.fs_mu_0},     {"rho", c.fs_rho},     {"batch", c.fs_batch},
                   {"threshold", to_string(c.fs_threshold)}};
  return j;
}

SolverConfig solver_config_from_json(const Json& j, SolverConfig c) {
  const std::string where = "solver";
  check_keys(j, {"eta", "zeta", "eps_s", "kappa_fcd", "Delta_max", "rho", "gamma", "Delta_0", "eps_bar_0", "mu_bar_0",
                 "mu_cap", "s_min", "tol_rel_kkt", "max_iters", "barrier_schedule", "budget", "hessian", "baseline"},
             where);
  read(j, "eta", c.eta, where);
  read(j, "zeta", c.zeta, where);
  read(j, "eps_s", c.eps_s, where);
  read(j, "kappa_fcd", c.kappa_fcd, where);
  read(j, "Delta_max", c.delta_max, where);
  read(j, "rho", c.rho, where);
  read(j, "gamma", c.gamma, where);
  read(j, "Delta_0", c.delta_0, where);
  read(j, "eps_bar_0", c.eps_bar_0, where);
  read(j, "mu_bar_0", c.mu_bar_0, where);
  read(j, "mu_cap", c.mu_cap, where);
  read(j, "s_min", c.s_min, where);
  read(j, "tol_rel_kkt", c.tol_rel_kkt, where);
  read(j, "max_iters", c.max_iters, where);
  if (j.contains("barrier_schedule")) {
    std::string text;
    read_string(j, "barrier_schedule", text, where);
    c.schedule = BarrierSchedule::parse(text);
  }
  if (j.contains("budget")) {
    const Json& b = j.at("budget");
    check_keys(b, {"kind", "limit"}, "solver.budget");
    if (b.contains("kind")) {
      std::string kind;
      read_string(b, "kind", kind, "solver.budget");
      c.budget.kind = parse_budget_kind(kind);
    }
    if (b.contains("limit")) c.budget.limit = read_limit(b.at("limit"), "solver.budget.limit");
  }
  if (j.contains("hessian")) {
    std::string kind;
    read_string(j, "hessian", kind, where);
    c.hessian = parse_hessian_kind(kind);
  }
  if (j.contains("baseline")) {
    const Json& b = j.at("baseline");
    const std::string w = "solver.baseline";
    check_keys(b, {"zeta", "delta", "beta", "mu_0", "rho", "batch", "threshold"}, w);
    read(b, "zeta", c.fs_zeta, w);
    read(b, "delta", c.fs_delta, w);
    read(b, "beta", c.fs_beta, w);
    read(b, "mu_0", c.fs_mu_0, w);
    read(b, "rho", c.fs_rho, w);
    read(b, "batch", c.fs_batch, w);
    if (b.contains("threshold")) {
      std::string mode;
      read_string(b, "threshold", mode, w);
      c.fs_threshold = parse_baseline_threshold(mode);
    }
  }
  return c;
}

Json to_json(const OracleConfig& c) {
  Json j;
  j["kappa_g"] = c.kappa_g;
  j["kappa_f"] = c.kappa_f;
  j["p_g"] = c.p_g;
  j["p_f"] = c.p_f;
  j["C_g"] = c.C_g;
  j["C_f"] = c.C_f;
  j["max_batch"] = c.max_batch;
  return j;
}

OracleConfig oracle_config_from_json(const Json& j, OracleConfig c) {
  const std::string where = "oracle";
  check_keys(j, {"kappa_g", "kappa_f", "p_g", "p_f", "C_g", "C_f", "max_batch"}, where);
  read(j, "kappa_g", c.kappa_g, where);
  read(j, "kappa_f", c.kappa_f, where);
  read(j, "p_g", c.p_g, where);
  read(j, "p_f", c.p_f, where);
  read(j, "C_g", c.C_g, where);
  read(j, "C_f", c.C_f, where);
  read(j, "max_batch", c.max_batch, where);
  return c;
}

Json to_json(const NoiseModel& n) {
  Json j;
  j["kind"] = to_string(n.kind);
  j["sigma2"] = n.sigma2;
  return j;
}

NoiseModel noise_model_from_json(const Json& j, NoiseModel n) {
  const std::string where = "noise";
  check_keys(j, {"kind", "sigma2"}, where);
  if (j.contains("kind")) {
    std::string kind;
    read_string(j, "kind", kind, where);
    n.kind = parse_noise_kind(kind);
  }
  read(j, "sigma2", n.sigma2, where);
  if (!(n.sigma2 >= 0.0) || !std::isfinite(n.sigma2)) throw ConfigError("noise.sigma2 must be finite and >= 0");
  return n;
}

Json to_json(const LogisticProblemConfig& c) {
  Json j;
  j["dataset"] = to_string(c.dataset);
  j["d"] = c.d;
  j["N"] = c.N;
  j["seed"] = c.seed;
  j["csv_path"] = c.csv_path;
  j["label_column"] = c.label_column;
  return j;
}

LogisticProblemConfig logistic_config_from_json(const Json& j, LogisticProblemConfig c) {
  const std::string where = "logistic";
  check_keys(j, {"dataset", "d", "N", "seed", "csv_path", "label_column"}, where);
  if (j.contains("dataset")) {
    std::string kind;
    read_string(j, "dataset", kind, where);
    c.dataset = parse_logistic_dataset(kind);
  }
  read(j, "d", c.d, where);
  read(j, "N", c.N, where);
  read(j, "seed", c.seed, where);
  read_string(j, "csv_path", c.csv_path, where);
  read_string(j, "label_column", c.label_column, where);
  if (j.contains("csv_path") && !j.contains("dataset")) c.dataset = LogisticDataset::csv_file;
  if (c.dataset == LogisticDataset::csv_file && c.csv_path.empty())
    throw ConfigError("logistic.dataset 'csv' needs logistic.csv_path");
  if (c.dataset != LogisticDataset::csv_file && !c.csv_path.empty())
    throw ConfigError("logistic.csv_path is only used with dataset 'csv'");
  if (c.N < 1) throw ConfigError("logistic.N must be positive");
  return c;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace tripssqp
