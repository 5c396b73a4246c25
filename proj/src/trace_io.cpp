#include "tripssqp/trace_io.hpp"

#include <cstdio>
#include <functional>
#include <ostream>
#include <variant>
#include <vector>

namespace tripssqp {

namespace {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Column {
  const char* name;
  std::function<Cell(const IterationRecord&)> get;
};

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = {
      {"k", [](const IterationRecord& r) { return Cell(r.k); }},
      {"theta", [](const IterationRecord& r) { return Cell(r.theta); }},
      {"Delta", [](const IterationRecord& r) { return Cell(r.delta); }},
      {"eps_bar", [](const IterationRecord& r) { return Cell(r.eps_bar); }},
      {"mu_bar", [](const IterationRecord& r) { return Cell(r.mu_bar); }},
      {"batch_g", [](const IterationRecord& r) { return Cell(std::int64_t{r.batch_g}); }},
      {"batch_f", [](const IterationRecord& r) { return Cell(std::int64_t{r.batch_f}); }},
      {"batch_h", [](const IterationRecord& r) { return Cell(std::int64_t{r.batch_h}); }},
      {"norm_Q_bar", [](const IterationRecord& r) { return Cell(r.norm_q_bar); }},
      {"norm_Q_true", [](const IterationRecord& r) { return Cell(r.norm_q_true); }},
      {"rel_kkt", [](const IterationRecord& r) { return Cell(r.rel_kkt); }},
      {"classification", [](const IterationRecord& r) { return Cell(to_string(r.classification)); }},
      {"hessian_norm", [](const IterationRecord& r) { return Cell(r.hessian_norm); }},
      {"W_norm", [](const IterationRecord& r) { return Cell(r.w_norm); }},
      {"step_norm", [](const IterationRecord& r) { return Cell(r.step_norm); }},
      {"flops", [](const IterationRecord& r) { return Cell(r.flops); }},
      {"charge", [](const IterationRecord& r) { return Cell(r.charge); }},
      {"gamma_bar", [](const IterationRecord& r) { return Cell(r.gamma_bar); }},
      {"pred", [](const IterationRecord& r) { return Cell(r.pred); }},
      {"pred_threshold", [](const IterationRecord& r) { return Cell(r.pred_threshold); }},
      {"merit_turns", [](const IterationRecord& r) { return Cell(std::int64_t{r.merit_turns}); }},
      {"ared", [](const IterationRecord& r) { return Cell(r.ared); }},
      {"residual_norm", [](const IterationRecord& r) { return Cell(r.residual_norm); }},
      {"linearized_residual", [](const IterationRecord& r) { return Cell(r.linearized_residual); }},
      {"tangential_decrease", [](const IterationRecord& r) { return Cell(r.tangential_decrease); }},
      {"cauchy_decrease", [](const IterationRecord& r) { return Cell(r.cauchy_decrease); }},
      {"min_slack_ratio", [](const IterationRecord& r) { return Cell(r.min_slack_ratio); }},
      {"used_cauchy", [](const IterationRecord& r) { return Cell(std::int64_t{r.used_cauchy ? 1 : 0}); }},
  };
  return cols;
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

Json trace_to_json(const RunTrace& trace, const Json& config_echo) {
  Json j;
  j["schema"] = kTraceJsonSchema;
  j["problem"] = trace.problem;
  j["method"] = trace.method;
  j["config"] = config_echo;
  j["status"] = to_string(trace.status);
  j["message"] = trace.message;
  j["totals"] = {{"iterations", trace.iterations()},
                 {"gradient_samples", trace.gradient_samples},
                 {"value_samples", trace.value_samples},
                 {"hessian_samples", trace.hessian_samples},
                 {"flops", trace.flops},
                 {"budget_kind", to_string(trace.budget_kind)},
                 {"budget_used", trace.budget_used},
                 {"ref_scale", trace.ref_scale},
                 {"initial_rel_kkt", trace.initial_rel_kkt},
                 {"final_rel_kkt", trace.final_rel_kkt}};
  const SolverState& s = trace.final_state;
  j["final"] = {{"x", vector_json(s.x)}, {"s", vector_json(s.s)}, {"Delta", s.delta},
                {"eps_bar", s.eps_bar}, {"mu_bar", s.mu_bar},     {"theta", s.theta},
                {"k", s.k}};
  Json its = Json::object();
  for (const Column& col : columns()) {
    Json arr = Json::array();
    for (const IterationRecord& r : trace.records) {
      std::visit([&arr](const auto& v) { arr.push_back(v); }, col.get(r));
    }
    its[col.name] = std::move(arr);
  }
  j["iterations"] = std::move(its);
  return j;
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << kTraceCsvHeader << '\n';
  const auto& cols = columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c].name;
  out << '\n';
  for (const IterationRecord& r : trace.records) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      Cell cell = cols[c].get(r);
      if (auto* d = std::get_if<double>(&cell)) {
        out << format(*d);
      } else if (auto* i = std::get_if<std::int64_t>(&cell)) {
        out << *i;
      } else {
        out << std::get<std::string>(cell);
      }
    }
    out << '\n';
  }
}

}  // namespace tripssqp
