#include "lemmings/report.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace lemmings {

using nlohmann::json;

namespace {

json summary_json(const MetricSummary& s) { return json{{"mean", s.mean}, {"std", s.stddev}}; }

json spec_json(const SolverSpec& spec) {
  json j{{"solver", to_string(spec.solver)},
         {"mode", to_string(spec.mode)},
         {"lambda", spec.lambda},
         {"scaled", spec.scale}};
  if (spec.iterations) j["iterations"] = *spec.iterations;
  if (spec.solver == SolverKind::kLocal) {
    j["anchors"] = spec.anchors;
    j["sigma"] = spec.sigma;
    j["anchor_method"] = to_string(spec.anchor_method);
  }
  return j;
}

std::string num(const json& v) { return v.dump(); }

}  // namespace

json report_to_json(const EvalReport& report, bool with_timing) {
  json folds = json::array();
  for (const FoldResult& f : report.fold_results) {
    json j{{"run", f.run},
           {"fold", f.fold},
           {"test_bags", f.test_bags},
           {"correct", f.correct},
           {"accuracy", f.accuracy},
           {"auc_roc", f.auc_roc ? json(*f.auc_roc) : json(nullptr)},
           {"threshold", f.threshold},
           {"lambda", f.lambda},
           {"iterations", f.iterations}};
    if (report.spec.solver == SolverKind::kLocal) {
      j["anchors"] = f.anchors;
      j["sigma"] = f.sigma;
    }
    if (with_timing) j["seconds"] = f.seconds;
    folds.push_back(std::move(j));
  }
  json runs = json::array();
  for (std::size_t r = 0; r < report.run_results.size(); ++r) {
    const RunResult& rr = report.run_results[r];
    json j{{"run", r},
           {"accuracy", rr.accuracy},
           {"auc_roc", rr.auc_roc},
           {"auc_roc_01", rr.auc_roc_01},
           {"auc_pr", rr.auc_pr}};
    if (with_timing) j["seconds"] = rr.seconds;
    runs.push_back(std::move(j));
  }
  return json{{"protocol", report.protocol},
              {"spec", spec_json(report.spec)},
              {"folds", report.folds},
              {"runs", report.runs},
              {"seed", report.seed},
              {"stratified", report.stratified},
              {"tuned", report.tuned},
              {"models_trained", report.models_trained},
              {"summary",
               {{"accuracy", summary_json(report.accuracy)},
                {"auc_roc", summary_json(report.auc_roc)},
                {"auc_roc_01", summary_json(report.auc_roc_01)},
                {"auc_pr", summary_json(report.auc_pr)}}},
              {"run_results", std::move(runs)},
              {"fold_results", std::move(folds)}};
}

std::string render_report(const json& report) {
  std::ostringstream out;
  const json& spec = report.at("spec");
  out << "protocol " << report.at("protocol").get<std::string>() << ", folds "
      << num(report.at("folds")) << ", runs " << num(report.at("runs")) << ", seed "
      << num(report.at("seed")) << (report.at("tuned").get<bool>() ? ", tuned" : "") << '\n';
  out << "solver " << spec.at("solver").get<std::string>() << ", mode "
      << spec.at("mode").get<std::string>() << ", lambda " << num(spec.at("lambda"));
  if (spec.contains("anchors")) {
    out << ", anchors " << num(spec.at("anchors")) << ", sigma " << num(spec.at("sigma"))
        << ", anchor_method " << spec.at("anchor_method").get<std::string>();
  }
  out << ", scaled " << (spec.at("scaled").get<bool>() ? "yes" : "no") << '\n';

  out << "\nmetric\tmean\tstd\n";
  for (const char* name : {"accuracy", "auc_roc", "auc_roc_01", "auc_pr"}) {
    const json& s = report.at("summary").at(name);
    out << name << '\t' << num(s.at("mean")) << '\t' << num(s.at("std")) << '\n';
  }

  const json& runs = report.at("run_results");
  const bool timed = !runs.empty() && runs.front().contains("seconds");
  out << "\nrun\taccuracy\tauc_roc\tauc_roc_01\tauc_pr" << (timed ? "\tseconds" : "") << '\n';
  for (const json& r : runs) {
    out << num(r.at("run")) << '\t' << num(r.at("accuracy")) << '\t' << num(r.at("auc_roc"))
        << '\t' << num(r.at("auc_roc_01")) << '\t' << num(r.at("auc_pr"));
    if (timed) out << '\t' << num(r.at("seconds"));
    out << '\n';
  }
  return out.str();
}

}  // namespace lemmings
