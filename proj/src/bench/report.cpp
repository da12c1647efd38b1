#include "safe/bench/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "safe/core/error.hpp"
#include "safe/pipeline/trace_io.hpp"

namespace safe::bench {

using nlohmann::json;

RunReport report(std::span<const pipeline::PipelineOutcome> outcomes, std::span<const DatasetRecord> dataset,
                 const PipelineConfig& config, Grader grader, const backend::TextGenerator* judge) {
  std::map<std::string, const DatasetRecord*> by_id;
  for (const auto& r : dataset) by_id.emplace(r.id, &r);
  std::set<std::string> seen;
  for (const auto& o : outcomes) {
    if (!by_id.contains(o.trace.query_id)) throw Error("outcome for unknown record id '" + o.trace.query_id + "'");
    if (!seen.insert(o.trace.query_id).second) throw Error("duplicate outcome for id '" + o.trace.query_id + "'");
  }
  if (seen.size() != by_id.size()) throw Error("outcomes do not cover every dataset record");

  RunReport rep;
  rep.grader = std::string(to_string(grader));
  rep.config_snapshot = config;
  std::size_t correct = 0;
  double drop = 0.0;
  for (const auto& o : outcomes) {
    QueryResult q;
    q.id = o.trace.query_id;
    q.status = o.status;
    q.baseline_entropy = o.baseline_entropy;
    q.final_entropy = o.final_entropy;
    q.enrichments_applied = o.enrichments_applied;
    q.final_answer = o.trace.final_answer;
    if (o.status == pipeline::OutcomeStatus::failed) {
      ++rep.failed_queries;
    } else {
      q.correct = grade(o.trace.final_answer, *by_id.at(q.id), grader, judge);
    }
    rep.per_query.push_back(std::move(q));
  }
  std::sort(rep.per_query.begin(), rep.per_query.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  // Summed in id order so the result does not depend on input order.
  for (const auto& q : rep.per_query) {
    if (q.correct) ++correct;
    drop += q.baseline_entropy - q.final_entropy;
  }
  const auto n = static_cast<double>(rep.per_query.size());
  rep.accuracy = rep.per_query.empty() ? 0.0 : static_cast<double>(correct) / n;
  rep.mean_entropy_drop = rep.per_query.empty() ? 0.0 : drop / n;
  return rep;
}

json to_json(const RunReport& r) {
  json per_query = json::array();
  for (const auto& q : r.per_query) {
    per_query.push_back(json{{"id", q.id},
                             {"correct", q.correct},
                             {"baseline_entropy", q.baseline_entropy},
                             {"final_entropy", q.final_entropy},
                             {"status", pipeline::to_string(q.status)},
                             {"enrichments_applied", q.enrichments_applied},
                             {"final_answer", q.final_answer}});
  }
  return json{{"accuracy", r.accuracy},
              {"mean_entropy_drop", r.mean_entropy_drop},
              {"failed_queries", r.failed_queries},
              {"grader", r.grader},
              {"config", pipeline::to_json(r.config_snapshot)},
              {"per_query", per_query}};
}

RunReport report_from_json(const json& j) {
  RunReport r;
  try {
    r.accuracy = j.at("accuracy").get<double>();
    r.mean_entropy_drop = j.at("mean_entropy_drop").get<double>();
    r.failed_queries = j.at("failed_queries").get<std::size_t>();
    r.grader = j.at("grader").get<std::string>();
    r.config_snapshot = pipeline::config_from_json(j.at("config"));
    for (const auto& q : j.at("per_query")) {
      QueryResult res;
      res.id = q.at("id").get<std::string>();
      res.correct = q.at("correct").get<bool>();
      res.baseline_entropy = q.at("baseline_entropy").get<double>();
      res.final_entropy = q.at("final_entropy").get<double>();
      res.status = pipeline::parse_outcome_status(q.at("status").get<std::string>());
      res.enrichments_applied = q.at("enrichments_applied").get<int>();
      res.final_answer = q.at("final_answer").get<std::string>();
      r.per_query.push_back(std::move(res));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad report: ") + e.what());
  }
  return r;
}

void write_report(const std::filesystem::path& path, const RunReport& r) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write report " + path.string());
  out << to_json(r).dump(2) << '\n';
}

RunReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open report " + path.string());
  try {
    return report_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad report: ") + e.what());
  }
}

BenchRun run_benchmark(std::span<const DatasetRecord> dataset, const PipelineConfig& config,
                       const pipeline::Backends& backends, Grader grader, std::size_t workers,
                       const backend::TextGenerator* judge) {
  const auto queries = to_queries(dataset);
  BenchRun run;
  run.outcomes = pipeline::run_queries(queries, config, backends, workers);
  run.report = report(run.outcomes, dataset, config, grader, judge);
  return run;
}

}  // namespace safe::bench
