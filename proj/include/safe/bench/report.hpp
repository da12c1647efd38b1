#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "safe/bench/dataset.hpp"
#include "safe/bench/grade.hpp"
#include "safe/pipeline/pipeline.hpp"

namespace safe::bench {

struct QueryResult {
  std::string id;
  bool correct = false;
  double baseline_entropy = 0.0;
  double final_entropy = 0.0;
  pipeline::OutcomeStatus status = pipeline::OutcomeStatus::not_flagged;
  int enrichments_applied = 0;
  std::string final_answer;

  bool operator==(const QueryResult&) const = default;
};

struct RunReport {
  std::vector<QueryResult> per_query;  // sorted by id
  double accuracy = 0.0;
  // Mean of baseline_entropy - final_entropy over all queries.
  double mean_entropy_drop = 0.0;
  std::size_t failed_queries = 0;
  std::string grader;
  PipelineConfig config_snapshot;

  bool operator==(const RunReport&) const = default;
};

// Grades every outcome against its record. Throws Error when the outcome ids
// and dataset ids are not the same set. Failed queries count as incorrect.
RunReport report(std::span<const pipeline::PipelineOutcome> outcomes, std::span<const DatasetRecord> dataset,
                 const PipelineConfig& config, Grader grader, const backend::TextGenerator* judge = nullptr);

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);
void write_report(const std::filesystem::path& path, const RunReport& r);
RunReport read_report(const std::filesystem::path& path);

struct BenchRun {
  std::vector<pipeline::PipelineOutcome> outcomes;
  RunReport report;
};

BenchRun run_benchmark(std::span<const DatasetRecord> dataset, const PipelineConfig& config,
                       const pipeline::Backends& backends, Grader grader, std::size_t workers,
                       const backend::TextGenerator* judge = nullptr);

}  // namespace safe::bench
