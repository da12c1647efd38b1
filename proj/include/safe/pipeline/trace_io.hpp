#pragma once

#include <filesystem>
#include <span>

#include "json.hpp"

#include "safe/pipeline/pipeline.hpp"

namespace safe::pipeline {

nlohmann::json to_json(const EntropyReport& r);
nlohmann::json to_json(const EnrichmentDirective& d);
nlohmann::json to_json(const PipelineTrace& t);
nlohmann::json to_json(const PipelineOutcome& o);
nlohmann::json to_json(const PipelineConfig& c);

PipelineTrace trace_from_json(const nlohmann::json& j);
PipelineOutcome outcome_from_json(const nlohmann::json& j);
PipelineConfig config_from_json(const nlohmann::json& j);

// One outcome per line, sorted by query id.
void write_trace_jsonl(const std::filesystem::path& path, std::span<const PipelineOutcome> outcomes);
std::vector<PipelineOutcome> read_trace_jsonl(const std::filesystem::path& path);

}  // namespace safe::pipeline
