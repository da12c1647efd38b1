#include "safe/pipeline/trace_io.hpp"

#include <algorithm>
#include <fstream>

#include "safe/core/config.hpp"
#include "safe/core/error.hpp"

namespace safe::pipeline {

using nlohmann::json;

json to_json(const EntropyReport& r) {
  return json{{"cluster_sizes", r.cluster_sizes},
              {"probabilities", r.probabilities},
              {"entropy", r.entropy},
              {"flagged", r.flagged}};
}

json to_json(const EnrichmentDirective& d) {
  return json{{"avoid", d.avoid},
              {"emphasize", d.emphasize},
              {"rendered_suffix", d.rendered_suffix},
              {"enriched_query", d.enriched_query}};
}

namespace {

json to_json(const ScoredFeature& s) {
  json j{{"index", s.entry.feature_index},
         {"description", s.entry.description},
         {"cos_dp", s.cos_dp},
         {"is_outlier", s.is_outlier},
         {"placeholder", s.entry.placeholder}};
  j["density"] = s.entry.reference_density ? json(*s.entry.reference_density) : json(nullptr);
  return j;
}

ScoredFeature scored_from_json(const json& j) {
  ScoredFeature s;
  s.entry.feature_index = j.at("index").get<int>();
  s.entry.description = j.at("description").get<std::string>();
  if (!j.at("density").is_null()) s.entry.reference_density = j["density"].get<double>();
  s.entry.placeholder = j.value("placeholder", false);
  s.cos_dp = j.at("cos_dp").get<double>();
  s.is_outlier = j.at("is_outlier").get<bool>();
  return s;
}

EntropyReport entropy_from_json(const json& j) {
  EntropyReport r;
  r.cluster_sizes = j.at("cluster_sizes").get<std::vector<int>>();
  r.probabilities = j.at("probabilities").get<std::vector<double>>();
  r.entropy = j.at("entropy").get<double>();
  r.flagged = j.at("flagged").get<bool>();
  return r;
}

EnrichmentDirective directive_from_json(const json& j) {
  EnrichmentDirective d;
  d.avoid = j.at("avoid").get<std::vector<std::string>>();
  d.emphasize = j.at("emphasize").get<std::vector<std::string>>();
  d.rendered_suffix = j.at("rendered_suffix").get<std::string>();
  d.enriched_query = j.at("enriched_query").get<std::string>();
  return d;
}

}  // namespace

json to_json(const PipelineTrace& t) {
  json iterations = json::array();
  for (const auto& it : t.iterations) {
    json features = json::array();
    for (const auto& f : it.features) features.push_back(to_json(f));
    iterations.push_back(json{{"query_text", it.query_text},
                              {"entropy_report", to_json(it.entropy_report)},
                              {"directive", it.directive ? to_json(*it.directive) : json(nullptr)},
                              {"features", features},
                              {"responses", it.responses},
                              {"assignments", it.assignments}});
  }
  return json{{"query_id", t.query_id},
              {"iterations", iterations},
              {"final_answer", t.final_answer},
              {"converged", t.converged},
              {"iterations_used", t.iterations_used},
              {"layer_label", t.layer_label},
              {"counters",
               {{"generation_batches", t.counters.generation_batches},
                {"activation_captures", t.counters.activation_captures},
                {"sae_calls", t.counters.sae_calls},
                {"enrichments", t.counters.enrichments}}},
              {"error", t.error ? json(*t.error) : json(nullptr)}};
}

json to_json(const PipelineOutcome& o) {
  return json{{"status", to_string(o.status)},
              {"baseline_entropy", o.baseline_entropy},
              {"final_entropy", o.final_entropy},
              {"enrichments_applied", o.enrichments_applied},
              {"trace", to_json(o.trace)}};
}

json to_json(const PipelineConfig& c) {
  json j{{"n_generations", c.n_generations},
         {"entropy_threshold", c.entropy_threshold},
         {"density_threshold", c.density_threshold},
         {"cluster_distance_threshold", c.cluster_distance_threshold},
         {"max_enrichment_iters", c.max_enrichment_iters},
         {"top_k_features", c.top_k_features},
         {"emphasize_count", c.emphasize_count},
         {"quartile_scheme", to_string(c.quartile_scheme)},
         {"mode", to_string(c.mode)},
         {"seed", c.seed},
         {"temperature", c.temperature},
         {"max_tokens", c.max_tokens},
         {"generation_parallelism", c.generation_parallelism},
         {"retry_budget", c.retry_budget},
         {"token_aggregation", to_string(c.token_aggregation)}};
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  for (const auto& key : config_keys()) {
    if (!j.contains(key)) continue;
    const auto& v = j[key];
    // JSON numbers dump in shortest round-trip form, so going through text is exact.
    apply_override(c, key, v.is_string() ? v.get<std::string>() : v.dump());
  }
  return c;
}

PipelineTrace trace_from_json(const json& j) {
  PipelineTrace t;
  t.query_id = j.at("query_id").get<std::string>();
  for (const auto& it : j.at("iterations")) {
    IterationRecord rec;
    rec.query_text = it.at("query_text").get<std::string>();
    rec.entropy_report = entropy_from_json(it.at("entropy_report"));
    if (!it.at("directive").is_null()) rec.directive = directive_from_json(it["directive"]);
    for (const auto& f : it.at("features")) rec.features.push_back(scored_from_json(f));
    rec.responses = it.at("responses").get<std::vector<std::string>>();
    rec.assignments = it.at("assignments").get<std::vector<int>>();
    t.iterations.push_back(std::move(rec));
  }
  t.final_answer = j.at("final_answer").get<std::string>();
  t.converged = j.at("converged").get<bool>();
  t.iterations_used = j.at("iterations_used").get<int>();
  t.layer_label = j.at("layer_label").get<std::string>();
  const auto& c = j.at("counters");
  t.counters.generation_batches = c.at("generation_batches").get<int>();
  t.counters.activation_captures = c.at("activation_captures").get<int>();
  t.counters.sae_calls = c.at("sae_calls").get<int>();
  t.counters.enrichments = c.at("enrichments").get<int>();
  if (!j.at("error").is_null()) t.error = j["error"].get<std::string>();
  return t;
}

PipelineOutcome outcome_from_json(const json& j) {
  PipelineOutcome o;
  o.status = parse_outcome_status(j.at("status").get<std::string>());
  o.baseline_entropy = j.at("baseline_entropy").get<double>();
  o.final_entropy = j.at("final_entropy").get<double>();
  o.enrichments_applied = j.at("enrichments_applied").get<int>();
  o.trace = trace_from_json(j.at("trace"));
  return o;
}

void write_trace_jsonl(const std::filesystem::path& path, std::span<const PipelineOutcome> outcomes) {
  std::vector<const PipelineOutcome*> sorted;
  for (const auto& o : outcomes) sorted.push_back(&o);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->trace.query_id < b->trace.query_id; });
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write trace file " + path.string());
  for (const auto* o : sorted) out << to_json(*o).dump() << '\n';
}

std::vector<PipelineOutcome> read_trace_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file " + path.string());
  std::vector<PipelineOutcome> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(outcome_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return out;
}

}  // namespace safe::pipeline
