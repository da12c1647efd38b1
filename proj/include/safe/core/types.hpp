#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safe/core/matrix.hpp"

namespace safe {

struct Query {
  std::string id;
  std::string text;
  std::optional<std::string> dataset_tag;

  bool operator==(const Query&) const = default;
};

// Throws Error when the text is blank.
Query make_query(std::string id, std::string text, std::optional<std::string> dataset_tag = std::nullopt);

struct ResponseSample {
  int index = 0;
  std::string text;
  std::optional<Vector> embedding;
  std::optional<int> cluster_id;

  bool operator==(const ResponseSample&) const = default;
};

enum class QuartileScheme { paper_q2_minus_q1, standard_q3_minus_q1 };

enum class Mode { full, ablation_a1, ablation_a2, ablation_b, ablation_c };

enum class TokenAggregation { max, mean };

std::string_view to_string(QuartileScheme v);
std::string_view to_string(Mode v);
std::string_view to_string(TokenAggregation v);
// Parsers accept the names produced by to_string; the short mode aliases
// "a1", "a2", "b", "c" are accepted too. Throw ConfigError otherwise.
QuartileScheme parse_quartile_scheme(std::string_view s);
Mode parse_mode(std::string_view s);
TokenAggregation parse_token_aggregation(std::string_view s);

struct PipelineConfig {
  int n_generations = 10;
  double entropy_threshold = 0.6;
  double density_threshold = 0.05;
  double cluster_distance_threshold = 0.1;
  int max_enrichment_iters = 3;
  int top_k_features = 10;
  int emphasize_count = 1;
  QuartileScheme quartile_scheme = QuartileScheme::paper_q2_minus_q1;
  Mode mode = Mode::full;
  std::uint64_t seed = 0;

  // Generation request parameters.
  double temperature = 1.0;
  int max_tokens = 256;
  int generation_parallelism = 4;
  int retry_budget = 2;

  TokenAggregation token_aggregation = TokenAggregation::max;

  bool operator==(const PipelineConfig&) const = default;
};

struct EntropyReport {
  std::vector<int> cluster_sizes;
  std::vector<double> probabilities;
  double entropy = 0.0;  // nats
  bool flagged = false;

  bool operator==(const EntropyReport&) const = default;
};

struct FeatureCatalogEntry {
  int feature_index = 0;
  std::string description;
  std::optional<double> reference_density;
  // Set by lookups that found no catalog entry for the index.
  bool placeholder = false;

  bool operator==(const FeatureCatalogEntry&) const = default;
};

struct ScoredFeature {
  FeatureCatalogEntry entry;
  double cos_dp = 0.0;
  bool is_outlier = false;

  bool operator==(const ScoredFeature&) const = default;
};

struct EnrichmentDirective {
  std::vector<std::string> avoid;
  std::vector<std::string> emphasize;
  std::string rendered_suffix;
  std::string enriched_query;

  bool operator==(const EnrichmentDirective&) const = default;
};

struct IterationRecord {
  std::string query_text;
  EntropyReport entropy_report;
  // Directive that produced query_text; absent for the first iteration.
  std::optional<EnrichmentDirective> directive;
  // Features analysed to build `directive`.
  std::vector<ScoredFeature> features;
  std::vector<std::string> responses;
  std::vector<int> assignments;

  bool operator==(const IterationRecord&) const = default;
};

struct TraceCounters {
  int generation_batches = 0;
  int activation_captures = 0;
  int sae_calls = 0;
  int enrichments = 0;

  bool operator==(const TraceCounters&) const = default;
};

struct PipelineTrace {
  std::string query_id;
  std::vector<IterationRecord> iterations;
  std::string final_answer;
  bool converged = false;
  int iterations_used = 0;
  std::string layer_label;
  TraceCounters counters;
  std::optional<std::string> error;

  bool operator==(const PipelineTrace&) const = default;
};

}  // namespace safe
