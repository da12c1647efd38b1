#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "safe/backend/activations.hpp"
#include "safe/backend/catalog.hpp"
#include "safe/backend/embedder.hpp"
#include "safe/backend/generator.hpp"
#include "safe/core/types.hpp"
#include "safe/detect/detect.hpp"
#include "safe/sae/model.hpp"

namespace safe::pipeline {

enum class OutcomeStatus { not_flagged, converged, iteration_cap_reached, failed };

std::string_view to_string(OutcomeStatus status);
OutcomeStatus parse_outcome_status(std::string_view s);

// Everything a query run talks to. The SAE-side members may be left empty
// for ablation_b, which never enriches from features.
struct Backends {
  std::shared_ptr<const backend::TextGenerator> generator;
  std::shared_ptr<const backend::Embedder> embedder;
  std::shared_ptr<const backend::ActivationSource> activations;
  std::shared_ptr<const sae::SaeModel> sae;
  std::shared_ptr<const backend::FeatureCatalog> catalog;
  // Activation density per SAE feature.
  std::vector<double> densities;
};

struct PipelineOutcome {
  PipelineTrace trace;
  double baseline_entropy = 0.0;
  double final_entropy = 0.0;
  int enrichments_applied = 0;
  OutcomeStatus status = OutcomeStatus::not_flagged;
};

// Detect, then enrich and regenerate until the entropy is <= the threshold
// or the enrichment cap is hit. Backend failures are caught and reported as
// status failed with trace.error set; an invalid config throws ConfigError.
PipelineOutcome run_query(const Query& query, const PipelineConfig& config, const Backends& backends);

// Runs queries on up to `workers` threads. Output order matches input order.
std::vector<PipelineOutcome> run_queries(std::span<const Query> queries, const PipelineConfig& config,
                                         const Backends& backends, std::size_t workers);

// Text of the lowest-index member of the largest cluster; clusters of equal
// size are ordered by their lowest member index.
std::string select_final_answer(std::span<const ResponseSample> responses, const detect::Clustering& clustering);

}  // namespace safe::pipeline
