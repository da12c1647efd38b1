#include "safe/pipeline/pipeline.hpp"

#include <map>

#include "safe/core/config.hpp"
#include "safe/core/error.hpp"
#include "safe/core/parallel.hpp"
#include "safe/core/rng.hpp"
#include "safe/core/text.hpp"
#include "safe/enrich/enrich.hpp"
#include "safe/sae/features.hpp"

namespace safe::pipeline {

std::string_view to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::not_flagged: return "not_flagged";
    case OutcomeStatus::converged: return "converged";
    case OutcomeStatus::iteration_cap_reached: return "iteration_cap_reached";
    case OutcomeStatus::failed: return "failed";
  }
  return "";
}

OutcomeStatus parse_outcome_status(std::string_view s) {
  for (auto st : {OutcomeStatus::not_flagged, OutcomeStatus::converged, OutcomeStatus::iteration_cap_reached,
                  OutcomeStatus::failed}) {
    if (to_string(st) == s) return st;
  }
  throw Error("unknown outcome status '" + std::string(s) + "'");
}

std::string select_final_answer(std::span<const ResponseSample> responses, const detect::Clustering& clustering) {
  if (responses.empty()) throw Error("select_final_answer needs at least one response");
  if (clustering.assignments.size() != responses.size()) throw Error("clustering does not cover the responses");
  const auto members = clustering.members();
  std::size_t best = 0;
  bool have_best = false;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) continue;
    if (!have_best || members[c].size() > members[best].size() ||
        (members[c].size() == members[best].size() && members[c].front() < members[best].front())) {
      best = c;
      have_best = true;
    }
  }
  return responses[static_cast<std::size_t>(members[best].front())].text;
}

namespace {

struct Evaluation {
  std::vector<ResponseSample> responses;
  detect::Clustering clustering;
  EntropyReport report;
};

class QueryRun {
 public:
  QueryRun(const Query& query, const PipelineConfig& config, const Backends& backends)
      : query_(query), config_(config), backends_(backends) {}

  PipelineOutcome run();

 private:
  Evaluation evaluate(const std::string& prompt, int iteration);
  void record(const std::string& prompt, const Evaluation& eval, std::optional<EnrichmentDirective> directive,
              std::vector<ScoredFeature> features);
  std::pair<EnrichmentDirective, std::vector<ScoredFeature>> enrich(const std::string& current_prompt,
                                                                     const Evaluation& last);
  sae::FeatureSet features_for(std::string_view prompt, std::string_view completion, sae::FeatureSource source);

  const Query& query_;
  const PipelineConfig& config_;
  const Backends& backends_;
  PipelineTrace trace_;
};

Evaluation QueryRun::evaluate(const std::string& prompt, int iteration) {
  if (!backends_.generator || !backends_.embedder) throw BackendError("generator and embedder are required");
  Query current{query_.id, prompt, query_.dataset_tag};
  const std::uint64_t seed = derive_seed(config_.seed, "gen:" + query_.id + ":" + std::to_string(iteration));
  Evaluation eval;
  eval.responses = backend::generate_batch(*backends_.generator, current, config_.n_generations,
                                           backend::batch_params_from(config_, seed));
  ++trace_.counters.generation_batches;
  eval.responses = detect::embed_responses(*backends_.embedder, query_, std::move(eval.responses));
  std::vector<Vector> embeddings;
  embeddings.reserve(eval.responses.size());
  for (const auto& r : eval.responses) embeddings.push_back(*r.embedding);
  eval.clustering = detect::cluster(embeddings, config_.cluster_distance_threshold);
  for (std::size_t i = 0; i < eval.responses.size(); ++i) eval.responses[i].cluster_id = eval.clustering.assignments[i];
  eval.report = detect::entropy(eval.clustering, eval.responses.size(), config_.entropy_threshold);
  return eval;
}

void QueryRun::record(const std::string& prompt, const Evaluation& eval, std::optional<EnrichmentDirective> directive,
                      std::vector<ScoredFeature> features) {
  IterationRecord rec;
  rec.query_text = prompt;
  rec.entropy_report = eval.report;
  rec.directive = std::move(directive);
  rec.features = std::move(features);
  for (const auto& r : eval.responses) rec.responses.push_back(r.text);
  rec.assignments = eval.clustering.assignments;
  trace_.iterations.push_back(std::move(rec));
  trace_.final_answer = select_final_answer(eval.responses, eval.clustering);
}

sae::FeatureSet QueryRun::features_for(std::string_view prompt, std::string_view completion,
                                       sae::FeatureSource source) {
  auto bundle = backend::capture_activations(backends_.activations.get(), prompt, completion);
  ++trace_.counters.activation_captures;
  if (trace_.layer_label.empty()) trace_.layer_label = bundle.layer_label;
  ++trace_.counters.sae_calls;
  return sae::extract_features(*backends_.sae, bundle, backends_.densities, config_.density_threshold,
                               config_.top_k_features, source, config_.token_aggregation);
}

std::pair<EnrichmentDirective, std::vector<ScoredFeature>> QueryRun::enrich(const std::string& current_prompt,
                                                                             const Evaluation& last) {
  if (config_.mode == Mode::ablation_b) {
    return {enrich::build_directive(query_, {}, Mode::ablation_b, config_.emphasize_count), {}};
  }
  if (!backends_.activations) throw BackendError("activation source unavailable");
  if (!backends_.sae || !backends_.catalog) throw BackendError("SAE model and feature catalog are required");
  if (backends_.densities.size() != backends_.sae->feature_count()) {
    throw Error("feature densities do not cover the SAE features");
  }

  const auto question_features = features_for("", current_prompt, sae::FeatureSource::question);

  // Identical responses yield identical diffs, so each distinct text is analysed once.
  std::vector<std::vector<ScoredFeature>> per_response;
  std::map<std::string, bool> seen;
  for (const auto& r : last.responses) {
    if (trim(r.text).empty() || !seen.emplace(r.text, true).second) continue;
    const auto response_features = features_for(current_prompt, r.text, sae::FeatureSource::response);
    const auto diff = enrich::diff_features(response_features, question_features);
    per_response.push_back(enrich::score_features(diff, *backends_.catalog, query_, *backends_.embedder));
  }
  auto merged = enrich::merge_scored(per_response);
  if (merged.empty()) return {enrich::render_directive(query_.text, {}, {}), {}};
  merged = enrich::detect_outliers(std::move(merged), config_.quartile_scheme);
  auto directive = enrich::build_directive(query_, merged, config_.mode, config_.emphasize_count);
  return {std::move(directive), std::move(merged)};
}

PipelineOutcome QueryRun::run() {
  trace_.query_id = query_.id;
  PipelineOutcome outcome;
  try {
    std::string prompt = query_.text;
    Evaluation eval = evaluate(prompt, 0);
    record(prompt, eval, std::nullopt, {});
    outcome.baseline_entropy = eval.report.entropy;

    const bool gated = config_.mode != Mode::ablation_c;
    if (gated && !eval.report.flagged) {
      outcome.status = OutcomeStatus::not_flagged;
    } else {
      const int cap = gated ? config_.max_enrichment_iters : 1;
      outcome.status = OutcomeStatus::iteration_cap_reached;
      for (int k = 1; k <= cap; ++k) {
        auto [directive, features] = enrich(prompt, eval);
        ++trace_.counters.enrichments;
        prompt = directive.enriched_query;
        eval = evaluate(prompt, k);
        record(prompt, eval, std::move(directive), std::move(features));
        if (eval.report.entropy <= config_.entropy_threshold) {
          outcome.status = OutcomeStatus::converged;
          if (gated) break;
        }
      }
    }
    outcome.final_entropy = eval.report.entropy;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    trace_.error = e.what();
    outcome.status = OutcomeStatus::failed;
    if (!trace_.iterations.empty()) outcome.final_entropy = trace_.iterations.back().entropy_report.entropy;
  }
  trace_.iterations_used = static_cast<int>(trace_.iterations.size());
  trace_.converged = !trace_.error && !trace_.iterations.empty() &&
                     trace_.iterations.back().entropy_report.entropy <= config_.entropy_threshold;
  outcome.enrichments_applied = trace_.counters.enrichments;
  outcome.trace = std::move(trace_);
  return outcome;
}

}  // namespace

PipelineOutcome run_query(const Query& query, const PipelineConfig& config, const Backends& backends) {
  validate(config);
  return QueryRun(query, config, backends).run();
}

std::vector<PipelineOutcome> run_queries(std::span<const Query> queries, const PipelineConfig& config,
                                         const Backends& backends, std::size_t workers) {
  validate(config);
  std::vector<PipelineOutcome> out(queries.size());
  parallel_for(queries.size(), workers, [&](std::size_t i) { out[i] = run_query(queries[i], config, backends); });
  return out;
}

}  // namespace safe::pipeline
