#pragma once

#include <span>
#include <string>
#include <vector>

#include "safe/backend/catalog.hpp"
#include "safe/backend/embedder.hpp"
#include "safe/core/types.hpp"
#include "safe/sae/features.hpp"

namespace safe::enrich {

// Indices in `response` that are absent from `question`, in response order.
std::vector<int> diff_features(const sae::FeatureSet& response, const sae::FeatureSet& question);

// cos_dp between each feature description and the query text, in diff order.
std::vector<ScoredFeature> score_features(std::span<const int> diff, const backend::FeatureCatalog& catalog,
                                          const Query& query, const backend::Embedder& embedder);

// Union of per-response scored lists, deduplicated by feature index (keeping
// the larger cos_dp), ordered by first appearance.
std::vector<ScoredFeature> merge_scored(std::span<const std::vector<ScoredFeature>> per_response);

struct QuartileSummary {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_bound = 0.0;
};

// Linear interpolation between order statistics at position (n - 1) * p.
// `sorted` must be ascending and non-empty.
double quantile_linear(std::span<const double> sorted, double p);

// IQR is Q2 - Q1 under paper_q2_minus_q1 and Q3 - Q1 under standard_q3_minus_q1;
// lower_bound = Q1 - 1.5 * IQR in both cases. Throws Error on empty input.
QuartileSummary quartile_summary(std::span<const double> values, QuartileScheme scheme);

// Copies `scored`, setting is_outlier for cos_dp strictly below the lower bound.
std::vector<ScoredFeature> detect_outliers(std::vector<ScoredFeature> scored, QuartileScheme scheme);

// Joins the clauses under the NOTE prefix. Empty lists give an empty suffix.
EnrichmentDirective render_directive(const std::string& query_text, std::vector<std::string> avoid,
                                     std::vector<std::string> emphasize);

// Chooses which descriptions to cite:
//   full / ablation_c: outliers, when any, are avoided; otherwise the
//     emphasize_count highest cos_dp features are emphasized.
//   ablation_a1: avoid the single lowest cos_dp feature.
//   ablation_a2: emphasize the single highest cos_dp feature.
//   ablation_b: the fixed reflective note, features ignored.
// `scored` must carry outlier marks (see detect_outliers) and be non-empty
// outside ablation_b.
EnrichmentDirective build_directive(const Query& query, std::span<const ScoredFeature> scored, Mode mode,
                                    int emphasize_count);

}  // namespace safe::enrich
