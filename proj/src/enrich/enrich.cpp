#include "safe/enrich/enrich.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "safe/core/error.hpp"
#include "safe/detect/detect.hpp"
#include "safe/enrich/templates.hpp"

namespace safe::enrich {

std::vector<int> diff_features(const sae::FeatureSet& response, const sae::FeatureSet& question) {
  std::unordered_set<int> present;
  for (const auto& it : question.items) present.insert(it.feature_index);
  std::vector<int> out;
  for (const auto& it : response.items) {
    if (!present.contains(it.feature_index)) out.push_back(it.feature_index);
  }
  return out;
}

std::vector<ScoredFeature> score_features(std::span<const int> diff, const backend::FeatureCatalog& catalog,
                                          const Query& query, const backend::Embedder& embedder) {
  if (diff.empty()) return {};
  auto entries = backend::lookup_descriptions(diff, catalog);
  std::vector<std::string> texts;
  texts.reserve(entries.size() + 1);
  for (const auto& e : entries) texts.push_back(e.description);
  texts.push_back(query.text);
  const auto vectors = backend::embed(embedder, texts);
  const Vector& q = vectors.back();

  std::vector<ScoredFeature> out;
  out.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out.push_back(ScoredFeature{std::move(entries[i]), detect::cosine_similarity(vectors[i], q), false});
  }
  return out;
}

std::vector<ScoredFeature> merge_scored(std::span<const std::vector<ScoredFeature>> per_response) {
  std::vector<ScoredFeature> out;
  std::unordered_map<int, std::size_t> position;
  for (const auto& list : per_response) {
    for (const auto& s : list) {
      auto [it, inserted] = position.emplace(s.entry.feature_index, out.size());
      if (inserted) {
        out.push_back(s);
      } else if (s.cos_dp > out[it->second].cos_dp) {
        out[it->second].cos_dp = s.cos_dp;
      }
    }
  }
  return out;
}

double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

QuartileSummary quartile_summary(std::span<const double> values, QuartileScheme scheme) {
  if (values.empty()) throw Error("outlier detection needs at least one score");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  QuartileSummary s;
  s.q1 = quantile_linear(sorted, 0.25);
  s.q2 = quantile_linear(sorted, 0.50);
  s.q3 = quantile_linear(sorted, 0.75);
  s.iqr = scheme == QuartileScheme::paper_q2_minus_q1 ? s.q2 - s.q1 : s.q3 - s.q1;
  s.lower_bound = s.q1 - 1.5 * s.iqr;
  return s;
}

std::vector<ScoredFeature> detect_outliers(std::vector<ScoredFeature> scored, QuartileScheme scheme) {
  std::vector<double> values;
  values.reserve(scored.size());
  for (const auto& s : scored) values.push_back(s.cos_dp);
  const auto summary = quartile_summary(values, scheme);
  for (auto& s : scored) s.is_outlier = s.cos_dp < summary.lower_bound;
  return scored;
}

EnrichmentDirective render_directive(const std::string& query_text, std::vector<std::string> avoid,
                                     std::vector<std::string> emphasize) {
  namespace t = templates;
  EnrichmentDirective d;
  d.avoid = std::move(avoid);
  d.emphasize = std::move(emphasize);
  if (!d.avoid.empty() || !d.emphasize.empty()) {
    std::string suffix(t::kNotePrefix);
    bool first = true;
    auto add_clause = [&](std::string_view clause, const std::string& description) {
      if (!first) suffix += t::kClauseJoiner;
      first = false;
      suffix += clause;
      suffix += description;
    };
    for (const auto& a : d.avoid) add_clause(t::kAvoidClause, a);
    for (const auto& e : d.emphasize) add_clause(t::kEmphasizeClause, e);
    if (!d.emphasize.empty()) {
      const char last = suffix.back();
      if (last != '.' && last != '!' && last != '?') suffix += t::kEmphasizeTerminator;
    }
    d.rendered_suffix = std::move(suffix);
  }
  d.enriched_query = query_text + d.rendered_suffix;
  return d;
}

EnrichmentDirective build_directive(const Query& query, std::span<const ScoredFeature> scored, Mode mode,
                                    int emphasize_count) {
  if (mode == Mode::ablation_b) {
    EnrichmentDirective d;
    d.rendered_suffix = std::string(templates::kReflectiveSuffix);
    d.enriched_query = query.text + d.rendered_suffix;
    return d;
  }
  if (scored.empty()) throw Error("build_directive needs at least one scored feature");
  if (emphasize_count < 1) throw Error("emphasize_count must be >= 1");

  auto by_similarity_desc = [&] {
    std::vector<std::size_t> order(scored.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scored[a].cos_dp > scored[b].cos_dp; });
    return order;
  };

  switch (mode) {
    case Mode::ablation_a1: {
      auto it = std::min_element(scored.begin(), scored.end(),
                                 [](const auto& a, const auto& b) { return a.cos_dp < b.cos_dp; });
      return render_directive(query.text, {it->entry.description}, {});
    }
    case Mode::ablation_a2: {
      auto it = std::max_element(scored.begin(), scored.end(),
                                 [](const auto& a, const auto& b) { return a.cos_dp < b.cos_dp; });
      return render_directive(query.text, {}, {it->entry.description});
    }
    case Mode::full:
    case Mode::ablation_c: {
      std::vector<std::string> avoid;
      for (const auto& s : scored) {
        if (s.is_outlier) avoid.push_back(s.entry.description);
      }
      if (!avoid.empty()) return render_directive(query.text, std::move(avoid), {});
      std::vector<std::string> emphasize;
      for (std::size_t i : by_similarity_desc()) {
        if (emphasize.size() == static_cast<std::size_t>(emphasize_count)) break;
        emphasize.push_back(scored[i].entry.description);
      }
      return render_directive(query.text, {}, std::move(emphasize));
    }
    case Mode::ablation_b: break;
  }
  throw Error("unhandled enrichment mode");
}

}  // namespace safe::enrich
