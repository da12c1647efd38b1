#include "safe/sae/synthetic.hpp"

#include <array>
#include <cmath>
#include <string_view>

#include "safe/core/rng.hpp"

namespace safe::sae {

SaeModel make_synthetic_sae(std::size_t input_width, std::size_t feature_count, std::uint64_t seed) {
  auto rng = seeded_rng(seed, "synthetic-sae");
  Matrix w_enc(feature_count, input_width);
  Vector b_enc(feature_count);
  for (std::size_t j = 0; j < feature_count; ++j) {
    auto row = w_enc.row(j);
    double sq = 0.0;
    for (double& v : row) {
      v = rng.normal();
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    for (double& v : row) v /= norm;
    b_enc[j] = rng.uniform(-2.5, -1.0);
  }
  Matrix w_dec(input_width, feature_count);
  for (std::size_t i = 0; i < input_width; ++i) {
    for (std::size_t j = 0; j < feature_count; ++j) w_dec(i, j) = w_enc(j, i);
  }
  return SaeModel(std::move(w_enc), std::move(b_enc), std::move(w_dec), Vector(input_width, 0.0));
}

Matrix make_reference_activations(std::size_t rows, std::size_t width, std::uint64_t seed) {
  auto rng = seeded_rng(seed, "reference-activations");
  Matrix m(rows, width);
  for (double& v : m.data) v = rng.normal();
  return m;
}

backend::FeatureCatalog make_synthetic_catalog(std::size_t feature_count, std::uint64_t seed) {
  static constexpr std::array<std::string_view, 12> kLead = {
      "mentions of",     "references to",      "terms related to",       "phrases describing",
      "discussion of",   "occurrences of",     "technical language about", "questions concerning",
      "descriptions of", "names associated with", "claims regarding",     "expressions of"};
  static constexpr std::array<std::string_view, 24> kTopic = {
      "geography and capital cities", "planetary science",      "medical symptoms",   "fictional franchises",
      "chemical compounds",           "historical dates",       "sports statistics",  "legal terminology",
      "cooking and recipes",          "computer networking",    "folk superstitions", "animal behaviour",
      "financial markets",            "musical instruments",    "weather events",     "genetic elements",
      "religious practices",          "travel and transport",   "film production",    "mythological creatures",
      "nutrition and diet",           "political institutions", "ocean life",         "everyday household items"};
  auto rng = seeded_rng(seed, "synthetic-catalog");
  backend::FeatureCatalog catalog;
  for (std::size_t j = 0; j < feature_count; ++j) {
    std::string d(kLead[rng.uniform_index(kLead.size())]);
    d += ' ';
    d += kTopic[rng.uniform_index(kTopic.size())];
    d += " (feature " + std::to_string(j) + ")";
    catalog.insert(FeatureCatalogEntry{static_cast<int>(j), std::move(d), std::nullopt, false});
  }
  return catalog;
}

}  // namespace safe::sae
