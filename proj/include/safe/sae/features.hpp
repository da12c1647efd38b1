#pragma once

#include <span>
#include <vector>

#include "safe/backend/activations.hpp"
#include "safe/core/types.hpp"
#include "safe/sae/model.hpp"

namespace safe::sae {

inline constexpr std::size_t kDefaultDensityFloor = 1000;

// Per-feature firing counts over reference activations. Partial
// accumulators over disjoint slices can be merged.
class DensityAccumulator {
 public:
  explicit DensityAccumulator(std::size_t feature_count) : counts_(feature_count, 0) {}

  void add(const SaeModel& model, std::span<const double> x);
  void merge(const DensityAccumulator& other);
  std::size_t samples() const { return samples_; }
  // density_j = (#vectors with encode(x)_j > 0) / samples
  Vector densities() const;

 private:
  std::vector<std::size_t> counts_;
  std::size_t samples_ = 0;
};

// Throws Error when `reference` has fewer than `min_vectors` rows (or none).
Vector estimate_density(const SaeModel& model, const Matrix& reference, std::size_t min_vectors = kDefaultDensityFloor);

struct FeatureActivation {
  int feature_index = 0;
  // Aggregated over tokens: max by default, mean when configured.
  double max_activation = 0.0;
  // Fraction of tokens on which the feature is active.
  double token_frequency = 0.0;

  bool operator==(const FeatureActivation&) const = default;
};

enum class FeatureSource { question, response };

struct FeatureSet {
  std::vector<FeatureActivation> items;  // strongest first
  FeatureSource source = FeatureSource::response;

  std::vector<int> indices() const;
  bool contains(int feature_index) const;
};

// Encodes every token, aggregates per feature, keeps features with strength > 0
// and density <= delta, and returns the top_k strongest (ties by lower index).
FeatureSet extract_features(const SaeModel& model, const backend::ActivationBundle& bundle,
                            std::span<const double> densities, double delta, int top_k, FeatureSource source,
                            TokenAggregation aggregation = TokenAggregation::max);

}  // namespace safe::sae
