#include "safe/sae/features.hpp"

#include <algorithm>

#include "safe/core/error.hpp"

namespace safe::sae {

void DensityAccumulator::add(const SaeModel& model, std::span<const double> x) {
  if (counts_.size() != model.feature_count()) throw DimensionError("density accumulator width mismatch");
  const Vector f = encode(model, x);
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] > 0.0) ++counts_[j];
  }
  ++samples_;
}

void DensityAccumulator::merge(const DensityAccumulator& other) {
  if (other.counts_.size() != counts_.size()) throw DimensionError("density accumulator width mismatch");
  for (std::size_t j = 0; j < counts_.size(); ++j) counts_[j] += other.counts_[j];
  samples_ += other.samples_;
}

Vector DensityAccumulator::densities() const {
  if (samples_ == 0) throw Error("density estimate over an empty reference stream");
  Vector out(counts_.size());
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    out[j] = static_cast<double>(counts_[j]) / static_cast<double>(samples_);
  }
  return out;
}

Vector estimate_density(const SaeModel& model, const Matrix& reference, std::size_t min_vectors) {
  if (reference.rows == 0) throw Error("density estimate over an empty reference stream");
  if (reference.rows < min_vectors) {
    throw Error("density estimate needs at least " + std::to_string(min_vectors) + " reference vectors, got " +
                std::to_string(reference.rows));
  }
  DensityAccumulator acc(model.feature_count());
  for (std::size_t r = 0; r < reference.rows; ++r) acc.add(model, reference.row(r));
  return acc.densities();
}

std::vector<int> FeatureSet::indices() const {
  std::vector<int> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.feature_index);
  return out;
}

bool FeatureSet::contains(int feature_index) const {
  return std::any_of(items.begin(), items.end(), [&](const auto& it) { return it.feature_index == feature_index; });
}

FeatureSet extract_features(const SaeModel& model, const backend::ActivationBundle& bundle,
                            std::span<const double> densities, double delta, int top_k, FeatureSource source,
                            TokenAggregation aggregation) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error("density threshold must lie in (0, 1]");
  if (top_k < 1) throw Error("top_k must be >= 1");
  const std::size_t m = model.feature_count();
  if (densities.size() != m) throw DimensionError("need one density per SAE feature");
  if (bundle.activations.cols != model.input_width()) {
    throw DimensionError("activation width " + std::to_string(bundle.activations.cols) + " does not match SAE input " +
                         std::to_string(model.input_width()));
  }
  const std::size_t tokens = bundle.activations.rows;

  Vector strength(m, 0.0);
  std::vector<std::size_t> active(m, 0);
  for (std::size_t t = 0; t < tokens; ++t) {
    const Vector f = encode(model, bundle.activations.row(t));
    for (std::size_t j = 0; j < m; ++j) {
      if (f[j] > 0.0) ++active[j];
      if (aggregation == TokenAggregation::max) {
        strength[j] = std::max(strength[j], f[j]);
      } else {
        strength[j] += f[j];
      }
    }
  }
  if (aggregation == TokenAggregation::mean && tokens > 0) {
    for (double& s : strength) s /= static_cast<double>(tokens);
  }

  FeatureSet out;
  out.source = source;
  for (std::size_t j = 0; j < m; ++j) {
    if (strength[j] > 0.0 && densities[j] <= delta) {
      out.items.push_back(FeatureActivation{static_cast<int>(j), strength[j],
                                            tokens ? static_cast<double>(active[j]) / static_cast<double>(tokens) : 0.0});
    }
  }
  std::stable_sort(out.items.begin(), out.items.end(),
                   [](const auto& a, const auto& b) { return a.max_activation > b.max_activation; });
  if (out.items.size() > static_cast<std::size_t>(top_k)) out.items.resize(static_cast<std::size_t>(top_k));
  return out;
}

}  // namespace safe::sae
