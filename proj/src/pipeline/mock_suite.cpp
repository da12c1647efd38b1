#include "safe/pipeline/mock_suite.hpp"

#include "safe/backend/mock.hpp"
#include "safe/sae/features.hpp"
#include "safe/sae/synthetic.hpp"

namespace safe::pipeline {

Backends make_mock_backends(std::uint64_t seed, const MockSuiteOptions& options) {
  Backends b;
  b.generator = std::make_shared<backend::MockGenerator>(seed);
  b.embedder = std::make_shared<backend::HashEmbedder>(options.embedding_dimension, seed);
  b.activations = std::make_shared<backend::SyntheticActivationSource>(seed, options.activation_width);
  auto model = std::make_shared<sae::SaeModel>(
      sae::make_synthetic_sae(options.activation_width, options.feature_count, seed));
  const Matrix reference = sae::make_reference_activations(options.reference_rows, options.activation_width, seed);
  b.densities = sae::estimate_density(*model, reference, std::min(options.reference_rows, sae::kDefaultDensityFloor));
  auto catalog = std::make_shared<backend::FeatureCatalog>(sae::make_synthetic_catalog(options.feature_count, seed));
  catalog->cache_densities(b.densities);
  b.sae = std::move(model);
  b.catalog = std::move(catalog);
  return b;
}

}  // namespace safe::pipeline
