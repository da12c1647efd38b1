#pragma once

#include <cstdint>

#include "safe/pipeline/pipeline.hpp"

namespace safe::pipeline {

struct MockSuiteOptions {
  std::size_t activation_width = 32;
  std::size_t feature_count = 256;
  std::size_t embedding_dimension = 256;
  std::size_t reference_rows = 4000;
};

// Fully offline backends: MockGenerator, HashEmbedder, synthetic activations,
// a synthetic SAE and catalog, and densities estimated on synthetic
// reference activations. Everything is a pure function of `seed`.
Backends make_mock_backends(std::uint64_t seed, const MockSuiteOptions& options = {});

}  // namespace safe::pipeline
