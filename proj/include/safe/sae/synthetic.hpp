#pragma once

#include <cstdint>

#include "safe/backend/catalog.hpp"
#include "safe/sae/model.hpp"

namespace safe::sae {

// Random relu SAE whose encoder rows are unit vectors with negative biases,
// so features fire on a few percent of standard-normal inputs.
SaeModel make_synthetic_sae(std::size_t input_width, std::size_t feature_count, std::uint64_t seed);

// Standard-normal reference activations.
Matrix make_reference_activations(std::size_t rows, std::size_t width, std::uint64_t seed);

// One made-up description per feature.
backend::FeatureCatalog make_synthetic_catalog(std::size_t feature_count, std::uint64_t seed);

}  // namespace safe::sae
