#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safe/core/types.hpp"

namespace safe::backend {

struct GenerationRequest {
  std::string prompt;
  double temperature = 1.0;
  int max_tokens = 256;
  std::optional<std::uint64_t> seed;
  // Position of this request inside its batch. Live adapters ignore it.
  int sample_index = 0;
};

void validate(const GenerationRequest& request);

// Implementations must be safe to call from several threads at once.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string generate(const GenerationRequest& request) const = 0;
};

struct BatchParams {
  double temperature = 1.0;
  int max_tokens = 256;
  // Request i is issued with seed + i when set.
  std::optional<std::uint64_t> seed;
  int parallelism = 4;
  // Extra attempts per request after a BackendError.
  int retry_budget = 2;
};

BatchParams batch_params_from(const PipelineConfig& config, std::optional<std::uint64_t> seed);

// Returns exactly n samples ordered by index, or throws BackendError
// ("incomplete batch ...") if any request still fails after its retries.
std::vector<ResponseSample> generate_batch(const TextGenerator& generator, const Query& query, int n,
                                           const BatchParams& params);

}  // namespace safe::backend
