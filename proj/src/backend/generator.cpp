#include "safe/backend/generator.hpp"

#include <algorithm>

#include "safe/core/error.hpp"
#include "safe/core/log.hpp"
#include "safe/core/parallel.hpp"

namespace safe::backend {

void validate(const GenerationRequest& request) {
  if (!(request.temperature >= 0.0)) throw Error("generation temperature must be >= 0");
  if (request.max_tokens < 1) throw Error("generation max_tokens must be >= 1");
}

BatchParams batch_params_from(const PipelineConfig& config, std::optional<std::uint64_t> seed) {
  BatchParams p;
  p.temperature = config.temperature;
  p.max_tokens = config.max_tokens;
  p.seed = seed;
  p.parallelism = config.generation_parallelism;
  p.retry_budget = config.retry_budget;
  return p;
}

std::vector<ResponseSample> generate_batch(const TextGenerator& generator, const Query& query, int n,
                                           const BatchParams& params) {
  if (n < 2) throw Error("generate_batch needs n >= 2, got " + std::to_string(n));

  std::vector<std::optional<std::string>> texts(static_cast<std::size_t>(n));
  std::vector<std::string> failures(static_cast<std::size_t>(n));

  parallel_for(texts.size(), static_cast<std::size_t>(std::max(params.parallelism, 1)), [&](std::size_t i) {
    GenerationRequest req;
    req.prompt = query.text;
    req.temperature = params.temperature;
    req.max_tokens = params.max_tokens;
    if (params.seed) req.seed = *params.seed + i;
    req.sample_index = static_cast<int>(i);
    validate(req);
    for (int attempt = 0; attempt <= params.retry_budget; ++attempt) {
      try {
        texts[i] = generator.generate(req);
        return;
      } catch (const BackendError& e) {
        failures[i] = e.what();
      }
    }
  });

  std::vector<ResponseSample> out;
  out.reserve(texts.size());
  std::string first_failure;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i]) {
      out.push_back(ResponseSample{static_cast<int>(i), std::move(*texts[i]), std::nullopt, std::nullopt});
    } else if (first_failure.empty()) {
      first_failure = "request " + std::to_string(i) + ": " + failures[i];
    }
  }
  if (out.size() != texts.size()) {
    throw BackendError("incomplete batch: " + std::to_string(out.size()) + " of " + std::to_string(n) +
                       " responses (" + first_failure + ")");
  }
  return out;
}

}  // namespace safe::backend
