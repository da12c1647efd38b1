#include "safe/backend/embedder.hpp"

#include <cmath>

#include "safe/core/error.hpp"
#include "safe/core/text.hpp"

namespace safe::backend {

void normalize_in_place(Vector& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw BackendError("embedding has zero or non-finite norm");
  for (double& x : v) x /= norm;
}

std::vector<Vector> embed(const Embedder& embedder, std::span<const std::string> texts) {
  for (const auto& t : texts) {
    if (t.empty()) throw Error("cannot embed an empty text");
  }
  if (texts.empty()) return {};
  auto vectors = embedder.embed_raw(texts);
  if (vectors.size() != texts.size()) {
    throw BackendError("embedding backend returned " + std::to_string(vectors.size()) + " vectors for " +
                       std::to_string(texts.size()) + " texts");
  }
  const std::size_t announced = embedder.dimension();
  const std::size_t width = vectors.front().size();
  if (width == 0) throw BackendError("embedding backend returned an empty vector");
  for (auto& v : vectors) {
    if (v.size() != width || (announced != 0 && v.size() != announced)) {
      throw DimensionError("embedding width mismatch within batch");
    }
    normalize_in_place(v);
  }
  return vectors;
}

Vector embed_one(const Embedder& embedder, const std::string& text) {
  std::vector<std::string> batch{text};
  return std::move(embed(embedder, batch).front());
}

}  // namespace safe::backend
