#pragma once

#include <span>
#include <string>
#include <vector>

#include "safe/core/matrix.hpp"

namespace safe::backend {

class Embedder {
 public:
  virtual ~Embedder() = default;
  // One vector per text, not necessarily normalized.
  virtual std::vector<Vector> embed_raw(std::span<const std::string> texts) const = 0;
  // Announced output width, or 0 when only known after the first call.
  virtual std::size_t dimension() const { return 0; }
};

// Validated, L2-normalized embeddings. Throws Error on empty texts,
// BackendError on count mismatch or zero vectors, DimensionError when widths
// disagree with each other or with the announced dimension.
std::vector<Vector> embed(const Embedder& embedder, std::span<const std::string> texts);
Vector embed_one(const Embedder& embedder, const std::string& text);

void normalize_in_place(Vector& v);

}  // namespace safe::backend
