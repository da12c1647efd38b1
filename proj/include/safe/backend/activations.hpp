#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "safe/core/matrix.hpp"

namespace safe::backend {

// Residual activations for the completion tokens, one row per token.
struct ActivationBundle {
  std::size_t token_count = 0;
  Matrix activations;
  std::string layer_label;
};

class ActivationSource {
 public:
  virtual ~ActivationSource() = default;
  virtual ActivationBundle capture(std::string_view prompt, std::string_view completion) const = 0;
};

// Front door used by the pipeline. Throws BackendError "activation source
// unavailable" for a null source and "no tokens to encode" for a blank
// completion.
ActivationBundle capture_activations(const ActivationSource* source, std::string_view prompt,
                                     std::string_view completion);

// Seeded stand-in for a model. Each whitespace token of the completion maps
// to a Gaussian row determined by the token text, plus a smaller component
// determined by the prompt and position.
class SyntheticActivationSource : public ActivationSource {
 public:
  SyntheticActivationSource(std::uint64_t seed, std::size_t width, std::string layer_label = "synthetic");

  ActivationBundle capture(std::string_view prompt, std::string_view completion) const override;
  std::size_t width() const { return width_; }

 private:
  std::uint64_t seed_;
  std::size_t width_;
  std::string layer_label_;
};

// Reads activations saved in the tensor container format. A regular file is
// returned as-is for every request. A directory is searched for
// `<activation_key(prompt, completion)>.tensor`.
class TensorFileActivationSource : public ActivationSource {
 public:
  explicit TensorFileActivationSource(std::filesystem::path path, std::string layer_label = "file");

  ActivationBundle capture(std::string_view prompt, std::string_view completion) const override;

 private:
  std::filesystem::path path_;
  std::string layer_label_;
};

// 16 hex digits naming the cached activation file for a (prompt, completion) pair.
std::string activation_key(std::string_view prompt, std::string_view completion);

}  // namespace safe::backend
