#include "safe/backend/activations.hpp"

#include <cstdio>

#include "safe/backend/tensor_file.hpp"
#include "safe/core/error.hpp"
#include "safe/core/rng.hpp"
#include "safe/core/text.hpp"

namespace safe::backend {

ActivationBundle capture_activations(const ActivationSource* source, std::string_view prompt,
                                     std::string_view completion) {
  if (source == nullptr) throw BackendError("activation source unavailable");
  if (trim(completion).empty()) throw BackendError("no tokens to encode");
  ActivationBundle bundle = source->capture(prompt, completion);
  if (bundle.token_count == 0 || bundle.activations.rows != bundle.token_count) {
    throw BackendError("activation source returned " + std::to_string(bundle.activations.rows) +
                       " rows for token_count " + std::to_string(bundle.token_count));
  }
  return bundle;
}

SyntheticActivationSource::SyntheticActivationSource(std::uint64_t seed, std::size_t width, std::string layer_label)
    : seed_(seed), width_(width), layer_label_(std::move(layer_label)) {
  if (width_ == 0) throw Error("synthetic activation width must be positive");
}

ActivationBundle SyntheticActivationSource::capture(std::string_view prompt, std::string_view completion) const {
  const auto tokens = split_whitespace(completion);
  if (tokens.empty()) throw BackendError("no tokens to encode");
  ActivationBundle bundle;
  bundle.token_count = tokens.size();
  bundle.activations = Matrix(tokens.size(), width_);
  bundle.layer_label = layer_label_;
  const std::string context = std::to_string(fnv1a64(prompt));
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    auto token_rng = seeded_rng(seed_, "token:" + to_lower(tokens[t]));
    auto context_rng = seeded_rng(seed_, "context:" + context + ":" + std::to_string(t));
    auto row = bundle.activations.row(t);
    for (double& x : row) x = token_rng.normal() + 0.25 * context_rng.normal();
  }
  return bundle;
}

std::string activation_key(std::string_view prompt, std::string_view completion) {
  std::string joined(prompt);
  joined.push_back('\x1f');
  joined.append(completion);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(joined)));
  return buf;
}

TensorFileActivationSource::TensorFileActivationSource(std::filesystem::path path, std::string layer_label)
    : path_(std::move(path)), layer_label_(std::move(layer_label)) {
  if (!std::filesystem::exists(path_)) throw Error("activation path does not exist: " + path_.string());
}

ActivationBundle TensorFileActivationSource::capture(std::string_view prompt, std::string_view completion) const {
  std::filesystem::path file = path_;
  if (std::filesystem::is_directory(path_)) {
    file = path_ / (activation_key(prompt, completion) + ".tensor");
    if (!std::filesystem::exists(file)) throw BackendError("no cached activations at " + file.string());
  }
  ActivationBundle bundle;
  try {
    bundle.activations = read_matrix(file);
  } catch (const FormatError& e) {
    throw BackendError(e.what());
  }
  bundle.token_count = bundle.activations.rows;
  bundle.layer_label = layer_label_;
  return bundle;
}

}  // namespace safe::backend
