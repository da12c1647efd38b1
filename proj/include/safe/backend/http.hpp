#pragma once

#include <string>

#include "safe/backend/activations.hpp"
#include "safe/backend/embedder.hpp"
#include "safe/backend/generator.hpp"

namespace safe::backend {

struct HttpEndpoint {
  // "http://host:port" or "http://host:port/path". Without a path the
  // adapter appends its default route.
  std::string url;
  std::string api_key;
  std::string model;
  int timeout_seconds = 120;
};

// Reads the URL from `url_env` and the key from SAFE_API_KEY. Throws
// ConfigError when the URL variable is unset.
HttpEndpoint endpoint_from_env(const char* url_env, std::string model);

// POST /v1/chat/completions with a single user message.
class ChatCompletionGenerator : public TextGenerator {
 public:
  explicit ChatCompletionGenerator(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::string generate(const GenerationRequest& request) const override;

 private:
  HttpEndpoint endpoint_;
};

// POST /v1/embeddings with the whole batch as `input`.
class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::vector<Vector> embed_raw(std::span<const std::string> texts) const override;

 private:
  HttpEndpoint endpoint_;
};

// POST /v1/activations {"prompt", "completion", "layer"} returning
// {"layer": str, "activations": [[float]]}.
class HttpActivationSource : public ActivationSource {
 public:
  HttpActivationSource(HttpEndpoint endpoint, std::string layer_label)
      : endpoint_(std::move(endpoint)), layer_label_(std::move(layer_label)) {}
  ActivationBundle capture(std::string_view prompt, std::string_view completion) const override;

 private:
  HttpEndpoint endpoint_;
  std::string layer_label_;
};

// Plain GET returning the body. Used by catalog import.
std::string http_get(const std::string& url, int timeout_seconds = 60);

}  // namespace safe::backend
