#include "safe/backend/http.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "safe/core/error.hpp"

namespace safe::backend {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url, const std::string& default_path) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("url", "endpoint URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = url;
    out.path = default_path;
  } else {
    out.origin = url.substr(0, path_start);
    out.path = url.substr(path_start);
    if (out.path == "/") out.path = default_path;
  }
  return out;
}

nlohmann::json post_json(const HttpEndpoint& ep, const std::string& default_path, const nlohmann::json& body) {
  const auto target = split_url(ep.url, default_path);
  httplib::Client client(target.origin);
  client.set_connection_timeout(ep.timeout_seconds, 0);
  client.set_read_timeout(ep.timeout_seconds, 0);
  client.set_write_timeout(ep.timeout_seconds, 0);
  httplib::Headers headers;
  if (!ep.api_key.empty()) headers.emplace("Authorization", "Bearer " + ep.api_key);

  auto res = client.Post(target.path, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendError("POST " + ep.url + target.path + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("POST " + target.origin + target.path + " returned HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed backend reply: ") + e.what());
  }
}

}  // namespace

HttpEndpoint endpoint_from_env(const char* url_env, std::string model) {
  const char* url = std::getenv(url_env);
  if (url == nullptr || *url == '\0') throw ConfigError(url_env, "environment variable is not set");
  HttpEndpoint ep;
  ep.url = url;
  if (const char* key = std::getenv("SAFE_API_KEY")) ep.api_key = key;
  ep.model = std::move(model);
  return ep;
}

std::string ChatCompletionGenerator::generate(const GenerationRequest& request) const {
  nlohmann::json body{{"model", endpoint_.model},
                      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
                      {"temperature", request.temperature},
                      {"max_tokens", request.max_tokens}};
  if (request.seed) body["seed"] = *request.seed;
  const auto reply = post_json(endpoint_, "/v1/chat/completions", body);
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string{} : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat completion reply: ") + e.what());
  }
}

std::vector<Vector> HttpEmbedder::embed_raw(std::span<const std::string> texts) const {
  nlohmann::json body{{"model", endpoint_.model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto reply = post_json(endpoint_, "/v1/embeddings", body);
  std::vector<Vector> out(texts.size());
  try {
    const auto& data = reply.at("data");
    if (data.size() != texts.size()) throw BackendError("embedding reply has wrong item count");
    for (std::size_t k = 0; k < data.size(); ++k) {
      const std::size_t i = data[k].contains("index") ? data[k]["index"].get<std::size_t>() : k;
      if (i >= out.size() || !out[i].empty()) throw BackendError("embedding reply has bad index");
      out[i] = data[k].at("embedding").get<Vector>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed embedding reply: ") + e.what());
  }
  return out;
}

ActivationBundle HttpActivationSource::capture(std::string_view prompt, std::string_view completion) const {
  nlohmann::json body{{"prompt", prompt}, {"completion", completion}, {"layer", layer_label_}};
  if (!endpoint_.model.empty()) body["model"] = endpoint_.model;
  const auto reply = post_json(endpoint_, "/v1/activations", body);
  ActivationBundle bundle;
  try {
    const auto rows = reply.at("activations").get<std::vector<Vector>>();
    bundle.layer_label = reply.value("layer", layer_label_);
    if (rows.empty()) throw BackendError("activation reply has no rows");
    bundle.activations = Matrix(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != bundle.activations.cols) throw BackendError("ragged activation rows");
      std::copy(rows[r].begin(), rows[r].end(), bundle.activations.row(r).begin());
    }
    bundle.token_count = rows.size();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed activation reply: ") + e.what());
  }
  return bundle;
}

std::string http_get(const std::string& url, int timeout_seconds) {
  const auto target = split_url(url, "/");
  httplib::Client client(target.origin);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  auto res = client.Get(target.path);
  if (!res) throw BackendError("GET " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw BackendError("GET " + url + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace safe::backend
