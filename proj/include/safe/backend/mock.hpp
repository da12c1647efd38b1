#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "safe/backend/embedder.hpp"
#include "safe/backend/generator.hpp"

namespace safe::backend {

// Replies from fixed response lists. The first rule whose substrings all
// occur in the prompt wins; request i of a batch gets responses[i % size].
class ScriptedGenerator : public TextGenerator {
 public:
  struct Rule {
    std::vector<std::string> contains;
    std::vector<std::string> responses;
  };

  ScriptedGenerator() = default;
  explicit ScriptedGenerator(std::vector<Rule> rules);

  // JSON: {"rules": [{"contains": [str], "responses": [str]}]}
  static ScriptedGenerator load_json(const std::filesystem::path& path);

  void add_rule(std::vector<std::string> contains, std::vector<std::string> responses);
  std::string generate(const GenerationRequest& request) const override;

 private:
  std::vector<Rule> rules_;
};

class FunctionGenerator : public TextGenerator {
 public:
  using Fn = std::function<std::string(const GenerationRequest&)>;
  explicit FunctionGenerator(Fn fn) : fn_(std::move(fn)) {}
  std::string generate(const GenerationRequest& request) const override { return fn_(request); }

 private:
  Fn fn_;
};

// Offline stand-in for a sampling LLM. The base question (text before the
// first " - NOTE") picks a handful of candidate answers; the request seed picks
// among them. Prompts carrying a note spread over fewer candidates.
class MockGenerator : public TextGenerator {
 public:
  explicit MockGenerator(std::uint64_t seed) : seed_(seed) {}
  std::string generate(const GenerationRequest& request) const override;

 private:
  std::uint64_t seed_;
};

// Bag-of-words embedder: each lowercased word token maps to a fixed
// pseudo-random Gaussian direction; a text embeds to the sum of its tokens.
class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dimension = 256, std::uint64_t seed = 0);
  std::vector<Vector> embed_raw(std::span<const std::string> texts) const override;
  std::size_t dimension() const override { return dimension_; }

  Vector embed_text(const std::string& text) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// Exact-text lookup with a fallback embedder for everything else.
class TableEmbedder : public Embedder {
 public:
  TableEmbedder(std::map<std::string, Vector> table, std::shared_ptr<const Embedder> fallback);
  std::vector<Vector> embed_raw(std::span<const std::string> texts) const override;
  std::size_t dimension() const override;

 private:
  std::map<std::string, Vector> table_;
  std::shared_ptr<const Embedder> fallback_;
};

}  // namespace safe::backend
