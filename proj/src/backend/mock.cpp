#include "safe/backend/mock.hpp"

#include <array>
#include <fstream>

#include "json.hpp"

#include "safe/core/error.hpp"
#include "safe/core/rng.hpp"
#include "safe/core/text.hpp"

namespace safe::backend {

ScriptedGenerator::ScriptedGenerator(std::vector<Rule> rules) {
  for (auto& r : rules) add_rule(std::move(r.contains), std::move(r.responses));
}

ScriptedGenerator ScriptedGenerator::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open generator script " + path.string());
  ScriptedGenerator gen;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& r : j.at("rules")) {
      gen.add_rule(r.value("contains", std::vector<std::string>{}), r.at("responses").get<std::vector<std::string>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad generator script " + path.string() + ": " + e.what());
  }
  return gen;
}

void ScriptedGenerator::add_rule(std::vector<std::string> contains, std::vector<std::string> responses) {
  if (responses.empty()) throw Error("scripted rule needs at least one response");
  rules_.push_back(Rule{std::move(contains), std::move(responses)});
}

std::string ScriptedGenerator::generate(const GenerationRequest& request) const {
  for (const auto& rule : rules_) {
    bool match = true;
    for (const auto& needle : rule.contains) {
      if (request.prompt.find(needle) == std::string::npos) {
        match = false;
        break;
      }
    }
    if (match) {
      const auto i = static_cast<std::size_t>(request.sample_index) % rule.responses.size();
      return rule.responses[i];
    }
  }
  throw BackendError("scripted generator has no rule for prompt: " + request.prompt);
}

namespace {

constexpr std::array<std::string_view, 48> kWordPool = {
    "river",   "copper", "seven",  "lantern", "orbit",   "violet",  "harbor", "granite", "echo",   "meadow",
    "signal",  "amber",  "cedar",  "prism",   "summit",  "velvet",  "quartz", "falcon",  "ember",  "tide",
    "marble",  "nickel", "willow", "cobalt",  "thunder", "saffron", "beacon", "glacier", "arrow",  "plume",
    "cipher",  "dune",   "fern",   "garnet",  "horizon", "ivory",   "jasper", "kite",    "lumen",  "mosaic",
    "nebula",  "onyx",   "pollen", "quill",   "ripple",  "sable",   "tundra", "umber"};

std::string candidate_answer(std::uint64_t seed, const std::string& base, std::size_t k) {
  auto rng = seeded_rng(seed, "mock-candidate:" + base + ":" + std::to_string(k));
  std::string out = "Answer:";
  for (int w = 0; w < 7; ++w) {
    out += ' ';
    out += kWordPool[rng.uniform_index(kWordPool.size())];
  }
  out += '.';
  return out;
}

}  // namespace

std::string MockGenerator::generate(const GenerationRequest& request) const {
  const auto note = request.prompt.find(" - NOTE");
  const std::string base = request.prompt.substr(0, note);
  const bool has_note = note != std::string::npos;
  const std::uint64_t h = derive_seed(seed_, "mock-spread:" + base);
  const std::size_t spread = has_note ? 1 + h % 2 : 1 + (h >> 8) % 4;
  const std::uint64_t request_seed = request.seed.value_or(static_cast<std::uint64_t>(request.sample_index));
  auto rng = seeded_rng(seed_ ^ splitmix64(request_seed), "mock-gen:" + request.prompt);
  return candidate_answer(seed_, base, rng.uniform_index(spread));
}

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw Error("embedding dimension must be positive");
}

Vector HashEmbedder::embed_text(const std::string& text) const {
  auto tokens = word_tokens(text);
  if (tokens.empty()) tokens.push_back(text);
  Vector out(dimension_, 0.0);
  for (const auto& tok : tokens) {
    auto rng = seeded_rng(seed_, "hash-embed:" + tok);
    for (double& x : out) x += rng.normal();
  }
  return out;
}

std::vector<Vector> HashEmbedder::embed_raw(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_text(t));
  return out;
}

TableEmbedder::TableEmbedder(std::map<std::string, Vector> table, std::shared_ptr<const Embedder> fallback)
    : table_(std::move(table)), fallback_(std::move(fallback)) {}

std::size_t TableEmbedder::dimension() const {
  if (fallback_) return fallback_->dimension();
  return table_.empty() ? 0 : table_.begin()->second.size();
}

std::vector<Vector> TableEmbedder::embed_raw(std::span<const std::string> texts) const {
  std::vector<Vector> out(texts.size());
  std::vector<std::string> misses;
  std::vector<std::size_t> miss_pos;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto it = table_.find(texts[i]);
    if (it != table_.end()) {
      out[i] = it->second;
    } else {
      misses.push_back(texts[i]);
      miss_pos.push_back(i);
    }
  }
  if (!misses.empty()) {
    if (!fallback_) throw BackendError("no table embedding for '" + misses.front() + "'");
    auto vecs = fallback_->embed_raw(misses);
    for (std::size_t k = 0; k < miss_pos.size(); ++k) out[miss_pos[k]] = std::move(vecs.at(k));
  }
  return out;
}

}  // namespace safe::backend
