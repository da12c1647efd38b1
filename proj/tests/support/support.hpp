#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "safe/backend/activations.hpp"
#include "safe/backend/embedder.hpp"
#include "safe/backend/mock.hpp"
#include "safe/bench/dataset.hpp"
#include "safe/pipeline/pipeline.hpp"

namespace safe::testing {

// Each word token of the completion becomes one activation row: one-hot at
// the keyword's dimension, zero otherwise.
class KeywordActivationSource : public backend::ActivationSource {
 public:
  KeywordActivationSource(std::map<std::string, int> keywords, std::size_t width, std::string label = "keyword");
  backend::ActivationBundle capture(std::string_view prompt, std::string_view completion) const override;

 private:
  std::map<std::string, int> keywords_;
  std::size_t width_;
  std::string label_;
};

// Whole-text hash to a Gaussian direction; distinct texts are nearly orthogonal.
class TextHashEmbedder : public backend::Embedder {
 public:
  explicit TextHashEmbedder(std::size_t dimension = 512, std::uint64_t seed = 7) : dimension_(dimension), seed_(seed) {}
  std::vector<Vector> embed_raw(std::span<const std::string> texts) const override;
  std::size_t dimension() const override { return dimension_; }

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// Identity encoder over `width` dims plus one dead feature, relu.
sae::SaeModel identity_sae(std::size_t width);

struct FeatureSpec {
  std::string keyword;
  std::string description;
  double density = 0.0;
  double cos_to_query = 0.0;
};

// Keyword features, catalog, densities, and an embedder that gives each
// description an exact cosine to every registered question.
class ScenarioBuilder {
 public:
  static constexpr std::size_t kDimension = 512;

  int add_feature(FeatureSpec spec);
  void add_question(std::string text);
  pipeline::Backends build(std::shared_ptr<const backend::TextGenerator> generator) const;

 private:
  std::vector<FeatureSpec> features_;
  std::vector<std::string> questions_;
};

struct Scenario {
  std::vector<bench::DatasetRecord> records;
  pipeline::Backends backends;
};

// [4,3,2,1] baseline; any prompt carrying a note gets ten identical replies.
// Its features score cosines {0.8, 0.82, 0.85, 0.9, 0.1}.
Scenario convergence_scenario();
inline constexpr const char* kConvergenceQuestion = "What gland produces thyroxine?";
inline constexpr const char* kConvergenceOutlier = "folk remedies and old wives tales";
inline constexpr const char* kConvergenceTop = "digestive enzyme secretion";

// Every sample of every batch is distinct.
Scenario singleton_scenario();

// Three records where (0.6, 0.05) is the only cell answering all of them.
Scenario grid_scenario();

std::filesystem::path temp_dir(const std::string& name);
std::string read_bytes(const std::filesystem::path& p);

}  // namespace safe::testing
