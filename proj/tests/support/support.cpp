#include "support.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <unistd.h>

#include "safe/core/rng.hpp"
#include "safe/core/text.hpp"

namespace safe::testing {

KeywordActivationSource::KeywordActivationSource(std::map<std::string, int> keywords, std::size_t width,
                                                 std::string label)
    : keywords_(std::move(keywords)), width_(width), label_(std::move(label)) {}

backend::ActivationBundle KeywordActivationSource::capture(std::string_view, std::string_view completion) const {
  const auto tokens = word_tokens(completion);
  backend::ActivationBundle b;
  b.layer_label = label_;
  b.token_count = tokens.size();
  b.activations = Matrix(tokens.size(), width_);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    auto it = keywords_.find(tokens[t]);
    if (it != keywords_.end()) b.activations(t, static_cast<std::size_t>(it->second)) = 1.0;
  }
  return b;
}

std::vector<Vector> TextHashEmbedder::embed_raw(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  for (const auto& t : texts) {
    auto rng = seeded_rng(derive_seed(seed_, t), "text-hash");
    Vector v(dimension_);
    for (double& x : v) x = rng.normal();
    out.push_back(std::move(v));
  }
  return out;
}

sae::SaeModel identity_sae(std::size_t width) {
  Matrix w_enc(width + 1, width);
  Matrix w_dec(width, width + 1);
  for (std::size_t i = 0; i < width; ++i) {
    w_enc(i, i) = 1.0;
    w_dec(i, i) = 1.0;
  }
  return sae::SaeModel(std::move(w_enc), Vector(width + 1, 0.0), std::move(w_dec), Vector(width, 0.0));
}

int ScenarioBuilder::add_feature(FeatureSpec spec) {
  features_.push_back(std::move(spec));
  return static_cast<int>(features_.size() - 1);
}

void ScenarioBuilder::add_question(std::string text) { questions_.push_back(std::move(text)); }

pipeline::Backends ScenarioBuilder::build(std::shared_ptr<const backend::TextGenerator> generator) const {
  const std::size_t n = features_.size();
  std::map<std::string, int> keywords;
  auto catalog = std::make_shared<backend::FeatureCatalog>();
  std::map<std::string, Vector> table;
  Vector e0(kDimension, 0.0);
  e0[0] = 1.0;
  for (const auto& q : questions_) table[q] = e0;
  pipeline::Backends b;
  b.densities.assign(n + 1, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = features_[i];
    keywords[f.keyword] = static_cast<int>(i);
    b.densities[i] = f.density;
    catalog->insert(FeatureCatalogEntry{static_cast<int>(i), f.description, f.density, false});
    Vector v(kDimension, 0.0);
    v[0] = f.cos_to_query;
    v[i + 1] = std::sqrt(1.0 - f.cos_to_query * f.cos_to_query);
    table[f.description] = v;
  }
  b.generator = std::move(generator);
  b.embedder = std::make_shared<backend::TableEmbedder>(std::move(table),
                                                         std::make_shared<TextHashEmbedder>(kDimension));
  b.activations = std::make_shared<KeywordActivationSource>(std::move(keywords), n);
  b.sae = std::make_shared<sae::SaeModel>(identity_sae(n));
  b.catalog = std::move(catalog);
  return b;
}

namespace {

bench::DatasetRecord record(std::string id, std::string q, std::string gold) {
  return {std::move(id), std::move(q), {std::move(gold)}, std::nullopt, "scenario"};
}

constexpr const char* kGlandA = "The pituitary gland near the hypothalamus produces thyroxine.";
constexpr const char* kGlandB = "The adrenal glands produce thyroxine.";
constexpr const char* kGlandC = "The pancreas produces thyroxine.";
constexpr const char* kGlandD = "According to folklore the heart produces thyroxine, a myth.";
constexpr const char* kGlandRight = "The thyroid gland produces thyroxine.";

void add_gland_features(ScenarioBuilder& s) {
  s.add_feature({"pituitary", "anatomy of the brain and skull base", 0.02, 0.8});
  s.add_feature({"hypothalamus", "neural control of body temperature", 0.03, 0.82});
  s.add_feature({"adrenal", "stress response and cortisol release", 0.04, 0.85});
  s.add_feature({"pancreas", kConvergenceTop, 0.02, 0.9});
  s.add_feature({"folklore", kConvergenceOutlier, 0.03, 0.1});
  s.add_feature({"myth", "fictional creatures in fantasy novels", 0.08, 0.05});
}

std::vector<std::string> gland_baseline() {
  return {kGlandA, kGlandA, kGlandA, kGlandA, kGlandB, kGlandB, kGlandB, kGlandC, kGlandC, kGlandD};
}

}  // namespace

Scenario convergence_scenario() {
  ScenarioBuilder s;
  add_gland_features(s);
  s.add_question(kConvergenceQuestion);
  auto gen = std::make_shared<backend::ScriptedGenerator>();
  gen->add_rule({" - NOTE"}, {kGlandRight});
  gen->add_rule({kConvergenceQuestion}, gland_baseline());
  Scenario sc;
  sc.records.push_back(record("gland", kConvergenceQuestion, "thyroid"));
  sc.backends = s.build(gen);
  return sc;
}

Scenario singleton_scenario() {
  ScenarioBuilder s;
  add_gland_features(s);
  const std::string q = "Name a gland that nobody agrees on.";
  s.add_question(q);
  auto gen = std::make_shared<backend::FunctionGenerator>([](const backend::GenerationRequest& r) {
    return "Variant " + std::to_string(r.seed.value_or(0)) + "-" + std::to_string(r.sample_index) + " says the pituitary.";
  });
  Scenario sc;
  sc.records.push_back(record("singleton", q, "thyroid"));
  sc.backends = s.build(gen);
  return sc;
}

Scenario grid_scenario() {
  const std::string q1 = "Which planet in our solar system has the most confirmed moons?";
  const std::string q2 = "At what temperature in Celsius does water boil at sea level?";
  const std::string q3 = kConvergenceQuestion;
  const std::string wrong = "Jupiter has the most moons according to astrology charts.";
  const std::string right = "Saturn holds the record for confirmed moons.";
  const std::string other = "Neptune probably has the most moons.";
  ScenarioBuilder s;
  add_gland_features(s);
  s.add_feature({"astrology", "horoscopes and zodiac signs", 0.08, 0.8});
  s.add_feature({"record", "official tallies of natural satellites", 0.03, 0.5});
  for (const auto& q : {q1, q2, q3}) s.add_question(q);

  auto gen = std::make_shared<backend::ScriptedGenerator>();
  gen->add_rule({q1, "official tallies of natural satellites"}, {right});
  gen->add_rule({q1, "horoscopes and zodiac signs"}, {wrong});
  gen->add_rule({q1}, {wrong, wrong, wrong, wrong, wrong, wrong, wrong, wrong, right, other});
  gen->add_rule({q2}, {"Water boils at 100 degrees Celsius at sea level."});
  gen->add_rule({q3, std::string("do not consider ") + kConvergenceOutlier}, {kGlandRight});
  gen->add_rule({q3}, gland_baseline());

  Scenario sc;
  sc.records = {record("q1-moons", q1, "Saturn"), record("q2-boil", q2, "100"), record("q3-gland", q3, "thyroid")};
  sc.backends = s.build(gen);
  return sc;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("safe-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace safe::testing
