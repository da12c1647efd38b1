#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "safe/backend/activations.hpp"
#include "safe/backend/catalog.hpp"
#include "safe/backend/generator.hpp"
#include "safe/backend/mock.hpp"
#include "safe/backend/tensor_file.hpp"
#include "safe/core/error.hpp"
#include "safe/core/text.hpp"

using namespace safe;
using namespace safe::backend;

TEST_SUITE("backend") {
  TEST_CASE("scripted batch returns the strings in index order") {
    std::vector<std::string> ten;
    for (int i = 0; i < 10; ++i) ten.push_back("r" + std::to_string(i));
    ScriptedGenerator g({{{"Q"}, ten}});
    const auto out = generate_batch(g, make_query("q", "Q?"), 10, BatchParams{});
    REQUIRE(out.size() == 10);
    for (int i = 0; i < 10; ++i) {
      CHECK(out[i].index == i);
      CHECK(out[i].text == ten[i]);
    }
  }

  TEST_CASE("first matching rule wins") {
    ScriptedGenerator g;
    g.add_rule({"alpha", "beta"}, {"both"});
    g.add_rule({"alpha"}, {"one"});
    GenerationRequest r;
    r.prompt = "alpha beta";
    CHECK(g.generate(r) == "both");
    r.prompt = "alpha";
    CHECK(g.generate(r) == "one");
    r.prompt = "gamma";
    CHECK_THROWS_AS(g.generate(r), BackendError);
  }

  TEST_CASE("script JSON loads") {
    const auto dir = testing::temp_dir("script");
    std::ofstream(dir / "s.json") << R"({"rules":[{"contains":["x"],"responses":["a","b"]}]})";
    auto g = ScriptedGenerator::load_json(dir / "s.json");
    GenerationRequest r;
    r.prompt = "x";
    r.sample_index = 3;
    CHECK(g.generate(r) == "b");
    std::ofstream(dir / "bad.json") << "{";
    CHECK_THROWS_AS(ScriptedGenerator::load_json(dir / "bad.json"), FormatError);
  }

  TEST_CASE("transient failures are retried") {
    std::mutex m;
    std::map<int, int> attempts;
    FunctionGenerator g([&](const GenerationRequest& r) {
      std::lock_guard lock(m);
      if (attempts[r.sample_index]++ == 0) throw BackendError("flaky");
      return std::string("ok");
    });
    BatchParams p;
    p.retry_budget = 1;
    const auto out = generate_batch(g, make_query("q", "Q?"), 6, p);
    CHECK(out.size() == 6);
  }

  TEST_CASE("incomplete batch after retries") {
    FunctionGenerator g([](const GenerationRequest& r) -> std::string {
      if (r.sample_index == 9) throw BackendError("down");
      return "fine";
    });
    try {
      generate_batch(g, make_query("q", "Q?"), 10, BatchParams{});
      FAIL("expected BackendError");
    } catch (const BackendError& e) {
      CHECK(std::string(e.what()).find("incomplete batch") != std::string::npos);
      CHECK(std::string(e.what()).find("9 of 10") != std::string::npos);
    }
    CHECK_THROWS(generate_batch(g, make_query("q", "Q?"), 1, BatchParams{}));
  }

  TEST_CASE("request seeds are offset by sample index") {
    FunctionGenerator g([](const GenerationRequest& r) { return std::to_string(r.seed.value()); });
    BatchParams p;
    p.seed = 100;
    const auto out = generate_batch(g, make_query("q", "Q?"), 3, p);
    CHECK(out[0].text == "100");
    CHECK(out[2].text == "102");
  }

  TEST_CASE("mock generator is deterministic and narrows under a note") {
    MockGenerator g(1);
    BatchParams p;
    p.seed = 5;
    const auto a = generate_batch(g, make_query("q", "Why is the sky blue?"), 10, p);
    const auto b = generate_batch(g, make_query("q", "Why is the sky blue?"), 10, p);
    CHECK(a == b);
    std::set<std::string> plain, noted;
    for (std::uint64_t s = 0; s < 20; ++s) {
      p.seed = s;
      for (const auto& r : generate_batch(g, make_query("q", "Why is the sky blue?"), 10, p)) plain.insert(r.text);
      for (const auto& r : generate_batch(g, make_query("q", "Why is the sky blue? - NOTE: be brief"), 10, p))
        noted.insert(r.text);
    }
    CHECK(noted.size() <= 2);
  }

  TEST_CASE("embeddings are unit norm and deterministic") {
    HashEmbedder e(64, 3);
    const std::vector<std::string> texts{"a", "b", "a"};
    const auto v = embed(e, texts);
    for (const auto& x : v) {
      double n = 0;
      for (double d : x) n += d * d;
      CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-9);
    }
    CHECK(v[0] == v[2]);
    CHECK(v[0] != v[1]);
  }

  TEST_CASE("embed rejects bad replies") {
    struct Fixed : Embedder {
      std::vector<Vector> reply;
      std::size_t dim = 0;
      std::vector<Vector> embed_raw(std::span<const std::string>) const override { return reply; }
      std::size_t dimension() const override { return dim; }
    } f;
    const std::vector<std::string> two{"x", "y"};
    f.reply = {{1, 0}};
    CHECK_THROWS_AS(embed(f, two), BackendError);
    f.reply = {{1, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(embed(f, two), DimensionError);
    f.reply = {{1, 0}, {0, 0}};
    CHECK_THROWS_AS(embed(f, two), BackendError);
    f.reply = {{1, 0}, {0, 1}};
    f.dim = 3;
    CHECK_THROWS_AS(embed(f, two), DimensionError);
    CHECK(embed(f, std::vector<std::string>{}).empty());
  }

  TEST_CASE("table embedder falls back") {
    auto fb = std::make_shared<HashEmbedder>(4, 0);
    TableEmbedder t({{"known", Vector{1, 0, 0, 0}}}, fb);
    const auto v = embed(t, std::vector<std::string>{"known", "other"});
    CHECK(v[0] == Vector{1, 0, 0, 0});
    CHECK(v[1] == embed_one(*fb, "other"));
    TableEmbedder strict({{"known", Vector{1, 0}}}, nullptr);
    CHECK_THROWS_AS(embed(strict, std::vector<std::string>{"nope"}), BackendError);
  }

  TEST_CASE("synthetic activations") {
    SyntheticActivationSource s(7, 16);
    const auto a = capture_activations(&s, "p", "one two three four five");
    CHECK(a.token_count == 5);
    CHECK(a.activations.rows == 5);
    CHECK(a.activations.cols == 16);
    CHECK(capture_activations(&s, "p", "one two three four five").activations == a.activations);
    CHECK_THROWS_WITH(capture_activations(&s, "p", "   "), doctest::Contains("no tokens to encode"));
    CHECK_THROWS_WITH(capture_activations(nullptr, "p", "x"), doctest::Contains("activation source unavailable"));
  }

  TEST_CASE("tensor container round-trip") {
    const auto dir = testing::temp_dir("tensor");
    Matrix m(3, 4);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = 0.25 * static_cast<double>(i) - 1.0;
    write_matrix(dir / "m.tensor", m);
    CHECK(read_matrix(dir / "m.tensor") == m);
    write_vector(dir / "v.tensor", Vector{0.5, -2});
    CHECK(read_vector(dir / "v.tensor") == Vector{0.5, -2});
    CHECK_THROWS(read_vector(dir / "m.tensor"));
    CHECK_THROWS(read_matrix(dir / "v.tensor"));

    auto bytes = testing::read_bytes(dir / "m.tensor");
    std::ofstream(dir / "trail.tensor", std::ios::binary) << bytes << 'x';
    CHECK_THROWS_AS(read_tensor(dir / "trail.tensor"), FormatError);
    std::ofstream(dir / "short.tensor", std::ios::binary) << bytes.substr(0, bytes.size() - 2);
    CHECK_THROWS_AS(read_tensor(dir / "short.tensor"), FormatError);
    CHECK_THROWS(read_tensor(dir / "missing.tensor"));
  }

  TEST_CASE("file activation source") {
    const auto dir = testing::temp_dir("actfile");
    Matrix m(2, 3, 0.5);
    write_matrix(dir / "single.tensor", m);
    TensorFileActivationSource one(dir / "single.tensor");
    const auto a = capture_activations(&one, "p", "c");
    CHECK(a.activations == m);
    CHECK(a.token_count == 2);

    std::filesystem::create_directories(dir / "keyed");
    write_matrix(dir / "keyed" / (activation_key("P", "C") + ".tensor"), m);
    TensorFileActivationSource keyed(dir / "keyed");
    CHECK(capture_activations(&keyed, "P", "C").activations == m);
    CHECK_THROWS(capture_activations(&keyed, "P", "other"));
    CHECK(activation_key("a", "b").size() == 16);
    CHECK(activation_key("a", "b") != activation_key("ab", ""));
  }

  TEST_CASE("catalog lookup keeps input order and soft-misses") {
    FeatureCatalog c;
    c.insert({1, "references to the Harry Potter franchise", std::nullopt, false});
    c.insert({3, "mentions of the term \"fantasy\"", 0.02, false});
    const std::vector<int> idx{3, 1};
    const auto got = lookup_descriptions(idx, c);
    REQUIRE(got.size() == 2);
    CHECK(got[0].description == "mentions of the term \"fantasy\"");
    CHECK(got[1].description == "references to the Harry Potter franchise");
    CHECK(lookup_descriptions(std::vector<int>{}, c).empty());
    const auto miss = lookup_descriptions(std::vector<int>{99}, c);
    CHECK(miss[0].placeholder);
    CHECK(miss[0].description == "feature 99");
    CHECK_THROWS(c.insert({1, "dup", std::nullopt, false}));
    CHECK_THROWS(c.insert({-1, "neg", std::nullopt, false}));
    CHECK_THROWS(c.insert({5, "", std::nullopt, false}));
  }

  TEST_CASE("catalog JSONL round-trip and densities") {
    FeatureCatalog c;
    c.insert({0, "a", 0.5, false});
    c.insert({2, "b \"quoted\"", std::nullopt, false});
    std::stringstream ss;
    c.write_jsonl(ss);
    const auto back = FeatureCatalog::parse_jsonl(ss);
    CHECK(back.entries() == c.entries());
    CHECK(back.densities(3) == Vector{0.5, 1.0, 1.0});
    auto d = back;
    CHECK(d.cache_densities(Vector{0.1, 0.2, 0.3}) == 2);
    CHECK(d.densities(3) == Vector{0.1, 1.0, 0.3});
    std::istringstream bad("{\"index\": 1, \"description\": \"x\"}\nnot json\n");
    CHECK_THROWS_WITH(FeatureCatalog::parse_jsonl(bad), doctest::Contains("line 2"));
  }
}
