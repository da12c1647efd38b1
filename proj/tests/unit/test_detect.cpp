#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "safe/backend/mock.hpp"
#include "safe/core/error.hpp"
#include "safe/core/rng.hpp"
#include "safe/detect/detect.hpp"

using namespace safe;
using namespace safe::detect;

namespace {
struct Recording : backend::Embedder {
  mutable std::vector<std::string> seen;
  std::vector<Vector> embed_raw(std::span<const std::string> texts) const override {
    std::vector<Vector> out;
    for (const auto& t : texts) {
      seen.push_back(t);
      out.push_back(Vector{1.0, static_cast<double>(t.size())});
    }
    return out;
  }
};
}  // namespace

TEST_SUITE("detect") {
  TEST_CASE("combined representation") {
    CHECK(combined_representation("Q?", "A.") == "Q? [SEP] A.");
    Recording r;
    std::vector<ResponseSample> rs{{0, "A.", {}, {}}, {1, "", {}, {}}, {2, "A.", {}, {}}};
    const auto out = embed_responses(r, make_query("q", "Q?"), rs);
    CHECK(r.seen == std::vector<std::string>{"Q? [SEP] A.", "Q? [SEP] ", "Q? [SEP] A."});
    REQUIRE(out[0].embedding);
    CHECK(*out[0].embedding == *out[2].embedding);
    CHECK(out[1].text.empty());
  }

  TEST_CASE("cosine similarity") {
    const Vector v{0.3, -2, 5};
    CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_similarity(Vector{1, 0}, Vector{0, 1}) == 0.0);
    CHECK(std::abs(cosine_similarity(Vector{1, 1}, Vector{1, 0}) - 0.7071067811865475) < 1e-4);
    CHECK_THROWS(cosine_similarity(Vector{0, 0}, Vector{1, 0}));
    CHECK_THROWS(cosine_similarity(Vector{1, 0}, Vector{1, 0, 0}));
  }

  TEST_CASE("identical and orthogonal groups") {
    std::vector<Vector> same(10, Vector{1, 2, 3});
    const auto c1 = cluster(same, 0.1);
    CHECK(c1.num_clusters == 1);
    CHECK(c1.sizes() == std::vector<int>{10});
    std::vector<Vector> two;
    for (int i = 0; i < 5; ++i) two.push_back({1, 0});
    for (int i = 0; i < 5; ++i) two.push_back({0, 1});
    const auto c2 = cluster(two, 0.1);
    CHECK(c2.sizes() == std::vector<int>{5, 5});
    CHECK(c2.assignments == std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    CHECK(c2.members()[1].front() == 5);
    CHECK(cluster(two, 1.0).num_clusters == 1);
    CHECK_THROWS(cluster(std::vector<Vector>{}, 0.1));
  }

  TEST_CASE("merge at exactly the threshold") {
    // distance 1 - cos(60deg) = 0.5 exactly representable? use orthogonal: distance 1
    std::vector<Vector> v{{1, 0}, {0, 1}};
    CHECK(cluster(v, 1.0).num_clusters == 1);
    CHECK(cluster(v, std::nextafter(1.0, 0.0)).num_clusters == 2);
  }

  TEST_CASE("average linkage, not single linkage") {
    // b sits between a and c; single linkage would chain all three at 0.3
    const double t = 0.62;
    std::vector<Vector> v{{1, 0}, {std::cos(t), std::sin(t)}, {std::cos(2 * t), std::sin(2 * t)}};
    const double d_ab = 1 - std::cos(t), d_ac = 1 - std::cos(2 * t);
    const double th = d_ab + 1e-9;
    CHECK((d_ab + d_ac) / 2 > th);
    const auto c = cluster(v, th);
    CHECK(c.num_clusters == 2);
    CHECK(c.assignments == std::vector<int>{0, 0, 1});
  }

  TEST_CASE("random instances agree with the naive oracle") {
    for (int trial = 0; trial < 50; ++trial) {
      auto rng = seeded_rng(trial, "detect-unit");
      std::vector<Vector> pts(6, Vector(3));
      for (auto& p : pts)
        for (double& x : p) x = rng.normal();
      for (auto& p : pts) p[0] += 2.0;
      CHECK(cluster(pts, 0.3).assignments == oracle::agglomerate(pts, 0.3));
    }
  }

  TEST_CASE("entropy values") {
    CHECK(entropy_from_sizes(std::vector<int>{10}, 0.6).entropy == 0.0);
    CHECK_FALSE(entropy_from_sizes(std::vector<int>{10}, 0.6).flagged);
    const auto two = entropy_from_sizes(std::vector<int>{5, 5}, 0.6);
    CHECK(std::abs(two.entropy - 0.6931471805599453) < 1e-12);
    CHECK(two.flagged);
    CHECK(two.probabilities == std::vector<double>{0.5, 0.5});
    CHECK(std::abs(shannon_entropy(std::vector<int>(10, 1)) - std::log(10.0)) < 1e-12);
    CHECK(std::abs(shannon_entropy(std::vector<int>{7, 2, 1}) - 0.8018185525433372) < 1e-12);
    CHECK(std::abs(shannon_entropy(std::vector<int>{4, 3, 2, 1}) - 1.2798542258336674) < 1e-12);
    CHECK(std::abs(shannon_entropy(std::vector<int>{8, 1, 1}) - 0.639031859650177) < 1e-12);
  }

  TEST_CASE("entropy from a clustering") {
    Clustering c;
    c.assignments = {0, 1, 0, 2};
    c.num_clusters = 3;
    const auto r = entropy(c, 4, 0.6);
    CHECK(r.cluster_sizes == std::vector<int>{2, 1, 1});
    CHECK(std::abs(r.entropy - oracle::entropy({2, 1, 1})) < 1e-12);
    CHECK_THROWS(entropy(c, 5, 0.6));
  }
}
