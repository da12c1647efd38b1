#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "safe/backend/embedder.hpp"
#include "safe/core/types.hpp"

namespace safe::detect {

inline constexpr std::string_view kResponseSeparator = " [SEP] ";

// query + separator + response, the text that gets embedded per response.
std::string combined_representation(std::string_view query_text, std::string_view response_text);

// Sets each sample's embedding to embed(combined_representation(...)).
std::vector<ResponseSample> embed_responses(const backend::Embedder& embedder, const Query& query,
                                            std::vector<ResponseSample> responses);

// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws DimensionError on width
// mismatch and Error("undefined similarity") on a zero-norm input.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct Clustering {
  static constexpr std::string_view linkage = "average";

  // Cluster id per response. Ids are numbered by each cluster's lowest member
  // index, so response 0 is always in cluster 0.
  std::vector<int> assignments;
  int num_clusters = 0;
  double distance_threshold = 0.0;

  std::vector<int> sizes() const;
  std::vector<std::vector<int>> members() const;

  bool operator==(const Clustering&) const = default;
};

// Average-linkage (UPGMA) agglomerative clustering over cosine distance
// 1 - cos. Merges while the closest pair's mean pairwise distance is
// <= distance_threshold. Exact ties merge the pair whose (smaller, larger)
// lowest-member indices are lexicographically smallest.
Clustering cluster(std::span<const Vector> embeddings, double distance_threshold);

// Shannon entropy in nats of the size distribution; zero-size entries contribute 0.
double shannon_entropy(std::span<const int> cluster_sizes);

EntropyReport entropy_from_sizes(std::span<const int> cluster_sizes, double entropy_threshold);
// n must equal clustering.assignments.size().
EntropyReport entropy(const Clustering& clustering, std::size_t n, double entropy_threshold);

}  // namespace safe::detect
