#include "safe/detect/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "safe/core/error.hpp"

namespace safe::detect {

std::string combined_representation(std::string_view query_text, std::string_view response_text) {
  std::string rep;
  rep.reserve(query_text.size() + kResponseSeparator.size() + response_text.size());
  rep.append(query_text);
  rep.append(kResponseSeparator);
  rep.append(response_text);
  return rep;
}

std::vector<ResponseSample> embed_responses(const backend::Embedder& embedder, const Query& query,
                                            std::vector<ResponseSample> responses) {
  if (responses.empty()) throw Error("embed_responses needs at least one response");
  std::vector<std::string> reps;
  reps.reserve(responses.size());
  for (const auto& r : responses) reps.push_back(combined_representation(query.text, r.text));
  auto vectors = backend::embed(embedder, reps);
  for (std::size_t i = 0; i < responses.size(); ++i) responses[i].embedding = std::move(vectors[i]);
  return responses;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine_similarity on vectors of different width");
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (!(aa > 0.0) || !(bb > 0.0)) throw Error("undefined similarity: zero-norm vector");
  return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

std::vector<int> Clustering::sizes() const {
  std::vector<int> out(static_cast<std::size_t>(num_clusters), 0);
  for (int a : assignments) ++out[static_cast<std::size_t>(a)];
  return out;
}

std::vector<std::vector<int>> Clustering::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_clusters));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    out[static_cast<std::size_t>(assignments[i])].push_back(static_cast<int>(i));
  }
  return out;
}

Clustering cluster(std::span<const Vector> embeddings, double distance_threshold) {
  const std::size_t n = embeddings.size();
  if (n == 0) throw Error("cluster needs at least one embedding");

  // sum[a][b]: total pairwise distance between active clusters a and b.
  std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 1.0 - cosine_similarity(embeddings[i], embeddings[j]);
      sum[i][j] = sum[j][i] = d;
    }
  }
  // Each active cluster is keyed by its lowest member index.
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});

  for (std::size_t remaining = n; remaining > 1; --remaining) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0;
    // Ascending (a, b) scan with strict '<' realises the lexicographic tie-break.
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        const double avg = sum[a][b] / static_cast<double>(size[a] * size[b]);
        if (avg < best) {
          best = avg;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (!(best <= distance_threshold)) break;
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == best_a || c == best_b) continue;
      sum[best_a][c] += sum[best_b][c];
      sum[c][best_a] = sum[best_a][c];
    }
    size[best_a] += size[best_b];
    active[best_b] = false;
    parent[best_b] = best_a;
  }

  Clustering out;
  out.distance_threshold = distance_threshold;
  out.assignments.assign(n, -1);
  std::vector<int> label(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t root = i;
    while (parent[root] != root) root = parent[root];
    if (label[root] < 0) label[root] = out.num_clusters++;
    out.assignments[i] = label[root];
  }
  return out;
}

double shannon_entropy(std::span<const int> cluster_sizes) {
  const double total = std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0.0);
  if (!(total > 0.0)) return 0.0;
  double e = 0.0;
  for (int s : cluster_sizes) {
    if (s <= 0) continue;
    const double p = s / total;
    e -= p * std::log(p);
  }
  return e;
}

EntropyReport entropy_from_sizes(std::span<const int> cluster_sizes, double entropy_threshold) {
  EntropyReport r;
  r.cluster_sizes.assign(cluster_sizes.begin(), cluster_sizes.end());
  const double total = std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0.0);
  for (int s : cluster_sizes) r.probabilities.push_back(total > 0.0 ? s / total : 0.0);
  r.entropy = shannon_entropy(cluster_sizes);
  r.flagged = r.entropy > entropy_threshold;
  return r;
}

EntropyReport entropy(const Clustering& clustering, std::size_t n, double entropy_threshold) {
  if (n == 0 || n != clustering.assignments.size()) {
    throw Error("entropy: n must equal the number of clustered responses");
  }
  const auto sizes = clustering.sizes();
  return entropy_from_sizes(sizes, entropy_threshold);
}

}  // namespace safe::detect
