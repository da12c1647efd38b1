#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace safe::oracle {

double entropy(const std::vector<int>& sizes) {
  double n = 0;
  for (int s : sizes) n += s;
  double h = 0;
  for (int s : sizes) {
    if (s == 0) continue;
    h += -(s / n) * std::log(s / n);
  }
  return h;
}

namespace {
double cos_dist(const Vector& a, const Vector& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  double c = ab / std::sqrt(aa * bb);
  c = std::clamp(c, -1.0, 1.0);
  return 1.0 - c;
}
}  // namespace

std::vector<int> agglomerate(const std::vector<Vector>& points, double threshold) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = cos_dist(points[i], points[j]);
  std::vector<std::vector<int>> groups;
  for (std::size_t i = 0; i < n; ++i) groups.push_back({static_cast<int>(i)});
  while (groups.size() > 1) {
    // groups stay sorted by lowest member, so (a, b) order is lexicographic
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < groups.size(); ++a) {
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        double s = 0;
        for (int i : groups[a])
          for (int j : groups[b]) s += d[i][j];
        s /= static_cast<double>(groups[a].size() * groups[b].size());
        if (s < best) {
          best = s;
          ba = a;
          bb = b;
        }
      }
    }
    if (best > threshold) break;
    groups[ba].insert(groups[ba].end(), groups[bb].begin(), groups[bb].end());
    std::sort(groups[ba].begin(), groups[ba].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  std::vector<int> label(n);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i : groups[g]) label[i] = static_cast<int>(g);
  return label;
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

std::vector<bool> outliers(const std::vector<double>& values, bool use_q3) {
  const double q1 = quantile(values, 0.25);
  const double upper = quantile(values, use_q3 ? 0.75 : 0.5);
  const double lb = q1 - 1.5 * (upper - q1);
  std::vector<bool> out;
  for (double v : values) out.push_back(v < lb);
  return out;
}

}  // namespace safe::oracle
