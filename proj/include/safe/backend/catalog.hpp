#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "safe/core/types.hpp"

namespace safe::backend {

// Feature auto-interpretations keyed by SAE feature index. Stored as JSONL:
// {"index": int, "description": str, "density": float|null}
class FeatureCatalog {
 public:
  FeatureCatalog() = default;

  static FeatureCatalog parse_jsonl(std::istream& in);
  static FeatureCatalog load_jsonl(const std::filesystem::path& path);
  void write_jsonl(std::ostream& out) const;
  void save_jsonl(const std::filesystem::path& path) const;

  // Throws Error on duplicate index, negative index, or empty description.
  void insert(FeatureCatalogEntry entry);
  const FeatureCatalogEntry* find(int feature_index) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<int, FeatureCatalogEntry>& entries() const { return entries_; }

  // Writes density estimates into the entries that exist; returns how many were updated.
  std::size_t cache_densities(std::span<const double> densities);
  // Density per feature in [0, feature_count). Features without a cached
  // density are reported as 1.0 so that no ceiling below 1 keeps them.
  std::vector<double> densities(std::size_t feature_count) const;

 private:
  std::map<int, FeatureCatalogEntry> entries_;
};

// Entries in input order. Unknown indices produce {description: "feature <i>", placeholder: true}.
std::vector<FeatureCatalogEntry> lookup_descriptions(std::span<const int> indices, const FeatureCatalog& catalog);

}  // namespace safe::backend
