#include "safe/backend/catalog.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "safe/core/error.hpp"
#include "safe/core/text.hpp"

namespace safe::backend {

FeatureCatalog FeatureCatalog::parse_jsonl(std::istream& in) {
  FeatureCatalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      FeatureCatalogEntry e;
      e.feature_index = j.at("index").get<int>();
      e.description = j.at("description").get<std::string>();
      if (j.contains("density") && !j["density"].is_null()) {
        e.reference_density = j["density"].get<double>();
        if (*e.reference_density < 0.0 || *e.reference_density > 1.0) {
          throw FormatError("density outside [0, 1]", line_no);
        }
      }
      catalog.insert(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad catalog entry: ") + e.what(), line_no);
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return catalog;
}

FeatureCatalog FeatureCatalog::load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature catalog " + path.string());
  return parse_jsonl(in);
}

void FeatureCatalog::write_jsonl(std::ostream& out) const {
  for (const auto& [index, e] : entries_) {
    nlohmann::json j{{"index", index}, {"description", e.description}};
    j["density"] = e.reference_density ? nlohmann::json(*e.reference_density) : nlohmann::json(nullptr);
    out << j.dump() << '\n';
  }
}

void FeatureCatalog::save_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write feature catalog " + path.string());
  write_jsonl(out);
}

void FeatureCatalog::insert(FeatureCatalogEntry entry) {
  if (entry.feature_index < 0) throw Error("negative feature index");
  if (trim(entry.description).empty()) {
    throw Error("feature " + std::to_string(entry.feature_index) + " has an empty description");
  }
  const int index = entry.feature_index;
  if (!entries_.emplace(index, std::move(entry)).second) {
    throw Error("duplicate feature index " + std::to_string(index));
  }
}

const FeatureCatalogEntry* FeatureCatalog::find(int feature_index) const {
  auto it = entries_.find(feature_index);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t FeatureCatalog::cache_densities(std::span<const double> densities) {
  std::size_t updated = 0;
  for (auto& [index, e] : entries_) {
    if (static_cast<std::size_t>(index) < densities.size()) {
      e.reference_density = densities[static_cast<std::size_t>(index)];
      ++updated;
    }
  }
  return updated;
}

std::vector<double> FeatureCatalog::densities(std::size_t feature_count) const {
  std::vector<double> out(feature_count, 1.0);
  for (const auto& [index, e] : entries_) {
    if (static_cast<std::size_t>(index) < feature_count && e.reference_density) {
      out[static_cast<std::size_t>(index)] = *e.reference_density;
    }
  }
  return out;
}

std::vector<FeatureCatalogEntry> lookup_descriptions(std::span<const int> indices, const FeatureCatalog& catalog) {
  std::vector<FeatureCatalogEntry> out;
  out.reserve(indices.size());
  for (int index : indices) {
    if (const auto* e = catalog.find(index)) {
      out.push_back(*e);
    } else {
      out.push_back(FeatureCatalogEntry{index, "feature " + std::to_string(index), std::nullopt, true});
    }
  }
  return out;
}

}  // namespace safe::backend
