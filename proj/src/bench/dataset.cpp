#include "safe/bench/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"

#include "safe/core/error.hpp"
#include "safe/core/rng.hpp"
#include "safe/core/text.hpp"

namespace safe::bench {

void validate(const DatasetRecord& r) {
  if (r.id.empty()) throw Error("record has an empty id");
  if (trim(r.question).empty()) throw Error("record '" + r.id + "' has an empty question");
  if (r.gold_answers.empty()) throw Error("record '" + r.id + "' has no gold answer");
  for (const auto& g : r.gold_answers) {
    if (trim(g).empty()) throw Error("record '" + r.id + "' has a blank gold answer");
  }
  if (r.choices) {
    for (const auto& g : r.gold_answers) {
      if (std::find(r.choices->begin(), r.choices->end(), g) == r.choices->end()) {
        throw Error("record '" + r.id + "': gold answer '" + g + "' is not among the choices");
      }
    }
  }
}

std::vector<DatasetRecord> parse_dataset_jsonl(std::istream& in) {
  std::vector<DatasetRecord> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    DatasetRecord r;
    try {
      const auto j = nlohmann::json::parse(line);
      r.id = j.at("id").get<std::string>();
      r.question = j.at("question").get<std::string>();
      if (!j.contains("gold_answers")) throw Error("missing gold_answers");
      r.gold_answers = j["gold_answers"].get<std::vector<std::string>>();
      if (j.contains("choices") && !j["choices"].is_null()) r.choices = j["choices"].get<std::vector<std::string>>();
      r.domain_tag = j.value("domain_tag", std::string{});
      validate(r);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad dataset record: ") + e.what(), line_no);
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
    if (!ids.insert(r.id).second) throw FormatError("duplicate record id '" + r.id + "'", line_no);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DatasetRecord> ingest(const std::filesystem::path& path, DatasetFormat format) {
  (void)format;  // jsonl is the only layout
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());
  return parse_dataset_jsonl(in);
}

void write_dataset_jsonl(std::ostream& out, std::span<const DatasetRecord> records) {
  for (const auto& r : records) {
    nlohmann::json j{{"id", r.id}, {"question", r.question}, {"gold_answers", r.gold_answers}};
    j["choices"] = r.choices ? nlohmann::json(*r.choices) : nlohmann::json(nullptr);
    j["domain_tag"] = r.domain_tag;
    out << j.dump() << '\n';
  }
}

void write_dataset_jsonl(const std::filesystem::path& path, std::span<const DatasetRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write dataset " + path.string());
  write_dataset_jsonl(out, records);
}

std::vector<DatasetRecord> subsample(std::span<const DatasetRecord> records, std::size_t k, std::uint64_t seed) {
  if (k >= records.size()) return {records.begin(), records.end()};
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto rng = seeded_rng(seed, "subsample");
  rng.shuffle(order);
  order.resize(k);
  std::sort(order.begin(), order.end());
  std::vector<DatasetRecord> out;
  out.reserve(k);
  for (std::size_t i : order) out.push_back(records[i]);
  return out;
}

std::vector<Query> to_queries(std::span<const DatasetRecord> records) {
  std::vector<Query> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(make_query(r.id, r.question, r.domain_tag.empty() ? std::nullopt : std::optional(r.domain_tag)));
  }
  return out;
}

}  // namespace safe::bench
