#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safe/core/types.hpp"

namespace safe::bench {

struct DatasetRecord {
  std::string id;
  std::string question;
  std::vector<std::string> gold_answers;
  std::optional<std::vector<std::string>> choices;
  std::string domain_tag;

  bool operator==(const DatasetRecord&) const = default;
};

enum class DatasetFormat { jsonl };

// Throws Error when the record has no id, a blank question, no gold answer,
// or choices that miss a gold answer.
void validate(const DatasetRecord& record);

// One JSON object per line:
// {"id": str, "question": str, "gold_answers": [str], "choices": [str]|null, "domain_tag": str}
// Throws FormatError carrying the offending line number.
std::vector<DatasetRecord> parse_dataset_jsonl(std::istream& in);
std::vector<DatasetRecord> ingest(const std::filesystem::path& path, DatasetFormat format = DatasetFormat::jsonl);

void write_dataset_jsonl(std::ostream& out, std::span<const DatasetRecord> records);
void write_dataset_jsonl(const std::filesystem::path& path, std::span<const DatasetRecord> records);

// Seeded selection of k records, returned in their original order. k >= size
// returns everything.
std::vector<DatasetRecord> subsample(std::span<const DatasetRecord> records, std::size_t k, std::uint64_t seed);

std::vector<Query> to_queries(std::span<const DatasetRecord> records);

}  // namespace safe::bench
