#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "safe/backend/catalog.hpp"
#include "safe/bench/dataset.hpp"

// One-shot converters from upstream layouts into the harness schemas.
namespace safe::bench {

// RFC 4180 CSV: quoted fields, doubled quotes, embedded newlines.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

// TruthfulQA CSV (Type, Category, Question, Best Answer, Correct Answers, ...).
// Gold answers are the best answer followed by the ';'-separated correct answers.
std::vector<DatasetRecord> import_truthfulqa_csv(std::istream& in);

// BioASQ JSON {"questions": [{"id", "body", "exact_answer", "ideal_answer"}]}.
// exact_answer (flattened) is preferred over ideal_answer.
std::vector<DatasetRecord> import_bioasq_json(std::istream& in);

// WikiDoc instruction records {"instruction", "input", "output"} as a JSON
// array or JSONL; the input is the question and the output the gold answer.
std::vector<DatasetRecord> import_wikidoc(std::istream& in);

// Feature export: a JSON array (or {"features": [...]}) of objects with an
// "index" and either "description" or "explanations": [{"description"}].
// The optional "frac_nonzero" or "density" field becomes the reference density.
backend::FeatureCatalog import_catalog_json(std::string_view json_text);

}  // namespace safe::bench
