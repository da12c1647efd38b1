#include "safe/bench/importers.hpp"

#include <istream>
#include <iterator>
#include <map>
#include <sstream>

#include "json.hpp"

#include "safe/core/error.hpp"
#include "safe/core/text.hpp"

namespace safe::bench {

using nlohmann::json;

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // dropped; \r\n handled on the \n
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw FormatError("unterminated quoted CSV field", rows.size() + 1);
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<std::string> split_answers(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, ';')) {
    auto t = trim(cur);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void add_unique(std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v)
    if (x == s) return;
  v.push_back(s);
}

std::string zero_pad(std::size_t i, std::size_t width) {
  auto s = std::to_string(i);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::vector<json> json_objects(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<json> out;
  const auto t = trim(text);
  if (t.empty()) return out;
  if (t.front() == '[') {
    try {
      for (auto& v : json::parse(t)) out.push_back(v);
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad JSON array: ") + e.what());
    }
    return out;
  }
  std::istringstream lines{std::string(t)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad JSON line: ") + e.what(), n);
    }
  }
  return out;
}

void flatten_strings(const json& v, std::vector<std::string>& out) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto t = trim(s);
    if (!t.empty()) add_unique(out, std::string(t));
  } else if (v.is_array()) {
    for (const auto& x : v) flatten_strings(x, out);
  }
}

}  // namespace

std::vector<DatasetRecord> import_truthfulqa_csv(std::istream& in) {
  auto rows = parse_csv(in);
  if (rows.empty()) throw FormatError("empty CSV", 1);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[std::string(trim(rows[0][i]))] = i;
  for (const char* need : {"Question", "Best Answer"}) {
    if (!col.contains(need)) throw FormatError(std::string("missing column '") + need + "'", 1);
  }
  const auto q_col = col["Question"];
  const auto best_col = col["Best Answer"];
  const bool has_correct = col.contains("Correct Answers");
  const bool has_category = col.contains("Category");
  std::vector<DatasetRecord> out;
  const auto width = std::to_string(rows.size()).size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    auto cell = [&](std::size_t c) { return c < row.size() ? std::string(trim(row[c])) : std::string(); };
    DatasetRecord rec;
    rec.id = "truthfulqa-" + zero_pad(out.size(), width);
    rec.question = cell(q_col);
    if (!cell(best_col).empty()) rec.gold_answers.push_back(cell(best_col));
    if (has_correct) {
      for (auto& a : split_answers(cell(col["Correct Answers"]))) add_unique(rec.gold_answers, a);
    }
    rec.domain_tag = has_category ? cell(col["Category"]) : "truthfulqa";
    if (rec.domain_tag.empty()) rec.domain_tag = "truthfulqa";
    try {
      validate(rec);
    } catch (const Error& e) {
      throw FormatError(e.what(), r + 1);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<DatasetRecord> import_bioasq_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad BioASQ JSON: ") + e.what());
  }
  if (!j.contains("questions") || !j["questions"].is_array()) throw FormatError("BioASQ JSON has no questions array");
  std::vector<DatasetRecord> out;
  std::size_t i = 0;
  for (const auto& q : j["questions"]) {
    DatasetRecord rec;
    rec.id = q.contains("id") && q["id"].is_string() ? q["id"].get<std::string>() : "bioasq-" + std::to_string(i);
    rec.question = q.value("body", std::string());
    if (q.contains("exact_answer")) flatten_strings(q["exact_answer"], rec.gold_answers);
    if (rec.gold_answers.empty() && q.contains("ideal_answer")) flatten_strings(q["ideal_answer"], rec.gold_answers);
    rec.domain_tag = "bioasq";
    if (q.contains("type") && q["type"].is_string()) rec.domain_tag += ":" + q["type"].get<std::string>();
    try {
      validate(rec);
    } catch (const Error& e) {
      throw FormatError(std::string(e.what()) + " (question " + std::to_string(i) + ")");
    }
    out.push_back(std::move(rec));
    ++i;
  }
  return out;
}

std::vector<DatasetRecord> import_wikidoc(std::istream& in) {
  std::vector<DatasetRecord> out;
  const auto objs = json_objects(in);
  const auto width = std::to_string(objs.size()).size();
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const auto& o = objs[i];
    DatasetRecord rec;
    rec.id = "wikidoc-" + zero_pad(i, width);
    rec.question = std::string(trim(o.value("input", std::string())));
    if (rec.question.empty()) rec.question = std::string(trim(o.value("instruction", std::string())));
    const auto answer = std::string(trim(o.value("output", std::string())));
    if (!answer.empty()) rec.gold_answers.push_back(answer);
    rec.domain_tag = "wikidoc";
    try {
      validate(rec);
    } catch (const Error& e) {
      throw FormatError(e.what(), i + 1);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

backend::FeatureCatalog import_catalog_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad catalog JSON: ") + e.what());
  }
  const json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("features")) throw FormatError("catalog JSON object has no features array");
    arr = &j["features"];
  }
  if (!arr->is_array()) throw FormatError("catalog JSON is not an array");
  backend::FeatureCatalog cat;
  std::size_t i = 0;
  for (const auto& f : *arr) {
    ++i;
    try {
      FeatureCatalogEntry e;
      const auto& idx = f.at("index");
      e.feature_index = idx.is_string() ? std::stoi(idx.get<std::string>()) : idx.get<int>();
      if (f.contains("description") && f["description"].is_string()) {
        e.description = f["description"].get<std::string>();
      } else if (f.contains("explanations") && f["explanations"].is_array() && !f["explanations"].empty()) {
        e.description = f["explanations"][0].value("description", std::string());
      }
      e.description = std::string(trim(e.description));
      for (const char* k : {"frac_nonzero", "density"}) {
        if (f.contains(k) && f[k].is_number()) {
          e.reference_density = f[k].get<double>();
          break;
        }
      }
      cat.insert(std::move(e));
    } catch (const json::exception& ex) {
      throw FormatError(std::string("bad catalog feature: ") + ex.what(), i);
    } catch (const std::logic_error& ex) {
      throw FormatError(std::string("bad catalog feature index: ") + ex.what(), i);
    } catch (const Error& ex) {
      throw FormatError(ex.what(), i);
    }
  }
  return cat;
}

}  // namespace safe::bench
