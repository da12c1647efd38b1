#include "safe/core/types.hpp"

#include "safe/core/error.hpp"
#include "safe/core/text.hpp"

namespace safe {

Query make_query(std::string id, std::string text, std::optional<std::string> dataset_tag) {
  if (trim(text).empty()) throw Error("query '" + id + "' has empty text");
  return Query{std::move(id), std::move(text), std::move(dataset_tag)};
}

std::string_view to_string(QuartileScheme v) {
  switch (v) {
    case QuartileScheme::paper_q2_minus_q1: return "paper_q2_minus_q1";
    case QuartileScheme::standard_q3_minus_q1: return "standard_q3_minus_q1";
  }
  return "";
}

std::string_view to_string(Mode v) {
  switch (v) {
    case Mode::full: return "full";
    case Mode::ablation_a1: return "ablation_a1";
    case Mode::ablation_a2: return "ablation_a2";
    case Mode::ablation_b: return "ablation_b";
    case Mode::ablation_c: return "ablation_c";
  }
  return "";
}

std::string_view to_string(TokenAggregation v) {
  switch (v) {
    case TokenAggregation::max: return "max";
    case TokenAggregation::mean: return "mean";
  }
  return "";
}

QuartileScheme parse_quartile_scheme(std::string_view s) {
  if (s == "paper_q2_minus_q1" || s == "q2") return QuartileScheme::paper_q2_minus_q1;
  if (s == "standard_q3_minus_q1" || s == "q3") return QuartileScheme::standard_q3_minus_q1;
  throw ConfigError("quartile_scheme", "unknown scheme '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
  if (s == "full") return Mode::full;
  if (s == "ablation_a1" || s == "a1") return Mode::ablation_a1;
  if (s == "ablation_a2" || s == "a2") return Mode::ablation_a2;
  if (s == "ablation_b" || s == "b") return Mode::ablation_b;
  if (s == "ablation_c" || s == "c") return Mode::ablation_c;
  throw ConfigError("mode", "unknown mode '" + std::string(s) + "'");
}

TokenAggregation parse_token_aggregation(std::string_view s) {
  if (s == "max") return TokenAggregation::max;
  if (s == "mean") return TokenAggregation::mean;
  throw ConfigError("token_aggregation", "unknown aggregation '" + std::string(s) + "'");
}

}  // namespace safe
