#pragma once

#include <string>
#include <string_view>

#include "safe/backend/generator.hpp"
#include "safe/bench/dataset.hpp"

namespace safe::bench {

enum class Grader { exact, normalized_substring, judge };

std::string_view to_string(Grader g);
Grader parse_grader(std::string_view s);

// Lowercase, punctuation replaced by spaces, whitespace collapsed and trimmed.
std::string normalize_answer(std::string_view s);

// Rubric sent to the judge backend.
std::string judge_prompt(std::string_view answer, const DatasetRecord& record);

// exact: case-folded, trimmed equality with any gold answer.
// normalized_substring: some normalized gold answer occurs in the normalized answer.
// judge: asks `judge` the rubric at temperature 0 and reads a leading yes/no.
// Throws Error for the judge grader without a backend, BackendError on a
// failed or unparseable judge reply.
bool grade(std::string_view answer, const DatasetRecord& record, Grader grader,
           const backend::TextGenerator* judge = nullptr);

}  // namespace safe::bench
