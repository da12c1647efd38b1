#include "safe/bench/grade.hpp"

#include <cctype>

#include "safe/core/error.hpp"
#include "safe/core/text.hpp"

namespace safe::bench {

std::string_view to_string(Grader g) {
  switch (g) {
    case Grader::exact: return "exact";
    case Grader::normalized_substring: return "normalized_substring";
    case Grader::judge: return "judge";
  }
  return "";
}

Grader parse_grader(std::string_view s) {
  if (s == "exact") return Grader::exact;
  if (s == "normalized_substring" || s == "substring") return Grader::normalized_substring;
  if (s == "judge") return Grader::judge;
  throw ConfigError("grader", "unknown grader '" + std::string(s) + "'");
}

std::string normalize_answer(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(u)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::string judge_prompt(std::string_view answer, const DatasetRecord& record) {
  std::string p = "You are grading an answer to a question.\nQuestion: ";
  p += record.question;
  p += "\nReference answers:";
  for (const auto& g : record.gold_answers) {
    p += "\n- ";
    p += g;
  }
  p += "\nCandidate answer: ";
  p += answer;
  p += "\nDoes the candidate answer agree with any reference answer? Reply with exactly one word: yes or no.";
  return p;
}

bool grade(std::string_view answer, const DatasetRecord& record, Grader grader, const backend::TextGenerator* judge) {
  switch (grader) {
    case Grader::exact: {
      const std::string a = to_lower(trim(answer));
      for (const auto& g : record.gold_answers) {
        if (to_lower(trim(g)) == a) return true;
      }
      return false;
    }
    case Grader::normalized_substring: {
      const std::string a = normalize_answer(answer);
      for (const auto& g : record.gold_answers) {
        const std::string ng = normalize_answer(g);
        if (!ng.empty() && a.find(ng) != std::string::npos) return true;
      }
      return false;
    }
    case Grader::judge: {
      if (judge == nullptr) throw Error("judge grader needs a generation backend");
      backend::GenerationRequest req;
      req.prompt = judge_prompt(answer, record);
      req.temperature = 0.0;
      req.max_tokens = 4;
      req.seed = 0;
      const std::string reply = to_lower(trim(judge->generate(req)));
      if (reply.starts_with("yes")) return true;
      if (reply.starts_with("no")) return false;
      throw BackendError("unparseable judge reply: " + reply);
    }
  }
  return false;
}

}  // namespace safe::bench
