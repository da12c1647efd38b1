#pragma once

#include <string_view>

// Directive wording. Tests compare rendered suffixes byte for byte, so any
// change here is a format change.
namespace safe::enrich::templates {

inline constexpr std::string_view kNotePrefix = " - NOTE: ";
inline constexpr std::string_view kAvoidClause = "do not consider ";
inline constexpr std::string_view kEmphasizeClause = "you must consider ";
inline constexpr std::string_view kClauseJoiner = " and ";
// Appended after emphasize clauses unless the last description already ends a sentence.
inline constexpr std::string_view kEmphasizeTerminator = ".";
inline constexpr std::string_view kReflectiveSuffix = " - NOTE - think carefully before answering.";

// Marker the pipeline and mocks use to find where a directive starts.
inline constexpr std::string_view kDirectiveMarker = " - NOTE";

}  // namespace safe::enrich::templates
