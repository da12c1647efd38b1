#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "safe/bench/report.hpp"

namespace safe::bench {

struct GridCell {
  double entropy_threshold = 0.0;
  double density_threshold = 0.0;
  std::optional<double> accuracy;  // empty when the cell is invalid
  std::string error;
};

struct GridResult {
  std::vector<double> entropy_thresholds;  // rows
  std::vector<double> density_thresholds;  // columns
  std::vector<std::vector<GridCell>> cells;
  // Highest-accuracy valid cell; first in row-major order on ties.
  std::optional<std::pair<std::size_t, std::size_t>> best;
};

// Runs the benchmark once per (entropy threshold, density threshold) cell. A
// cell whose run throws or whose queries fail is marked invalid.
GridResult grid_search(std::span<const DatasetRecord> dataset, std::span<const double> entropy_thresholds,
                       std::span<const double> density_thresholds, const PipelineConfig& config,
                       const pipeline::Backends& backends, Grader grader, std::size_t workers,
                       const backend::TextGenerator* judge = nullptr);

nlohmann::json to_json(const GridResult& g);
// Rows are entropy thresholds, columns density thresholds; invalid cells are "NA".
void write_grid_csv(std::ostream& out, const GridResult& g);

}  // namespace safe::bench
