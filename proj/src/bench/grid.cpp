#include "safe/bench/grid.hpp"

#include <ostream>

#include "safe/core/error.hpp"
#include "safe/core/text.hpp"

namespace safe::bench {

GridResult grid_search(std::span<const DatasetRecord> dataset, std::span<const double> entropy_thresholds,
                       std::span<const double> density_thresholds, const PipelineConfig& config,
                       const pipeline::Backends& backends, Grader grader, std::size_t workers,
                       const backend::TextGenerator* judge) {
  if (entropy_thresholds.empty() || density_thresholds.empty()) throw Error("grid search needs non-empty value lists");
  GridResult g;
  g.entropy_thresholds.assign(entropy_thresholds.begin(), entropy_thresholds.end());
  g.density_thresholds.assign(density_thresholds.begin(), density_thresholds.end());
  for (std::size_t i = 0; i < entropy_thresholds.size(); ++i) {
    std::vector<GridCell> row;
    for (std::size_t j = 0; j < density_thresholds.size(); ++j) {
      GridCell cell;
      cell.entropy_threshold = entropy_thresholds[i];
      cell.density_threshold = density_thresholds[j];
      PipelineConfig c = config;
      c.entropy_threshold = cell.entropy_threshold;
      c.density_threshold = cell.density_threshold;
      try {
        const auto run = run_benchmark(dataset, c, backends, grader, workers, judge);
        if (run.report.failed_queries > 0) {
          cell.error = std::to_string(run.report.failed_queries) + " queries failed";
          for (const auto& o : run.outcomes) {
            if (o.trace.error) {
              cell.error += ": " + *o.trace.error;
              break;
            }
          }
        } else {
          cell.accuracy = run.report.accuracy;
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      row.push_back(std::move(cell));
    }
    g.cells.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    for (std::size_t j = 0; j < g.cells[i].size(); ++j) {
      const auto& acc = g.cells[i][j].accuracy;
      if (!acc) continue;
      if (!g.best || *acc > *g.cells[g.best->first][g.best->second].accuracy) g.best = std::pair{i, j};
    }
  }
  return g;
}

nlohmann::json to_json(const GridResult& g) {
  using nlohmann::json;
  json cells = json::array();
  for (const auto& row : g.cells) {
    json r = json::array();
    for (const auto& c : row) {
      json cell{{"entropy_threshold", c.entropy_threshold}, {"density_threshold", c.density_threshold}};
      cell["accuracy"] = c.accuracy ? json(*c.accuracy) : json(nullptr);
      if (!c.error.empty()) cell["error"] = c.error;
      r.push_back(cell);
    }
    cells.push_back(r);
  }
  json j{{"entropy_thresholds", g.entropy_thresholds}, {"density_thresholds", g.density_thresholds}, {"cells", cells}};
  if (g.best) {
    const auto& c = g.cells[g.best->first][g.best->second];
    j["best"] = json{{"row", g.best->first},
                     {"column", g.best->second},
                     {"entropy_threshold", c.entropy_threshold},
                     {"density_threshold", c.density_threshold},
                     {"accuracy", *c.accuracy}};
  } else {
    j["best"] = nullptr;
  }
  return j;
}

void write_grid_csv(std::ostream& out, const GridResult& g) {
  out << "entropy_threshold";
  for (double d : g.density_thresholds) out << ',' << format_double(d);
  out << '\n';
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    out << format_double(g.entropy_thresholds[i]);
    for (const auto& c : g.cells[i]) out << ',' << (c.accuracy ? format_double(*c.accuracy) : std::string("NA"));
    out << '\n';
  }
}

}  // namespace safe::bench
