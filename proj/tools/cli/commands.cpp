#include "cli/commands.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "safe/backend/catalog.hpp"
#include "safe/backend/http.hpp"
#include "safe/backend/mock.hpp"
#include "safe/backend/tensor_file.hpp"
#include "safe/bench/grid.hpp"
#include "safe/bench/importers.hpp"
#include "safe/bench/report.hpp"
#include "safe/core/config.hpp"
#include "safe/core/error.hpp"
#include "safe/core/parallel.hpp"
#include "safe/core/text.hpp"
#include "safe/pipeline/mock_suite.hpp"
#include "safe/pipeline/trace_io.hpp"
#include "safe/sae/features.hpp"

namespace safe::cli {
namespace {

// flag -> config key
const std::vector<std::pair<std::string, std::string>>& config_flags() {
  static const std::vector<std::pair<std::string, std::string>> flags = {
      {"--n", "n_generations"},
      {"--phi", "entropy_threshold"},
      {"--delta", "density_threshold"},
      {"--distance-threshold", "cluster_distance_threshold"},
      {"--max-iters", "max_enrichment_iters"},
      {"--top-k", "top_k_features"},
      {"--emphasize", "emphasize_count"},
      {"--quartile-scheme", "quartile_scheme"},
      {"--mode", "mode"},
      {"--seed", "seed"},
      {"--temperature", "temperature"},
      {"--max-tokens", "max_tokens"},
      {"--generation-parallelism", "generation_parallelism"},
      {"--retry-budget", "retry_budget"},
      {"--aggregation", "token_aggregation"},
  };
  return flags;
}

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::pair<CLI::Option*, std::string>> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file");
    for (const auto& [flag, key] : config_flags()) {
      options.emplace_back(app->add_option(flag, values[key], "sets " + key), key);
    }
  }

  PipelineConfig resolve() const {
    ConfigOverrides overrides;
    for (const auto& [opt, key] : options) {
      if (opt->count() > 0) overrides[key] = values.at(key);
    }
    return config_path.empty() ? parse_config("", overrides) : load_config(config_path, overrides);
  }
};

struct BackendFlags {
  bool mock = false;
  std::string script;
  std::string sae_manifest;
  std::string catalog;
  std::string activations;
  std::string reference_activations;
  std::string layer_label;
  std::string gen_model;
  std::string embed_model = "all-MiniLM-L6-v2";
  std::size_t density_floor = sae::kDefaultDensityFloor;

  void attach(CLI::App* app) {
    app->add_flag("--mock", mock, "seeded offline backends");
    app->add_option("--script", script, "scripted generator JSON");
    app->add_option("--sae-manifest", sae_manifest, "SAE manifest JSON");
    app->add_option("--catalog", catalog, "feature catalog JSONL");
    app->add_option("--activations", activations, "activation tensor file or directory");
    app->add_option("--reference-activations", reference_activations, "reference activation matrix for densities");
    app->add_option("--density-floor", density_floor, "minimum reference vectors for densities")
        ->capture_default_str();
    app->add_option("--layer-label", layer_label, "activation layer requested from the server");
    app->add_option("--gen-model", gen_model, "generation model name");
    app->add_option("--embed-model", embed_model, "embedding model name")->capture_default_str();
  }

  pipeline::Backends build(const PipelineConfig& config) const {
    pipeline::Backends b;
    if (mock) {
      b = pipeline::make_mock_backends(config.seed);
    } else {
      b.generator = std::make_shared<backend::ChatCompletionGenerator>(
          backend::endpoint_from_env("SAFE_GEN_URL", gen_model));
      b.embedder = std::make_shared<backend::HttpEmbedder>(backend::endpoint_from_env("SAFE_EMBED_URL", embed_model));
    }
    if (!script.empty()) {
      b.generator = std::make_shared<backend::ScriptedGenerator>(backend::ScriptedGenerator::load_json(script));
    }
    bool sae_changed = false;
    if (!sae_manifest.empty()) {
      b.sae = std::make_shared<sae::SaeModel>(sae::SaeModel::load(sae_manifest));
      sae_changed = true;
    }
    if (!activations.empty()) {
      b.activations = std::make_shared<backend::TensorFileActivationSource>(
          activations, layer_label.empty() ? std::string("file") : layer_label);
    } else if (!mock && config.mode != Mode::ablation_b) {
      b.activations = std::make_shared<backend::HttpActivationSource>(
          backend::endpoint_from_env("SAFE_GEN_URL", gen_model), layer_label);
    }
    if (!catalog.empty()) {
      b.catalog = std::make_shared<backend::FeatureCatalog>(backend::FeatureCatalog::load_jsonl(catalog));
      sae_changed = true;
    }
    if (config.mode != Mode::ablation_b) {
      if (!b.sae) throw ConfigError("sae-manifest", "an SAE manifest is required unless --mock or --mode b");
      if (!b.catalog) b.catalog = std::make_shared<backend::FeatureCatalog>();
    }
    if (b.sae && !reference_activations.empty()) {
      b.densities = sae::estimate_density(*b.sae, backend::read_matrix(reference_activations), density_floor);
    } else if (b.sae && sae_changed) {
      b.densities = b.catalog->densities(b.sae->feature_count());
    }
    return b;
  }
};

std::size_t workers_or_default(std::size_t w) { return w == 0 ? default_worker_count() : w; }

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void print_iteration(std::ostream& out, std::size_t i, const IterationRecord& it) {
  out << "iteration " << i << ": entropy " << fixed(it.entropy_report.entropy) << " clusters "
      << it.entropy_report.cluster_sizes.size() << " flagged " << (it.entropy_report.flagged ? "yes" : "no") << '\n';
  if (it.directive) out << "  directive:" << (it.directive->rendered_suffix.empty() ? " (empty)" : it.directive->rendered_suffix) << '\n';
}

const backend::TextGenerator* judge_for(bench::Grader g, const pipeline::Backends& b) {
  return g == bench::Grader::judge ? b.generator.get() : nullptr;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy-gated answer enrichment with sparse autoencoder features", "safe"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run the pipeline over a dataset and write report + trace");
  ConfigFlags run_cfg;
  BackendFlags run_be;
  std::string dataset, out_report = "report.json", out_trace = "trace.jsonl", grader_name = "normalized_substring";
  std::size_t subsample = 0, workers = 0;
  run_cfg.attach(run);
  run_be.attach(run);
  run->add_option("--dataset", dataset, "dataset JSONL")->required();
  run->add_option("--subsample", subsample, "seeded subsample size (0 = all)");
  run->add_option("--grader", grader_name, "exact | normalized_substring | judge")->capture_default_str();
  run->add_option("--out-report", out_report, "report JSON path")->capture_default_str();
  run->add_option("--out-trace", out_trace, "trace JSONL path")->capture_default_str();
  run->add_option("--workers", workers, "query worker threads (0 = logical cores)");

  // ask
  auto* ask = app.add_subcommand("ask", "run a single question and print each iteration");
  ConfigFlags ask_cfg;
  BackendFlags ask_be;
  std::string question, ask_id = "ask", ask_trace;
  ask_cfg.attach(ask);
  ask_be.attach(ask);
  ask->add_option("--question", question, "question text")->required();
  ask->add_option("--id", ask_id, "query id")->capture_default_str();
  ask->add_option("--out-trace", ask_trace, "optional trace JSONL path");

  // grid
  auto* grid = app.add_subcommand("grid", "accuracy over an entropy x density threshold grid");
  ConfigFlags grid_cfg;
  BackendFlags grid_be;
  std::string grid_dataset, grid_csv, grid_json, grid_grader = "normalized_substring";
  std::vector<double> phis{0.6, 0.75, 0.9}, deltas{0.01, 0.05, 0.1};
  std::size_t grid_sub = 0, grid_workers = 0;
  grid_cfg.attach(grid);
  grid_be.attach(grid);
  grid->add_option("--dataset", grid_dataset, "dataset JSONL")->required();
  grid->add_option("--phis", phis, "entropy thresholds (rows)")->delimiter(',')->capture_default_str();
  grid->add_option("--deltas", deltas, "density thresholds (columns)")->delimiter(',')->capture_default_str();
  grid->add_option("--subsample", grid_sub, "seeded subsample size (0 = all)");
  grid->add_option("--grader", grid_grader, "exact | normalized_substring | judge")->capture_default_str();
  grid->add_option("--out-csv", grid_csv, "accuracy matrix CSV");
  grid->add_option("--out-report", grid_json, "grid JSON");
  grid->add_option("--workers", grid_workers, "query worker threads (0 = logical cores)");

  // density
  auto* density = app.add_subcommand("density", "estimate feature densities and store them in a catalog");
  std::string d_manifest, d_reference, d_catalog, d_out;
  std::size_t d_floor = sae::kDefaultDensityFloor;
  density->add_option("--sae-manifest", d_manifest, "SAE manifest JSON")->required();
  density->add_option("--reference-activations", d_reference, "reference activation matrix")->required();
  density->add_option("--catalog", d_catalog, "catalog JSONL to update")->required();
  density->add_option("--out", d_out, "write the updated catalog here instead of in place");
  density->add_option("--density-floor", d_floor, "minimum reference vectors")->capture_default_str();

  // import-catalog
  auto* icat = app.add_subcommand("import-catalog", "convert a feature export into catalog JSONL");
  std::string ic_input, ic_url, ic_out;
  icat->add_option("--input", ic_input, "feature export JSON file");
  icat->add_option("--url", ic_url, "fetch the export over HTTP");
  icat->add_option("--out", ic_out, "catalog JSONL path")->required();

  // import-dataset
  auto* idat = app.add_subcommand("import-dataset", "convert an upstream dataset into dataset JSONL");
  std::string id_format, id_input, id_out;
  idat->add_option("--format", id_format, "truthfulqa | bioasq | wikidoc")->required();
  idat->add_option("--input", id_input, "source file")->required();
  idat->add_option("--out", id_out, "dataset JSONL path")->required();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("safe");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      const auto config = run_cfg.resolve();
      const auto grader = bench::parse_grader(grader_name);
      auto records = bench::ingest(dataset);
      if (subsample > 0) records = bench::subsample(records, subsample, config.seed);
      const auto backends = run_be.build(config);
      const auto result = bench::run_benchmark(records, config, backends, grader, workers_or_default(workers),
                                               judge_for(grader, backends));
      bench::write_report(out_report, result.report);
      pipeline::write_trace_jsonl(out_trace, result.outcomes);
      std::size_t correct = 0;
      for (const auto& q : result.report.per_query) correct += q.correct ? 1 : 0;
      out << "accuracy " << fixed(result.report.accuracy, 4) << " (" << correct << "/"
          << result.report.per_query.size() << ")\n"
          << "mean entropy drop " << fixed(result.report.mean_entropy_drop, 4) << '\n'
          << "failed queries " << result.report.failed_queries << '\n'
          << "report " << out_report << "\ntrace " << out_trace << '\n';
      for (const auto& o : result.outcomes) {
        if (o.trace.error) err << o.trace.query_id << ": " << *o.trace.error << '\n';
      }
      return result.report.failed_queries > 0 ? kExitQueryError : kExitOk;
    }
    if (ask->parsed()) {
      if (trim(question).empty()) {
        err << "error: --question must not be empty\n\n" << ask->help();
        return kExitUsage;
      }
      const auto config = ask_cfg.resolve();
      const auto backends = ask_be.build(config);
      const auto outcome = pipeline::run_query(make_query(ask_id, question), config, backends);
      const auto& iters = outcome.trace.iterations;
      for (std::size_t i = 0; i < iters.size(); ++i) print_iteration(out, i, iters[i]);
      out << "status: " << pipeline::to_string(outcome.status) << '\n'
          << "baseline entropy: " << fixed(outcome.baseline_entropy) << '\n'
          << "final entropy: " << fixed(outcome.final_entropy) << '\n'
          << "enrichments: " << outcome.enrichments_applied << '\n'
          << "final answer: " << outcome.trace.final_answer << '\n';
      if (!ask_trace.empty()) pipeline::write_trace_jsonl(ask_trace, std::span(&outcome, 1));
      if (outcome.status == pipeline::OutcomeStatus::failed) {
        err << "error: " << outcome.trace.error.value_or("query failed") << '\n';
        return kExitQueryError;
      }
      return kExitOk;
    }
    if (grid->parsed()) {
      const auto config = grid_cfg.resolve();
      const auto grader = bench::parse_grader(grid_grader);
      auto records = bench::ingest(grid_dataset);
      if (grid_sub > 0) records = bench::subsample(records, grid_sub, config.seed);
      const auto backends = grid_be.build(config);
      const auto g = bench::grid_search(records, phis, deltas, config, backends, grader,
                                        workers_or_default(grid_workers), judge_for(grader, backends));
      bench::write_grid_csv(out, g);
      if (g.best) {
        const auto& c = g.cells[g.best->first][g.best->second];
        out << "best phi " << format_double(c.entropy_threshold) << " delta " << format_double(c.density_threshold)
            << " accuracy " << fixed(*c.accuracy, 4) << '\n';
      }
      if (!grid_csv.empty()) {
        std::ofstream f(grid_csv, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + grid_csv);
        bench::write_grid_csv(f, g);
      }
      if (!grid_json.empty()) {
        std::ofstream f(grid_json, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + grid_json);
        f << bench::to_json(g).dump(2) << '\n';
      }
      bool any_invalid = false;
      for (const auto& row : g.cells) {
        for (const auto& c : row) {
          if (!c.accuracy) {
            any_invalid = true;
            err << "cell (" << format_double(c.entropy_threshold) << ", " << format_double(c.density_threshold)
                << "): " << c.error << '\n';
          }
        }
      }
      return any_invalid ? kExitQueryError : kExitOk;
    }
    if (density->parsed()) {
      const auto model = sae::SaeModel::load(d_manifest);
      const auto reference = backend::read_matrix(d_reference);
      const auto dens = sae::estimate_density(model, reference, d_floor);
      auto cat = backend::FeatureCatalog::load_jsonl(d_catalog);
      const auto updated = cat.cache_densities(dens);
      cat.save_jsonl(d_out.empty() ? d_catalog : d_out);
      out << "features " << dens.size() << " reference vectors " << reference.rows << " catalog entries updated "
          << updated << '\n';
      return kExitOk;
    }
    if (icat->parsed()) {
      if (ic_input.empty() == ic_url.empty()) {
        err << "error: exactly one of --input or --url is required\n\n" << icat->help();
        return kExitUsage;
      }
      const auto text = ic_input.empty() ? backend::http_get(ic_url) : read_text(ic_input);
      const auto cat = bench::import_catalog_json(text);
      cat.save_jsonl(ic_out);
      out << "imported " << cat.size() << " features\n";
      return kExitOk;
    }
    if (idat->parsed()) {
      std::ifstream in(id_input, std::ios::binary);
      if (!in) throw Error("cannot open " + id_input);
      std::vector<bench::DatasetRecord> records;
      if (id_format == "truthfulqa") {
        records = bench::import_truthfulqa_csv(in);
      } else if (id_format == "bioasq") {
        records = bench::import_bioasq_json(in);
      } else if (id_format == "wikidoc") {
        records = bench::import_wikidoc(in);
      } else {
        throw ConfigError("format", "unknown dataset format '" + id_format + "'");
      }
      bench::write_dataset_jsonl(std::filesystem::path(id_out), records);
      out << "imported " << records.size() << " records\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << '\n';
    return kExitQueryError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitQueryError;
  }
  return kExitUsage;
}

}  // namespace safe::cli
