#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

#include "cli/commands.hpp"
#include "safe/backend/catalog.hpp"
#include "safe/backend/tensor_file.hpp"
#include "safe/bench/dataset.hpp"
#include "safe/bench/report.hpp"
#include "safe/sae/synthetic.hpp"

using namespace safe;
namespace fs = std::filesystem;

namespace {
struct Cli {
  int code = 0;
  std::string out;
  std::string err;
};

Cli invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Cli r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::string kToy = std::string(SAFE_SOURCE_DIR) + "/fixtures/toy.jsonl";
const std::string kQuestion = "What gland produces thyroxine?";

void write_file(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

// Script, identity SAE, catalog and cached activations for a two-iteration ask.
struct AskFixture {
  fs::path dir, script, manifest, catalog, activations;
};

AskFixture ask_fixture() {
  AskFixture f;
  f.dir = testing::temp_dir("cli-ask");
  f.script = f.dir / "script.json";
  f.manifest = f.dir / "sae.json";
  f.catalog = f.dir / "catalog.jsonl";
  f.activations = f.dir / "acts";
  fs::create_directories(f.activations);

  const std::vector<std::string> base{
      "the pituitary controls it", "the pituitary controls it",  "the pituitary controls it",
      "the pituitary controls it", "hypothalamus releases it",   "hypothalamus releases it",
      "hypothalamus releases it",  "adrenal cortex output",      "adrenal cortex output",
      "folklore says the moon"};
  const std::string right = "The thyroid gland produces thyroxine.";
  nlohmann::json script = {{"rules", nlohmann::json::array({{{"contains", {" - NOTE"}}, {"responses", {right}}},
                                                            {{"contains", {kQuestion}}, {"responses", base}}})}};
  write_file(f.script, script.dump());

  const std::map<std::string, int> kw{{"pituitary", 0}, {"hypothalamus", 1}, {"adrenal", 2}, {"folklore", 3}};
  const std::size_t width = 4;
  testing::identity_sae(width).save(f.manifest);
  backend::FeatureCatalog cat;
  cat.insert({0, "pituitary hormones", 0.02, false});
  cat.insert({1, "hypothalamic signalling", 0.03, false});
  cat.insert({2, "adrenal steroids", 0.04, false});
  cat.insert({3, "folk remedies and old wives tales", 0.03, false});
  cat.save_jsonl(f.catalog);

  const testing::KeywordActivationSource src(kw, width);
  auto dump = [&](const std::string& prompt, const std::string& completion) {
    backend::write_matrix(f.activations / (backend::activation_key(prompt, completion) + ".tensor"),
                          src.capture(prompt, completion).activations);
  };
  dump("", kQuestion);
  for (const auto& r : base) dump(kQuestion, r);
  return f;
}
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run on the toy fixture") {
    const auto dir = testing::temp_dir("cli-run");
    const auto rep = (dir / "report.json").string();
    const auto trace = (dir / "trace.jsonl").string();
    const auto r = invoke({"run", "--dataset", kToy, "--mock", "--out-report", rep, "--out-trace", trace, "--phi", "0.6",
                        "--delta", "0.05", "--n", "10", "--max-iters", "3", "--workers", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("accuracy") != std::string::npos);
    REQUIRE(fs::exists(rep));
    REQUIRE(fs::exists(trace));
    const auto report = bench::read_report(rep);
    CHECK(report.per_query.size() == 8);
    CHECK(report.config_snapshot.entropy_threshold == 0.6);
    CHECK(report.config_snapshot.density_threshold == 0.05);
    CHECK(report.config_snapshot.n_generations == 10);
    CHECK(report.config_snapshot.max_enrichment_iters == 3);
  }

  TEST_CASE("config file and flag precedence") {
    const auto dir = testing::temp_dir("cli-config");
    write_file(dir / "c.json", "entropy_threshold = 0.9\nn_generations = 6\n");
    const auto rep = (dir / "report.json").string();
    const auto r = invoke({"run", "--dataset", kToy, "--mock", "--config", (dir / "c.json").string(), "--n", "8",
                        "--subsample", "3", "--out-report", rep, "--out-trace", (dir / "t.jsonl").string()});
    REQUIRE(r.code == 0);
    const auto report = bench::read_report(rep);
    CHECK(report.per_query.size() == 3);
    CHECK(report.config_snapshot.entropy_threshold == 0.9);
    CHECK(report.config_snapshot.n_generations == 8);
  }

  TEST_CASE("usage errors exit 2") {
    auto r = invoke({"run", "--mock"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--dataset") != std::string::npos);
    r = invoke({"run", "--dataset", kToy, "--mock", "--phi", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("entropy_threshold") != std::string::npos);
    r = invoke({"ask", "--mock", "--question", "   "});
    CHECK(r.code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"run", "--dataset", "/nonexistent.jsonl", "--mock"}).code == 2);
  }

  TEST_CASE("help lists the flags") {
    auto r = invoke({"--help"});
    CHECK(r.code == 0);
    for (const char* s : {"run", "ask", "grid", "density", "import-catalog", "import-dataset"})
      CHECK(r.out.find(s) != std::string::npos);
    r = invoke({"run", "--help"});
    CHECK(r.code == 0);
    for (const char* s : {"--phi", "--delta", "--n", "--max-iters", "--top-k", "--mode", "--seed", "--quartile-scheme",
                          "--config", "--mock", "--sae-manifest", "--catalog", "--workers"})
      CHECK(r.out.find(s) != std::string::npos);
  }

  TEST_CASE("ask converges through file backends") {
    const auto f = ask_fixture();
    const auto r = invoke({"ask", "--mock", "--script", f.script.string(), "--sae-manifest", f.manifest.string(),
                        "--catalog", f.catalog.string(), "--activations", f.activations.string(), "--question",
                        kQuestion});
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("iteration 0: entropy 1.279854 clusters 4 flagged yes") != std::string::npos);
    CHECK(r.out.find("iteration 1: entropy 0.000000 clusters 1 flagged no") != std::string::npos);
    CHECK(r.out.find("  directive: - NOTE: ") != std::string::npos);
    CHECK(r.out.find("status: converged") != std::string::npos);
    CHECK(r.out.find("final entropy: 0.000000") != std::string::npos);
    CHECK(r.out.find("final answer: The thyroid gland produces thyroxine.") != std::string::npos);
  }

  TEST_CASE("ask in mode b prints the reflective note") {
    const auto f = ask_fixture();
    const auto r = invoke({"ask", "--mock", "--mode", "b", "--script", f.script.string(), "--question", kQuestion});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("  directive: - NOTE - think carefully before answering.") != std::string::npos);
  }

  TEST_CASE("ask reports backend failures with exit 1") {
    const auto f = ask_fixture();
    // no cached activations for this question
    const auto r = invoke({"ask", "--mock", "--script", f.script.string(), "--sae-manifest", f.manifest.string(),
                        "--catalog", f.catalog.string(), "--activations", f.activations.string(), "--question",
                        std::string(kQuestion) + " Explain."});
    CHECK(r.code == 1);
    CHECK(r.out.find("status: failed") != std::string::npos);
    CHECK(invoke({"ask", "--mode", "b", "--mock", "--script", f.script.string(), "--question", "Unscripted?"}).code == 1);
    // full mode needs an SAE
    CHECK(invoke({"ask", "--mock", "--script", f.script.string(), "--question", kQuestion}).code == 0);
    CHECK(invoke({"ask", "--script", f.script.string(), "--question", kQuestion}).code == 2);
  }

  TEST_CASE("grid through the CLI") {
    const auto dir = testing::temp_dir("cli-grid");
    const auto csv = (dir / "g.csv").string();
    const auto r = invoke({"grid", "--dataset", kToy, "--mock", "--phis", "0.6,0.9", "--deltas", "0.05", "--out-csv", csv,
                        "--out-report", (dir / "g.json").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("entropy_threshold,0.05") != std::string::npos);
    CHECK(r.out.find("best phi") != std::string::npos);
    CHECK(testing::read_bytes(csv).rfind("entropy_threshold,0.05\n0.6,", 0) == 0);
    const auto j = nlohmann::json::parse(testing::read_bytes(dir / "g.json"));
    CHECK(j["cells"].size() == 2);
  }

  TEST_CASE("density estimation writes the catalog") {
    const auto dir = testing::temp_dir("cli-density");
    sae::make_synthetic_sae(8, 32, 3).save(dir / "sae.json");
    backend::write_matrix(dir / "ref.tensor", sae::make_reference_activations(1200, 8, 4));
    sae::make_synthetic_catalog(32, 5).save_jsonl(dir / "cat.jsonl");
    const std::vector<std::string> base{"density", "--sae-manifest", (dir / "sae.json").string(),
                                        "--reference-activations", (dir / "ref.tensor").string(), "--catalog",
                                        (dir / "cat.jsonl").string()};
    auto args = base;
    args.insert(args.end(), {"--out", (dir / "a.jsonl").string()});
    REQUIRE(invoke(args).code == 0);
    args = base;
    args.insert(args.end(), {"--out", (dir / "b.jsonl").string()});
    REQUIRE(invoke(args).code == 0);
    CHECK(testing::read_bytes(dir / "a.jsonl") == testing::read_bytes(dir / "b.jsonl"));
    const auto cat = backend::FeatureCatalog::load_jsonl(dir / "a.jsonl");
    std::size_t seen = 0;
    for (const auto& [i, e] : cat.entries()) {
      REQUIRE(e.reference_density);
      CHECK(*e.reference_density >= 0.0);
      CHECK(*e.reference_density <= 1.0);
      ++seen;
    }
    CHECK(seen == 32);

    args = base;
    args.insert(args.end(), {"--density-floor", "5000"});
    CHECK(invoke(args).code == 2);
    CHECK(invoke({"density", "--reference-activations", "x", "--catalog", "y"}).code == 2);
    CHECK(invoke({"density", "--sae-manifest", (dir / "missing.json").string(), "--reference-activations",
               (dir / "ref.tensor").string(), "--catalog", (dir / "cat.jsonl").string()})
              .code == 2);
  }

  TEST_CASE("dataset and catalog imports") {
    const auto dir = testing::temp_dir("cli-import");
    write_file(dir / "tqa.csv",
               "Type,Category,Question,Best Answer,Correct Answers,Incorrect Answers,Source\n"
               "Adversarial,Misconceptions,What happens if you crack your knuckles a lot?,Nothing in "
               "particular happens,Nothing happens; You do not get arthritis,You get arthritis,x\n");
    auto r = invoke({"import-dataset", "--format", "truthfulqa", "--input", (dir / "tqa.csv").string(), "--out",
                  (dir / "tqa.jsonl").string()});
    REQUIRE(r.code == 0);
    const auto recs = bench::ingest(dir / "tqa.jsonl");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].gold_answers.front() == "Nothing in particular happens");
    CHECK(invoke({"import-dataset", "--format", "squad", "--input", (dir / "tqa.csv").string(), "--out",
               (dir / "x.jsonl").string()})
              .code == 2);

    write_file(dir / "feat.json", R"([{"index": 5, "description": "terms about zodiac signs", "frac_nonzero": 0.01}])");
    r = invoke({"import-catalog", "--input", (dir / "feat.json").string(), "--out", (dir / "cat.jsonl").string()});
    REQUIRE(r.code == 0);
    CHECK(backend::FeatureCatalog::load_jsonl(dir / "cat.jsonl").find(5)->description == "terms about zodiac signs");
    CHECK(invoke({"import-catalog", "--out", (dir / "c2.jsonl").string()}).code == 2);
  }
}
