// driftpool command-line entry point: run, compare, generate, purity.
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "driftpool/commands.hpp"
#include "driftpool/error.hpp"

using namespace driftpool;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("driftpool");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DRIFTPOOL_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour names it really knows
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    else spdlog::warn("DRIFTPOOL_LOG: unknown level '{}'", env);
  }
}

// Flags shared by run (and applied on top of --config).
struct RunFlags {
  std::string config;
  std::string data, column, forecaster, score, normalize, synthetic, out;
  std::optional<std::size_t> lookback, horizon, max_pool;
  std::optional<std::uint64_t> seed;
  bool baseline = false, no_evolution = false, no_elimination = false, no_abandonment = false,
       no_lr_adjust = false, local_only = false, global_only = false;
  std::vector<std::string> sets;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "manifest file (key = value lines)");
    app->add_option("--data", data, "CSV file with the series");
    app->add_option("--column", column, "column name or zero-based index");
    app->add_option("--synthetic", synthetic, "'default' or a synthetic spec JSON file");
    app->add_option("--lookback", lookback, "input window length L");
    app->add_option("--horizon", horizon, "forecast horizon H");
    app->add_option("--forecaster", forecaster, "naive|linear|mlp")
        ->check(CLI::IsMember({"naive", "linear", "mlp"}));
    app->add_option("--seed", seed, "forecaster initialisation seed");
    app->add_option("--out", out, "output directory for the results bundle");
    app->add_option("--max-pool", max_pool, "pool capacity (0 = unbounded)");
    app->add_option("--score", score, "euclidean|mle")->check(CLI::IsMember({"euclidean", "mle"}));
    app->add_option("--normalize", normalize, "none|warm|whole")
        ->check(CLI::IsMember({"none", "warm", "whole"}));
    app->add_flag("--baseline", baseline, "run the bare forecaster without a pool");
    app->add_flag("--no-evolution", no_evolution);
    app->add_flag("--no-elimination", no_elimination);
    app->add_flag("--no-abandonment", no_abandonment);
    app->add_flag("--no-lr-adjust", no_lr_adjust);
    app->add_flag("--local-only", local_only, "retrieve on the local gene only");
    app->add_flag("--global-only", global_only, "retrieve on the global gene only");
    app->add_option("--set", sets, "extra key=value manifest overrides");
  }

  RunManifest build() const {
    RunManifest m = config.empty() ? RunManifest{} : RunManifest::load(config);
    if (!data.empty()) {
      m.set("data", data);
      m.set("synthetic", "");
    }
    if (!synthetic.empty()) {
      m.set("synthetic", synthetic);
      m.set("data", "");
    }
    if (!column.empty()) m.set("column", column);
    if (lookback) m.set("lookback", std::to_string(*lookback));
    if (horizon) m.set("horizon", std::to_string(*horizon));
    if (!forecaster.empty()) m.set("forecaster", forecaster);
    if (seed) m.set("seed", std::to_string(*seed));
    if (!out.empty()) m.set("out", out);
    if (max_pool) m.set("max_pool", std::to_string(*max_pool));
    if (!score.empty()) m.set("score", score);
    if (!normalize.empty()) m.set("normalize", normalize);
    if (baseline) m.set("mode", "baseline");
    if (no_evolution) m.set("evolution", "false");
    if (no_elimination) m.set("elimination", "false");
    if (no_abandonment) m.set("gradient_abandonment", "false");
    if (no_lr_adjust) m.set("optimizer_adjustment", "false");
    if (local_only) m.set("use_global_gene", "false");
    if (global_only) m.set("use_local_gene", "false");
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::Validation, "--set expects key=value, got '" + s + "'");
      }
      m.set(s.substr(0, eq), s.substr(eq + 1));
    }
    return m;
  }
};

int cmd_run_main(const RunFlags& flags) {
  const RunManifest m = flags.build();
  const RunOutput r = cmd_run(m);
  const auto& s = r.result.summary;
  std::cout << "config_hash " << r.config_hash << '\n'
            << "mean_mse " << std::setprecision(10) << s.mean_mse << '\n'
            << "instances " << s.instances << '\n'
            << "final_pool_size " << s.final_pool_size << '\n'
            << "evolutions " << s.total_evolutions << '\n'
            << "eliminations " << s.total_eliminations << '\n';
  if (!m.out.empty()) std::cout << "results " << m.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"driftpool: online forecasting with an evolving pool of forecasters"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run one manifest");
  run_flags.attach(run);

  std::vector<std::string> compare_files;
  std::string compare_csv;
  auto* compare = app.add_subcommand("compare", "compare manifests against the first one");
  compare->add_option("manifests", compare_files, "manifest files; the first is the baseline")
      ->required()
      ->expected(2, -1);
  compare->add_option("--out", compare_csv, "also write the table as CSV");

  std::string gen_spec, gen_out, gen_labels;
  std::optional<std::uint64_t> gen_seed;
  auto* gen = app.add_subcommand("generate", "write a labeled synthetic stream");
  gen->add_option("--spec", gen_spec, "synthetic spec JSON (default: built-in acceptance stream)");
  gen->add_option("--seed", gen_seed, "noise seed (overrides the spec)");
  gen->add_option("--out", gen_out, "values CSV path")->required();
  gen->add_option("--labels", gen_labels, "labels CSV path (default: <out stem>_labels.csv)");

  std::string pur_results, pur_labels;
  bool pur_exclude = false;
  auto* pur = app.add_subcommand("purity", "assignment purity of a labeled run");
  pur->add_option("results", pur_results, "results.json or the bundle directory")->required();
  pur->add_option("--labels", pur_labels, "labels CSV")->required();
  pur->add_flag("--exclude-safety", pur_exclude,
                "skip each evolved entry's first tau_safe selections");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run_main(run_flags);
    if (*compare) {
      std::vector<RunManifest> manifests;
      for (const auto& f : compare_files) manifests.push_back(RunManifest::load(f));
      for (auto& m : manifests) m.out.clear();
      const CompareOutput out = cmd_compare(manifests, compare_files, compare_csv);
      std::cout << out.table;
      return kExitOk;
    }
    if (*gen) {
      SyntheticSpec spec = SyntheticSpec::default_acceptance();
      if (!gen_spec.empty()) {
        std::ifstream in(gen_spec);
        if (!in) throw Error(ErrorKind::Io, "cannot open synthetic spec '" + gen_spec + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        spec = SyntheticSpec::from_json(ss.str());
      }
      const GenerateOutput out = cmd_generate(spec, gen_seed, gen_out, gen_labels);
      std::cout << out.summary << "values " << out.values_path.string() << '\n'
                << "labels " << out.labels_path.string() << '\n';
      return kExitOk;
    }
    if (*pur) {
      std::filesystem::path p = pur_results;
      if (std::filesystem::is_directory(p)) p /= "results.json";
      std::cout << format_purity(cmd_purity(p, pur_labels, pur_exclude));
      return kExitOk;
    }
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
