#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sitm/config.hpp"
#include "sitm/error.hpp"
#include "sitm/pipeline.hpp"
#include "sitm/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> modalities;
  std::optional<unsigned> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "TOML-style configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "64-bit seed (overrides the config)");
  cmd->add_option("--modalities", flags.modalities, "comma-separated subset of face,audio,gaze,head,hr");
  cmd->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

sitm::RunConfig resolve(const CommonFlags& flags) {
  auto config = sitm::load_run_config(flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.modalities) config.modalities = sitm::parse_modality_list(split_list(*flags.modalities));
  return config;
}

void report_written(const sitm::OutputBundle& bundle, const fs::path& dir) {
  std::cerr << "wrote " << bundle.files().size() << " files to " << dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sit-markers: multimodal behavioural markers from simulated-interaction recordings"};
  app.require_subcommand(1);

  CommonFlags synth_flags, extract_flags, evaluate_flags;

  auto* synth = app.add_subcommand("synth", "generate a synthetic cohort in the ingest formats");
  std::optional<fs::path> synth_spec;
  fs::path synth_out;
  synth->add_option("--spec", synth_spec, "synthetic cohort spec (TOML)")->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "output directory")->required();
  add_common(synth, synth_flags);

  auto* extract = app.add_subcommand("extract", "ingest a cohort and write the feature table");
  fs::path manifest, extract_out;
  extract->add_option("--manifest", manifest, "cohort manifest.csv")->required()->check(CLI::ExistingFile);
  extract->add_option("--out", extract_out, "output directory")->required();
  add_common(extract, extract_flags);

  auto* evaluate = app.add_subcommand("evaluate", "leave-one-out evaluation of unimodal and fused models");
  fs::path features, evaluate_out;
  bool ablate = false, shap = false;
  evaluate->add_option("--features", features, "features.csv from extract")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", evaluate_out, "report directory")->required();
  evaluate->add_flag("--ablate", ablate, "leave-one-modality-out late-fusion ablation");
  evaluate->add_flag("--shap", shap, "TreeSHAP attributions for the configured model");
  add_common(evaluate, evaluate_flags);

  auto* plotdata = app.add_subcommand("plotdata", "write figure data from a report bundle");
  fs::path report_dir, extract_dir, plot_out;
  plotdata->add_option("--report", report_dir, "report directory from evaluate")->required();
  plotdata->add_option("--extract", extract_dir, "output directory of extract")->required();
  plotdata->add_option("--out", plot_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      sitm::SynthSpec spec;
      if (synth_spec) spec = sitm::make_synth_spec(sitm::ConfigFile::read(*synth_spec));
      if (synth_flags.seed) spec.seed = *synth_flags.seed;
      spec.validate();
      const auto participants = sitm::generate_participants(spec);
      sitm::write_cohort(participants, synth_out);
      std::cerr << "wrote " << participants.size() << " participants to " << synth_out.string() << "\n";
    } else if (*extract) {
      const auto config = resolve(extract_flags);
      const auto result = sitm::run_extract(manifest, config);
      const auto bundle = sitm::extract_outputs(result, config);
      bundle.commit(extract_out);
      report_written(bundle, extract_out);
    } else if (*evaluate) {
      const auto config = resolve(evaluate_flags);
      const auto table = sitm::read_features_csv(features);
      const auto ev = sitm::run_evaluate(table, config, {ablate, shap});
      const auto bundle = sitm::evaluate_outputs(ev, config);
      bundle.commit(evaluate_out);
      std::cout << sitm::format_summary_csv(ev);
    } else if (*plotdata) {
      const auto bundle = sitm::plotdata_outputs(report_dir, extract_dir);
      bundle.commit(plot_out);
      report_written(bundle, plot_out);
    }
  } catch (const sitm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sitm::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
