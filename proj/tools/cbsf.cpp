// Experiment runner: prediction accuracy, group evaluation, novelty and
// ad-hoc group recommendations, all written as CSV.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cbsf/experiment.hpp"

#ifndef CBSF_DEFAULT_DATA_DIR
#define CBSF_DEFAULT_DATA_DIR "data"
#endif

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kInvalid = 2, kIo = 3 };

struct Options {
  std::string preset = "movielens100k";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string data_dir;
  unsigned threads = 0;
  bool quiet = false;
  bool dump_config = false;
  std::vector<cbsf::ExternalId> members;
};

cbsf::ExperimentConfig resolve_config(const Options& opt) {
  auto config = cbsf::preset(opt.preset);
  if (const char* env = std::getenv("CBSF_DATA_DIR"))
    config.data_dir = env;
  else
    config.data_dir = CBSF_DEFAULT_DATA_DIR;
  if (!opt.config.empty()) config = cbsf::load_config(std::move(config), opt.config);
  if (!opt.data_dir.empty()) config.data_dir = opt.data_dir;
  if (opt.seed) {
    config.split.seed = *opt.seed;
    config.groups.seed = *opt.seed;
  }
  return config;
}

// Writes to --out if given, stdout otherwise.
template <class Fn>
void emit(const Options& opt, Fn&& write) {
  if (opt.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw cbsf::IoError("cannot open output " + opt.out);
  write(file);
  if (!file) throw cbsf::IoError("failed writing " + opt.out);
}

int run(const std::string& command, const Options& opt) {
  const auto config = resolve_config(opt);
  if (opt.dump_config) {
    cbsf::write_config(std::cout, config);
    return kOk;
  }
  cbsf::RunOptions run_options;
  run_options.threads = opt.threads;
  if (!opt.quiet)
    run_options.log = [](std::string_view line) { std::cerr << line << '\n'; };

  if (command == "predict-eval") {
    const auto rows = cbsf::predict_eval(config, run_options);
    emit(opt, [&](std::ostream& out) { cbsf::write_accuracy_rows(out, rows); });
  } else if (command == "group-eval") {
    const auto rows = cbsf::group_eval(config, run_options);
    emit(opt, [&](std::ostream& out) { cbsf::write_metric_reports(out, rows); });
  } else if (command == "novelty-eval") {
    const auto rows = cbsf::novelty_eval(config, run_options);
    emit(opt, [&](std::ostream& out) { cbsf::write_metric_reports(out, rows); });
  } else if (command == "recommend") {
    const auto result = cbsf::recommend_for(config, opt.members, run_options);
    emit(opt, [&](std::ostream& out) { cbsf::write_recommend_result(out, result); });
  } else if (command == "split") {
    emit(opt, [&](std::ostream& out) { cbsf::write_split(out, config, run_options); });
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite-similarity group recommender experiments"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--preset", opt.preset, "movielens100k or filmtrust")
        ->check(CLI::IsMember({"movielens100k", "filmtrust"}));
    sub->add_option("--config", opt.config, "INI file applied on top of the preset");
    sub->add_option("--seed", opt.seed, "Overrides split.seed and groups.seed");
    sub->add_option("--out", opt.out, "Output CSV (default: stdout)");
    sub->add_option("--data-dir", opt.data_dir, "Base directory for relative dataset paths");
    sub->add_option("--threads", opt.threads, "Worker threads, 0 = hardware")
        ->check(CLI::Range(0u, 1024u));
    sub->add_flag("--quiet", opt.quiet, "No progress output on stderr");
    sub->add_flag("--dump-config", opt.dump_config, "Print the resolved config and exit");
  };

  add_common(app.add_subcommand("predict-eval", "MAE/RMSE for every measure and strategy"));
  add_common(app.add_subcommand("group-eval", "Group metrics per n_top over random groups"));
  add_common(app.add_subcommand("novelty-eval", "Novelty, NTC and NTR per n_top"));
  auto* recommend = app.add_subcommand("recommend", "Top-N list for one group");
  add_common(recommend);
  recommend->add_option("--members", opt.members, "External user ids of the group")
      ->required()
      ->delimiter(',');
  add_common(app.add_subcommand("split", "Train/test manifest for the configured seed"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const cbsf::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const cbsf::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const cbsf::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
