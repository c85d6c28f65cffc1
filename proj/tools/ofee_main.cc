// Command-line driver for the extraction pipeline.
//
//   ofee <command> --config run.json --run-dir runs/x [--split test] ...
//
// Commands: preprocess, gen-candidates, train-selector, tune, predict,
// evaluate, pipeline, report, synth.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ofee/common.h"
#include "ofee/run.h"
#include "ofee/synthetic.h"

namespace {

struct Flags {
  std::string config;
  std::string run_dir = "run";
  std::string split;
  std::optional<uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> theta;
  std::optional<std::string> backend;
  // synth
  std::string out_dir = "data/synthetic";
  int train = 50, dev = 50, test = 50;
  uint64_t synth_seed = 2024;
};

int Run(const std::string &command, const Flags &flags) {
  if (command == "synth") {
    ofee::synthetic::WriteBundle(flags.out_dir,
                                 {flags.train, flags.dev, flags.test},
                                 flags.synth_seed);
    std::cerr << "wrote synthetic bundle to " << flags.out_dir << "\n";
    return 0;
  }
  if (flags.config.empty()) {
    throw ofee::Error(ofee::ErrorKind::kConfig, "--config is required");
  }
  ofee::Overrides overrides{flags.seed, flags.alpha, flags.theta, flags.backend};
  ofee::Runner runner(ofee::RunConfig::Load(flags.config, overrides),
                      flags.run_dir, &std::cerr);

  auto split_or = [&](const std::string &fallback) {
    return flags.split.empty() ? fallback : flags.split;
  };
  if (command == "preprocess") {
    runner.Preprocess();
  } else if (command == "gen-candidates") {
    if (flags.split.empty()) {
      for (const char *s : {"train", "dev", "test"}) runner.GenCandidates(s);
    } else {
      runner.GenCandidates(flags.split);
    }
  } else if (command == "train-selector") {
    runner.TrainSelector();
  } else if (command == "tune") {
    runner.Tune();
  } else if (command == "predict") {
    runner.Predict(split_or("test"));
  } else if (command == "evaluate") {
    std::cout << runner.Evaluate(split_or("test")).ToJson().dump(2) << "\n";
  } else if (command == "report") {
    runner.Report();
  } else if (command == "pipeline") {
    std::cout << runner.Pipeline().ToJson().dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Oracle-free event extraction pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "Run config (JSON)");
  app.add_option("--run-dir", flags.run_dir, "Run directory for artifacts");
  app.add_option("--split", flags.split, "Corpus split")
      ->check(CLI::IsMember({"train", "dev", "test"}));
  app.add_option("--seed", flags.seed, "Seed override");
  app.add_option("--alpha", flags.alpha, "Fusion weight override")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--theta", flags.theta, "Selection threshold override")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--backend", flags.backend, "Generator backend id");

  for (const char *name : {"preprocess", "gen-candidates", "train-selector",
                           "tune", "predict", "evaluate", "pipeline", "report"}) {
    app.add_subcommand(name);
  }
  auto *synth = app.add_subcommand("synth", "Write the synthetic corpus bundle");
  synth->add_option("--out", flags.out_dir, "Output directory");
  synth->add_option("--train", flags.train);
  synth->add_option("--dev", flags.dev);
  synth->add_option("--test", flags.test);
  synth->add_option("--synth-seed", flags.synth_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return Run(app.get_subcommands().front()->get_name(), flags);
  } catch (const ofee::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return ofee::ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
