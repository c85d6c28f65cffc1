#ifndef OFEE_RUN_H_
#define OFEE_RUN_H_

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ofee/codec.h"
#include "ofee/common.h"
#include "ofee/corpus.h"
#include "ofee/generation.h"
#include "ofee/metrics.h"
#include "ofee/selector.h"
#include "ofee/tuning.h"

namespace ofee {

// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> theta;
  std::optional<std::string> backend;
};

// Run configuration (JSON). Paths resolve against the config file's
// directory. Example:
//   {"corpus": {"train": "train.jsonl", "dev": "dev.jsonl", "test": ...},
//    "backend": {"id": "toy", "hyperparams": {...}},
//    "codec": {...}, "generation": {"beam_width": 10, ...},
//    "selector": {"margin": 0.5, "negatives_k": 5, "learning_rate": 0.005,
//                 "epochs": 10, "hash_dim": 262144},
//    "selection": "tune" | {"alpha": 0.4, "theta": 0.2},
//    "tuning": {"alpha_grid": [...], "theta_grid": [...], "metric": "trig_c"},
//    "pairs": {"multi_trigger_target": false, "include_empty_contexts": true},
//    "seed": 13}
struct RunConfig {
  std::string base_dir = ".";
  std::map<std::string, std::string> corpus;
  std::string backend_id = "toy";
  nlohmann::json backend_hyperparams = nlohmann::json::object();
  CodecConfig codec;
  GenerationConfig generation;
  SelectorTrainConfig selector;
  uint32_t hash_dim = HashedNgramScorer::kDefaultDim;
  bool tune_selection = false;
  SelectionConfig selection;
  // Selection overrides are kept out of the config hash: they only affect
  // predictions, which record the values they used.
  std::optional<double> alpha_override;
  std::optional<double> theta_override;
  std::vector<double> alpha_grid = DefaultAlphaGrid();
  std::vector<double> theta_grid = DefaultThetaGrid();
  Subtask metric = Subtask::kTrigC;
  PairOptions pair_options;
  uint64_t seed = 13;

  nlohmann::json effective;  // config after overrides, hashed for provenance
  std::string hash;

  // Throws Error(kConfig) on malformed values.
  static RunConfig FromJson(const nlohmann::json &j,
                            const std::string &base_dir,
                            const Overrides &overrides = {});
  static RunConfig Load(const std::string &path,
                        const Overrides &overrides = {});

  std::string CorpusPath(const std::string &split) const;
};

// Executes pipeline stages against one run directory. Every artifact
// carries the config hash; timestamps only go to run.log.
class Runner {
 public:
  Runner(RunConfig config, std::string run_dir, std::ostream *log = nullptr);

  void Preprocess();
  void GenCandidates(const std::string &split);
  SelectorTrainReport TrainSelector();
  GridResult Tune();
  void Predict(const std::string &split);
  EvalReport Evaluate(const std::string &split);
  // theta_sweep.csv at the tuned alpha and alpha_sweep.csv at the tuned
  // theta, over the dev split.
  void Report();
  // preprocess -> gen-candidates (train, dev, test) -> train-selector ->
  // tune -> predict -> evaluate -> report. Returns the test report.
  EvalReport Pipeline();

  // Dev/test items with rank scores, cached in candidates.<split>.scored.jsonl.
  std::vector<ScoredItem> ScoredItems(const std::string &split);
  SelectionConfig ResolveSelection() const;

  std::string Path(const std::string &name) const;
  const RunConfig &config() const { return config_; }

 private:
  void Log(const std::string &message);
  void RequireArtifact(const std::string &name, const std::string &hint) const;
  void CheckHash(const nlohmann::json &j, const std::string &artifact);
  void WriteText(const std::string &name, const std::string &text);
  std::vector<ContextInstance> LoadSplit(const std::string &split);
  HashedNgramScorer LoadScorer();

  RunConfig config_;
  std::string run_dir_;
  std::ostream *log_;
};

// Process exit codes: 0 success, 2 config error, 3 missing artifact,
// 4 data error.
int ExitCodeFor(ErrorKind kind);

}  // namespace ofee

#endif  // OFEE_RUN_H_
