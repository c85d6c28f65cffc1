#include "ofee/run.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "ofee/common.h"

namespace ofee {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char *kPairs = "pairs.jsonl";
constexpr const char *kOntology = "ontology.json";
constexpr const char *kSelectorModel = "selector.model";
constexpr const char *kTuningCsv = "tuning.csv";
constexpr const char *kTuningJson = "tuning.json";
constexpr const char *kPredictions = "predictions.jsonl";
constexpr const char *kReport = "report.json";

std::string CandidatesFile(const std::string &split) {
  return "candidates." + split + ".jsonl";
}

std::string ScoredFile(const std::string &split) {
  return "candidates." + split + ".scored.jsonl";
}

template <typename T>
T Get(const json &j, const char *key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    return fallback;
  }
  return j.at(key).get<T>();
}

std::vector<json> ReadJsonl(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kMissingArtifact, "cannot open " + path);
  std::vector<json> lines;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (NormalizeWhitespace(line).empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::exception &e) {
      throw Error(ErrorKind::kData,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lines;
}

json ReadJson(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kMissingArtifact, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kData, path + ": " + e.what());
  }
}

std::string Timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kMissingArtifact:
      return 3;
    default:
      return 4;
  }
}

RunConfig RunConfig::FromJson(const json &raw, const std::string &base_dir,
                              const Overrides &overrides) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  try {
    if (!raw.is_object()) throw Error(ErrorKind::kConfig, "config must be an object");
    json j = raw;
    if (overrides.seed) j["seed"] = *overrides.seed;
    if (overrides.backend) j["backend"]["id"] = *overrides.backend;
    cfg.effective = j;
    cfg.hash = HexFingerprint(j.dump());

    if (j.contains("corpus")) {
      cfg.corpus = j.at("corpus").get<std::map<std::string, std::string>>();
    }
    const json backend = Get(j, "backend", json::object());
    cfg.backend_id = Get<std::string>(backend, "id", "toy");
    cfg.backend_hyperparams = Get(backend, "hyperparams", json::object());

    const json codec = Get(j, "codec", json::object());
    cfg.codec.trigger_prefix = Get(codec, "trigger_prefix", cfg.codec.trigger_prefix);
    cfg.codec.argument_prefix = Get(codec, "argument_prefix", cfg.codec.argument_prefix);
    cfg.codec.trigger_marker = Get(codec, "trigger_marker", cfg.codec.trigger_marker);
    cfg.codec.and_token = Get(codec, "and_token", cfg.codec.and_token);
    cfg.codec.none_token = Get(codec, "none_token", cfg.codec.none_token);
    cfg.codec.empty_token = Get(codec, "empty_token", cfg.codec.empty_token);
    cfg.codec.Validate();

    const json gen = Get(j, "generation", json::object());
    cfg.generation.beam_width = Get(gen, "beam_width", cfg.generation.beam_width);
    cfg.generation.max_input_len = Get(gen, "max_input_len", cfg.generation.max_input_len);
    cfg.generation.max_output_len = Get(gen, "max_output_len", cfg.generation.max_output_len);
    cfg.generation.Validate();

    cfg.seed = Get<uint64_t>(j, "seed", cfg.seed);
    const json sel = Get(j, "selector", json::object());
    cfg.selector.margin = Get(sel, "margin", cfg.selector.margin);
    cfg.selector.negatives_k = Get(sel, "negatives_k", cfg.selector.negatives_k);
    cfg.selector.learning_rate = Get(sel, "learning_rate", cfg.selector.learning_rate);
    cfg.selector.epochs = Get(sel, "epochs", cfg.selector.epochs);
    cfg.selector.seed = cfg.seed;
    cfg.hash_dim = Get(sel, "hash_dim", cfg.hash_dim);
    if (cfg.hash_dim == 0) throw Error(ErrorKind::kConfig, "hash_dim must be > 0");
    cfg.selector.Validate();

    if (j.contains("selection")) {
      const json &s = j.at("selection");
      if (s.is_string()) {
        if (s.get<std::string>() != "tune") {
          throw Error(ErrorKind::kConfig, "selection must be \"tune\" or an object");
        }
        cfg.tune_selection = true;
      } else {
        cfg.selection.alpha = Get(s, "alpha", cfg.selection.alpha);
        cfg.selection.theta = Get(s, "theta", cfg.selection.theta);
      }
    }
    cfg.alpha_override = overrides.alpha;
    cfg.theta_override = overrides.theta;
    if (overrides.alpha) cfg.selection.alpha = *overrides.alpha;
    if (overrides.theta) cfg.selection.theta = *overrides.theta;
    cfg.selection.Validate();

    const json tuning = Get(j, "tuning", json::object());
    cfg.alpha_grid = Get(tuning, "alpha_grid", cfg.alpha_grid);
    cfg.theta_grid = Get(tuning, "theta_grid", cfg.theta_grid);
    cfg.metric = SubtaskFromName(Get<std::string>(tuning, "metric", "trig_c"));

    const json pairs = Get(j, "pairs", json::object());
    cfg.pair_options.multi_trigger_target =
        Get(pairs, "multi_trigger_target", cfg.pair_options.multi_trigger_target);
    cfg.pair_options.include_empty_contexts = Get(
        pairs, "include_empty_contexts", cfg.pair_options.include_empty_contexts);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kConfig, std::string("bad config: ") + e.what());
  }
  return cfg;
}

RunConfig RunConfig::Load(const std::string &path, const Overrides &overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kConfig, path + ": " + e.what());
  }
  std::string base = fs::absolute(path).parent_path().string();
  return FromJson(j, base, overrides);
}

std::string RunConfig::CorpusPath(const std::string &split) const {
  auto it = corpus.find(split);
  if (it == corpus.end()) {
    throw Error(ErrorKind::kConfig, "no corpus path for split " + split);
  }
  fs::path p(it->second);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  return p.string();
}

Runner::Runner(RunConfig config, std::string run_dir, std::ostream *log)
    : config_(std::move(config)), run_dir_(std::move(run_dir)), log_(log) {
  fs::create_directories(run_dir_);
}

std::string Runner::Path(const std::string &name) const {
  return (fs::path(run_dir_) / name).string();
}

void Runner::Log(const std::string &message) {
  if (log_) *log_ << message << "\n";
  std::ofstream sidecar(Path("run.log"), std::ios::app);
  sidecar << Timestamp() << " " << message << "\n";
}

void Runner::RequireArtifact(const std::string &name,
                             const std::string &hint) const {
  if (!fs::exists(Path(name))) {
    throw Error(ErrorKind::kMissingArtifact, name + " not found: " + hint);
  }
}

void Runner::CheckHash(const json &j, const std::string &artifact) {
  std::string hash = Get<std::string>(j, "config_hash", "");
  if (hash != config_.hash) {
    Log("warning: " + artifact + " was produced with config " + hash +
        ", current config is " + config_.hash);
  }
}

void Runner::WriteText(const std::string &name, const std::string &text) {
  std::string tmp = Path(name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorKind::kData, "cannot write " + tmp);
    out << text;
  }
  fs::rename(tmp, Path(name));
}

std::vector<ContextInstance> Runner::LoadSplit(const std::string &split) {
  LoadedCorpus loaded = LoadCorpus(config_.CorpusPath(split));
  for (const auto &e : loaded.report.errors) {
    Log("warning: " + split + " line " + std::to_string(e.line) + ": " +
        e.message);
  }
  json report = loaded.report.ToJson();
  report["config_hash"] = config_.hash;
  WriteText("load_report." + split + ".json", report.dump(2) + "\n");
  return std::move(loaded.instances);
}

void Runner::Preprocess() {
  auto train = LoadSplit("train");
  Ontology ontology = OntologyFromCorpus(train);
  std::ostringstream pairs;
  size_t n_pairs = 0;
  for (const auto &inst : train) {
    for (const auto &pair :
         MakeTrainingPairs(inst, ontology, config_.codec, config_.pair_options)) {
      json j = PairToJson(pair);
      j["config_hash"] = config_.hash;
      pairs << j.dump() << "\n";
      ++n_pairs;
    }
  }
  WriteText(kPairs, pairs.str());
  json oj = {{"config_hash", config_.hash}, {"ontology", OntologyToJson(ontology)}};
  WriteText(kOntology, oj.dump(2) + "\n");
  Log("preprocess: " + std::to_string(train.size()) + " contexts, " +
      std::to_string(n_pairs) + " training pairs");
}

void Runner::GenCandidates(const std::string &split) {
  RequireArtifact(kPairs, "run preprocess first");
  std::vector<TrainingPair> pairs;
  auto lines = ReadJsonl(Path(kPairs));
  if (!lines.empty()) CheckHash(lines.front(), kPairs);
  for (const auto &j : lines) pairs.push_back(PairFromJson(j));

  auto backend = MakeBackend(config_.backend_id, config_.backend_hyperparams,
                             config_.base_dir);
  backend->Fit(pairs, config_.backend_hyperparams);

  auto instances = LoadSplit(split);
  std::ostringstream out;
  size_t n_warnings = 0;
  for (const auto &inst : instances) {
    CandidateList list = GenerateTriggerCandidates(*backend, inst,
                                                   config_.generation,
                                                   config_.codec);
    CacheCandidateArguments(*backend, list, config_.codec);
    n_warnings += list.warnings.size();
    json j = CandidateListToJson(list);
    j["config_hash"] = config_.hash;
    out << j.dump() << "\n";
  }
  WriteText(CandidatesFile(split), out.str());
  fs::remove(Path(ScoredFile(split)));
  Log("gen-candidates " + split + ": " + std::to_string(instances.size()) +
      " contexts, " + std::to_string(n_warnings) + " parse warnings");
}

SelectorTrainReport Runner::TrainSelector() {
  RequireArtifact(CandidatesFile("train"), "run gen-candidates on train first");
  auto gold = LoadSplit("train");
  std::unordered_map<std::string, const ContextInstance *> by_doc;
  for (const auto &inst : gold) by_doc[inst.doc_id] = &inst;

  std::vector<SelectorExample> data;
  auto lines = ReadJsonl(Path(CandidatesFile("train")));
  if (!lines.empty()) CheckHash(lines.front(), CandidatesFile("train"));
  for (const auto &j : lines) {
    CandidateList list = CandidateListFromJson(j);
    auto it = by_doc.find(list.doc_id);
    if (it == by_doc.end()) {
      throw Error(ErrorKind::kData, "candidates for unknown doc " + list.doc_id);
    }
    SelectorExample ex;
    ex.context = it->second->context;
    for (const auto &f : it->second->gold_frames) ex.gold.push_back(f.trigger);
    ex.candidates = std::move(list);
    data.push_back(std::move(ex));
  }

  HashedNgramScorer scorer(config_.hash_dim);
  SelectorTrainReport report =
      ofee::TrainSelector(scorer, data, config_.selector, config_.codec);
  json model = scorer.ToJson();
  model["config_hash"] = config_.hash;
  model["loss_trace"] = report.loss_trace;
  model["trained_instances"] = report.trained_instances;
  model["skipped_instances"] = report.skipped_instances;
  WriteText(kSelectorModel, model.dump() + "\n");
  for (const auto &entry : fs::directory_iterator(run_dir_)) {
    std::string name = entry.path().filename().string();
    if (name.size() > 13 && name.ends_with(".scored.jsonl")) fs::remove(entry);
  }
  Log("train-selector: " + std::to_string(report.trained_instances) +
      " trained, " + std::to_string(report.skipped_instances) +
      " skipped, final loss " +
      FormatDouble(report.loss_trace.empty() ? 0.0 : report.loss_trace.back()));
  return report;
}

HashedNgramScorer Runner::LoadScorer() {
  RequireArtifact(kSelectorModel, "run train-selector first");
  json model = ReadJson(Path(kSelectorModel));
  CheckHash(model, kSelectorModel);
  return HashedNgramScorer::FromJson(model);
}

std::vector<ScoredItem> Runner::ScoredItems(const std::string &split) {
  auto gold = LoadSplit(split);
  std::unordered_map<std::string, const ContextInstance *> by_doc;
  for (const auto &inst : gold) by_doc[inst.doc_id] = &inst;

  std::vector<CandidateList> lists;
  if (fs::exists(Path(ScoredFile(split)))) {
    auto lines = ReadJsonl(Path(ScoredFile(split)));
    if (!lines.empty()) CheckHash(lines.front(), ScoredFile(split));
    for (const auto &j : lines) lists.push_back(CandidateListFromJson(j));
  } else {
    RequireArtifact(CandidatesFile(split),
                    "run gen-candidates on " + split + " first");
    HashedNgramScorer scorer = LoadScorer();
    auto lines = ReadJsonl(Path(CandidatesFile(split)));
    if (!lines.empty()) CheckHash(lines.front(), CandidatesFile(split));
    std::ostringstream out;
    for (const auto &j : lines) {
      CandidateList list = CandidateListFromJson(j);
      ScoreCandidates(list, scorer, config_.codec);
      json sj = CandidateListToJson(list);
      sj["config_hash"] = config_.hash;
      out << sj.dump() << "\n";
      lists.push_back(std::move(list));
    }
    WriteText(ScoredFile(split), out.str());
  }

  std::vector<ScoredItem> items;
  for (auto &list : lists) {
    auto it = by_doc.find(list.doc_id);
    if (it == by_doc.end()) {
      throw Error(ErrorKind::kData, "candidates for unknown doc " + list.doc_id);
    }
    items.push_back({*it->second, std::move(list)});
  }
  return items;
}

GridResult Runner::Tune() {
  // Candidates are the first prerequisite the user is told about.
  RequireArtifact(CandidatesFile("dev"), "run gen-candidates on dev first");
  auto dev = ScoredItems("dev");
  GridResult result =
      GridSearch(dev, config_.alpha_grid, config_.theta_grid, config_.metric);
  WriteText(kTuningCsv, ScoreTableCsv(result.table));
  json tj = {{"config_hash", config_.hash},
             {"alpha", result.alpha},
             {"theta", result.theta},
             {"metric", SubtaskKeyName(config_.metric)},
             {"best", result.best}};
  WriteText(kTuningJson, tj.dump(2) + "\n");
  Log("tune: alpha=" + FormatDouble(result.alpha) +
      " theta=" + FormatDouble(result.theta) + " " +
      SubtaskName(config_.metric) + " F1=" + FormatDouble(result.best));
  return result;
}

SelectionConfig Runner::ResolveSelection() const {
  SelectionConfig sel = config_.selection;
  if (config_.tune_selection) {
    RequireArtifact(kTuningJson, "run tune first");
    json tj = ReadJson(Path(kTuningJson));
    sel.alpha = tj.at("alpha").get<double>();
    sel.theta = tj.at("theta").get<double>();
  }
  // Command-line overrides win over tuned values.
  if (config_.alpha_override) sel.alpha = *config_.alpha_override;
  if (config_.theta_override) sel.theta = *config_.theta_override;
  sel.Validate();
  return sel;
}

void Runner::Predict(const std::string &split) {
  RequireArtifact(CandidatesFile(split),
                  "run gen-candidates on " + split + " first");
  RequireArtifact(kSelectorModel, "run train-selector first");
  SelectionConfig sel = ResolveSelection();
  auto items = ScoredItems(split);
  std::ostringstream out;
  for (const auto &[doc_id, frames] : PredictScored(items, sel)) {
    json j = {{"doc_id", doc_id},
              {"events", FramesToJson(frames)},
              {"split", split},
              {"alpha", sel.alpha},
              {"theta", sel.theta},
              {"config_hash", config_.hash}};
    out << j.dump() << "\n";
  }
  WriteText(kPredictions, out.str());
  Log("predict " + split + ": alpha=" + FormatDouble(sel.alpha) +
      " theta=" + FormatDouble(sel.theta));
}

EvalReport Runner::Evaluate(const std::string &split) {
  RequireArtifact(kPredictions, "run predict first");
  auto lines = ReadJsonl(Path(kPredictions));
  if (!lines.empty()) CheckHash(lines.front(), kPredictions);
  std::vector<Prediction> predictions;
  for (const auto &j : lines) {
    std::string pred_split = Get<std::string>(j, "split", split);
    if (pred_split != split) {
      throw Error(ErrorKind::kData, "predictions.jsonl holds split " +
                                        pred_split + ", not " + split);
    }
    predictions.emplace_back(j.at("doc_id").get<std::string>(),
                             FramesFromJson(j.at("events")));
  }
  EvalReport report = EvaluateCorpus(predictions, LoadSplit(split));
  json rj = {{"config_hash", config_.hash},
             {"split", split},
             {"scores", report.ToJson()}};
  WriteText(kReport, rj.dump(2) + "\n");
  std::ostringstream msg;
  msg << "evaluate " << split << ":";
  for (Subtask s : kAllSubtasks) {
    msg << " " << SubtaskName(s) << "=" << FormatDouble(report[s].prf.f1);
  }
  Log(msg.str());
  return report;
}

void Runner::Report() {
  RequireArtifact(kTuningJson, "run tune first");
  json tj = ReadJson(Path(kTuningJson));
  CheckHash(tj, kTuningJson);
  double alpha = tj.at("alpha").get<double>();
  double theta = tj.at("theta").get<double>();
  auto dev = ScoredItems("dev");

  std::vector<GridCell> theta_sweep, alpha_sweep;
  for (double t : config_.theta_grid) {
    theta_sweep.push_back({alpha, t, EvaluateScored(dev, {alpha, t})});
  }
  for (double a : config_.alpha_grid) {
    alpha_sweep.push_back({a, theta, EvaluateScored(dev, {a, theta})});
  }
  WriteText("theta_sweep.csv", ScoreTableCsv(theta_sweep));
  WriteText("alpha_sweep.csv", ScoreTableCsv(alpha_sweep));
  Log("report: wrote theta_sweep.csv (alpha=" + FormatDouble(alpha) +
      ") and alpha_sweep.csv (theta=" + FormatDouble(theta) + ")");
}

EvalReport Runner::Pipeline() {
  Preprocess();
  for (const char *split : {"train", "dev", "test"}) GenCandidates(split);
  TrainSelector();
  Tune();
  Predict("test");
  EvalReport report = Evaluate("test");
  Report();
  return report;
}

}  // namespace ofee
