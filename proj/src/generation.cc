#include "ofee/generation.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "ofee/common.h"

namespace ofee {

using nlohmann::json;

namespace {

size_t TokenCount(std::string_view text) {
  std::string normalized = NormalizeWhitespace(text);
  if (normalized.empty()) return 0;
  return static_cast<size_t>(
             std::count(normalized.begin(), normalized.end(), ' ')) + 1;
}

std::string ResolvePath(const std::string &path, const std::string &base_dir) {
  std::filesystem::path p(path);
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  return p.string();
}

struct Registry {
  std::mutex mu;
  std::map<std::string, BackendFactory> factories;
};

Registry &GetRegistry() {
  static Registry *registry = [] {
    auto *r = new Registry;
    r->factories["toy"] = [](const json &hp, const std::string &base_dir) {
      Script script;
      if (hp.contains("script")) {
        script = LoadScript(ResolvePath(hp.at("script").get<std::string>(),
                                        base_dir));
      }
      bool memorize = hp.value("memorize", true);
      return std::make_unique<ToyBackend>(std::move(script), memorize);
    };
    return r;
  }();
  return *registry;
}

}  // namespace

void GenerationConfig::Validate() const {
  if (beam_width < 1 || max_input_len < 1 || max_output_len < 1) {
    throw Error(ErrorKind::kConfig,
                "beam_width and sequence lengths must be positive");
  }
}

bool CandidateList::HasRankScores() const {
  return std::all_of(candidates.begin(), candidates.end(),
                     [](const auto &c) { return c.rank_score.has_value(); });
}

json CandidateListToJson(const CandidateList &list) {
  json cands = json::array();
  for (const auto &c : list.candidates) {
    json triggers = json::array();
    for (const auto &t : c.triggers) {
      triggers.push_back({{"word", t.word}, {"type", t.event_type}});
    }
    cands.push_back({{"raw_text", c.raw_text},
                     {"triggers", std::move(triggers)},
                     {"beam_score", c.beam_score},
                     {"rank_score", c.rank_score ? json(*c.rank_score) : json()},
                     {"fused_score",
                      c.fused_score ? json(*c.fused_score) : json()}});
  }
  json args = json::object();
  for (const auto &[word, pairs] : list.arguments_by_word) {
    json arr = json::array();
    for (const auto &p : pairs) {
      arr.push_back({{"role", p.role}, {"entity", p.entity}});
    }
    args[word] = std::move(arr);
  }
  return {{"doc_id", list.doc_id},
          {"context", list.context},
          {"candidates", std::move(cands)},
          {"arguments_by_word", std::move(args)},
          {"warnings", list.warnings}};
}

CandidateList CandidateListFromJson(const json &j) {
  CandidateList list;
  try {
    list.doc_id = j.at("doc_id").get<std::string>();
    list.context = j.at("context").get<std::string>();
    for (const auto &cj : j.at("candidates")) {
      TriggerCandidate c;
      c.raw_text = cj.at("raw_text").get<std::string>();
      for (const auto &tj : cj.at("triggers")) {
        c.triggers.push_back({tj.at("word").get<std::string>(),
                              tj.at("type").get<std::string>()});
      }
      c.beam_score = cj.at("beam_score").get<double>();
      if (cj.contains("rank_score") && !cj.at("rank_score").is_null()) {
        c.rank_score = cj.at("rank_score").get<double>();
      }
      if (cj.contains("fused_score") && !cj.at("fused_score").is_null()) {
        c.fused_score = cj.at("fused_score").get<double>();
      }
      list.candidates.push_back(std::move(c));
    }
    if (j.contains("arguments_by_word")) {
      for (const auto &[word, arr] : j.at("arguments_by_word").items()) {
        auto &pairs = list.arguments_by_word[word];
        for (const auto &a : arr) {
          pairs.push_back({a.at("role").get<std::string>(),
                           a.at("entity").get<std::string>()});
        }
      }
    }
    if (j.contains("warnings")) {
      list.warnings = j.at("warnings").get<std::vector<std::string>>();
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kData, std::string("bad candidate list: ") + e.what());
  }
  return list;
}

ToyBackend::ToyBackend(Script script, bool memorize) : memorize_(memorize) {
  for (auto &[input, hyps] : script) {
    for (auto &h : hyps) Add(input, std::move(h));
  }
}

void ToyBackend::Add(const std::string &input, Hypothesis hypothesis) {
  auto &hyps = script_[input];
  auto it = std::find_if(hyps.begin(), hyps.end(), [&](const Hypothesis &h) {
    return h.text == hypothesis.text;
  });
  if (it != hyps.end()) {
    if (it->score >= hypothesis.score) return;
    hyps.erase(it);
  }
  auto pos = std::find_if(hyps.begin(), hyps.end(), [&](const Hypothesis &h) {
    return h.score < hypothesis.score;
  });
  hyps.insert(pos, std::move(hypothesis));
}

void ToyBackend::Fit(std::span<const TrainingPair> pairs,
                     const json & /*hyperparams*/) {
  if (!memorize_) return;
  for (const auto &pair : pairs) Add(pair.input, {pair.target, 0.0});
}

std::vector<Hypothesis> ToyBackend::GenerateTopK(std::string_view input,
                                                 int k) const {
  auto it = script_.find(input);
  if (it == script_.end() || k <= 0) return {};
  size_t n = std::min(it->second.size(), static_cast<size_t>(k));
  return {it->second.begin(), it->second.begin() + n};
}

std::string ToyBackend::GenerateGreedy(std::string_view input) const {
  auto it = script_.find(input);
  if (it == script_.end() || it->second.empty()) return "";
  return it->second.front().text;
}

Script LoadScript(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kMissingArtifact, "cannot open script " + path);
  Script script;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (NormalizeWhitespace(line).empty()) continue;
    try {
      json j = json::parse(line);
      auto &hyps = script[j.at("input").get<std::string>()];
      for (const auto &o : j.at("outputs")) {
        hyps.push_back({o.at("text").get<std::string>(),
                        o.at("score").get<double>()});
      }
    } catch (const json::exception &e) {
      throw Error(ErrorKind::kData, path + ":" + std::to_string(line_no) +
                                        ": " + e.what());
    }
  }
  return script;
}

void SaveScript(const Script &script, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kData, "cannot write " + path);
  for (const auto &[input, hyps] : script) {
    json outputs = json::array();
    for (const auto &h : hyps) {
      outputs.push_back({{"text", h.text}, {"score", h.score}});
    }
    out << json{{"input", input}, {"outputs", std::move(outputs)}}.dump()
        << "\n";
  }
}

void RegisterBackend(const std::string &id, BackendFactory factory) {
  auto &registry = GetRegistry();
  std::lock_guard<std::mutex> lock(registry.mu);
  registry.factories[id] = std::move(factory);
}

std::unique_ptr<Seq2SeqBackend> MakeBackend(const std::string &id,
                                            const json &hyperparams,
                                            const std::string &base_dir) {
  auto &registry = GetRegistry();
  BackendFactory factory;
  {
    std::lock_guard<std::mutex> lock(registry.mu);
    auto it = registry.factories.find(id);
    if (it == registry.factories.end()) {
      throw Error(ErrorKind::kConfig, "unknown backend '" + id + "'");
    }
    factory = it->second;
  }
  return factory(hyperparams.is_null() ? json::object() : hyperparams,
                 base_dir);
}

CandidateList GenerateTriggerCandidates(const Seq2SeqBackend &backend,
                                        const ContextInstance &instance,
                                        const GenerationConfig &cfg,
                                        const CodecConfig &codec) {
  CandidateList list;
  list.doc_id = instance.doc_id;
  list.context = instance.context;

  const std::string prompt = BuildTriggerPrompt(instance.context, codec);
  if (TokenCount(prompt) > static_cast<size_t>(cfg.max_input_len)) {
    list.warnings.push_back("prompt exceeds max_input_len");
  }
  std::vector<Hypothesis> hyps;
  try {
    hyps = backend.GenerateTopK(prompt, cfg.beam_width);
  } catch (const std::exception &e) {
    throw Error(ErrorKind::kBackend, instance.doc_id + ": " + e.what());
  }
  if (hyps.size() > static_cast<size_t>(cfg.beam_width)) {
    throw Error(ErrorKind::kBackend,
                instance.doc_id + ": backend returned more than k hypotheses");
  }
  for (size_t i = 0; i < hyps.size(); ++i) {
    if (!std::isfinite(hyps[i].score) ||
        (i > 0 && hyps[i].score > hyps[i - 1].score)) {
      throw Error(ErrorKind::kBackend,
                  instance.doc_id + ": backend scores not finite/sorted");
    }
  }

  std::vector<std::vector<Trigger>> seen;
  for (const auto &h : hyps) {
    if (TokenCount(h.text) > static_cast<size_t>(cfg.max_output_len)) {
      list.warnings.push_back("hypothesis exceeds max_output_len");
    }
    auto decoded = DecodeTriggerCandidate(h.text, codec);
    for (auto &w : decoded.warnings) list.warnings.push_back(std::move(w));
    if (decoded.items.empty() && !IsNoneMarker(h.text, codec)) continue;

    auto key = decoded.items;
    std::sort(key.begin(), key.end());
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));

    TriggerCandidate c;
    c.raw_text = h.text;
    c.triggers = std::move(decoded.items);
    c.beam_score = h.score;
    list.candidates.push_back(std::move(c));
  }
  return list;
}

Decoded<ArgumentPair> GenerateArguments(const Seq2SeqBackend &backend,
                                        std::string_view context,
                                        const Trigger &trigger,
                                        const CodecConfig &codec) {
  const std::string prompt = BuildArgumentPrompt(context, trigger.word, codec);
  std::string output;
  try {
    output = backend.GenerateGreedy(prompt);
  } catch (const std::exception &e) {
    throw Error(ErrorKind::kBackend,
                "argument generation for '" + trigger.word + "': " + e.what());
  }
  return DecodeArgumentOutput(output, codec);
}

void CacheCandidateArguments(const Seq2SeqBackend &backend, CandidateList &list,
                             const CodecConfig &codec) {
  for (const auto &c : list.candidates) {
    for (const auto &t : c.triggers) {
      if (list.arguments_by_word.count(t.word)) continue;
      Decoded<ArgumentPair> args;
      try {
        args = GenerateArguments(backend, list.context, t, codec);
      } catch (const Error &e) {
        throw Error(ErrorKind::kBackend, list.doc_id + ": " + e.what());
      }
      for (auto &w : args.warnings) list.warnings.push_back(std::move(w));
      list.arguments_by_word[t.word] = std::move(args.items);
    }
  }
}

}  // namespace ofee
