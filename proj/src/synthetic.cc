#include "ofee/synthetic.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"
#include "ofee/common.h"
#include "ofee/corpus.h"

namespace ofee::synthetic {

namespace {

using Rng = std::mt19937_64;

const std::vector<std::string> kPersons = {
    "the soldier", "Maria",      "the father - in - law", "the rebels",
    "John Smith",  "the pilot",  "a civilian",            "the police",
    "the doctor",  "two guards", "the mayor",             "Ahmed"};
const std::vector<std::string> kPlaces = {
    "home",   "Baghdad",    "the village", "the market", "Kabul",
    "the border", "the hospital", "Paris", "the capital", "the port"};
const std::vector<std::string> kTargets = {
    "the convoy", "the embassy", "the checkpoint", "the base", "the bridge"};

struct Slot {
  std::string role;
  const std::vector<std::string> *pool;
  std::string lead;  // words before the filler ("" for core slots)
  bool optional = false;
};

struct EventTemplate {
  std::string type;
  std::vector<std::string> triggers;
  Slot subject;
  std::vector<Slot> rest;  // after the trigger
};

const std::vector<EventTemplate> &Templates() {
  static const std::vector<EventTemplate> templates = {
      {"Life_Die",
       {"killed", "murdered", "executed", "shot"},
       {"Agent", &kPersons, "", false},
       {{"Victim", &kPersons, "", false}, {"Place", &kPlaces, "at", true}}},
      {"Movement_Transport",
       {"went", "traveled", "drove", "moved"},
       {"Artifact", &kPersons, "", false},
       {{"Destination", &kPlaces, "to", false},
        {"Origin", &kPlaces, "from", true}}},
      {"Conflict_Attack",
       {"attacked", "bombed", "raided", "stormed"},
       {"Attacker", &kPersons, "", false},
       {{"Target", &kTargets, "", false}, {"Place", &kPlaces, "near", true}}},
  };
  return templates;
}

const std::vector<std::string> &Fillers() {
  static const std::vector<std::string> fillers = {
      "{P} read a book at {L} .",
      "The weather was calm in {L} on Tuesday .",
      "{P} said the budget talks in {L} were productive .",
      "Officials in {L} discussed the new school with {P} .",
      "{P} opened a small bakery near {L} last spring .",
  };
  return fillers;
}

template <typename T>
const T &Pick(const std::vector<T> &items, Rng &rng) {
  std::uniform_int_distribution<size_t> dist(0, items.size() - 1);
  return items[dist(rng)];
}

bool Coin(Rng &rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// Builds one clause and its frame. `used_words` keeps trigger words distinct
// within a context.
std::pair<std::string, EventFrame> MakeClause(
    const EventTemplate &tmpl, Rng &rng, std::set<std::string> &used_words) {
  std::string word;
  do {
    word = Pick(tmpl.triggers, rng);
  } while (used_words.count(word));
  used_words.insert(word);

  std::vector<ArgumentPair> args;
  std::set<std::string> used_entities;
  auto fill = [&](const Slot &slot) {
    std::string entity;
    do {
      entity = Pick(*slot.pool, rng);
    } while (used_entities.count(entity));
    used_entities.insert(entity);
    args.push_back({slot.role, entity});
    return entity;
  };

  std::string clause = fill(tmpl.subject) + " " + word;
  for (const auto &slot : tmpl.rest) {
    if (slot.optional && Coin(rng, 0.5)) continue;
    clause += " ";
    if (!slot.lead.empty()) clause += slot.lead + " ";
    clause += fill(slot);
  }
  return {clause, EventFrame::Make(Trigger{word, tmpl.type}, std::move(args))};
}

std::string MakeFiller(Rng &rng) {
  std::string text = Pick(Fillers(), rng);
  auto replace = [&](const std::string &key, const std::string &value) {
    size_t pos = text.find(key);
    if (pos != std::string::npos) text.replace(pos, key.size(), value);
  };
  replace("{P}", Pick(kPersons, rng));
  replace("{L}", Pick(kPlaces, rng));
  return text;
}

// Context tokens that are neither gold trigger words nor punctuation.
std::vector<std::string> DistractorWords(const ContextInstance &instance) {
  std::set<std::string> gold;
  for (const auto &f : instance.gold_frames) gold.insert(f.trigger.word);
  std::vector<std::string> words;
  for (const auto &tok : SplitOn(instance.context, " ")) {
    if (tok.size() < 3 || gold.count(tok)) continue;
    if (std::find(words.begin(), words.end(), tok) == words.end()) {
      words.push_back(tok);
    }
  }
  return words;
}

std::vector<std::string> OtherTypes(const std::string &type) {
  std::vector<std::string> types;
  for (const auto &t : Templates()) {
    if (t.type != type) types.push_back(t.type);
  }
  return types;
}

void AddArgumentTargets(const ContextInstance &instance,
                        const Ontology &ontology, const CodecConfig &codec,
                        Script &script) {
  for (const auto &frame : instance.gold_frames) {
    script[BuildArgumentPrompt(instance.context, frame.trigger.word, codec)] = {
        {EncodeArgumentTarget(frame, ontology, codec), 0.0}};
  }
}

void SortHypotheses(std::vector<Hypothesis> &hyps) {
  std::stable_sort(hyps.begin(), hyps.end(),
                   [](const Hypothesis &a, const Hypothesis &b) {
                     return a.score > b.score;
                   });
}

void WriteJsonl(const std::string &path,
                const std::vector<ContextInstance> &instances) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kData, "cannot write " + path);
  for (const auto &inst : instances) out << InstanceToJson(inst).dump() << "\n";
}

}  // namespace

std::vector<ContextInstance> MakeCorpus(int n_contexts, uint64_t seed,
                                        const std::string &prefix) {
  Rng rng(seed);
  std::vector<ContextInstance> corpus;
  for (int i = 0; i < n_contexts; ++i) {
    ContextInstance inst;
    inst.doc_id = prefix + "-" + std::to_string(i);
    // Roughly 25% negative, 45% single-event, 30% two-event contexts.
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    int n_events = u < 0.25 ? 0 : (u < 0.70 ? 1 : 2);
    if (n_events == 0) {
      inst.context = MakeFiller(rng);
    } else {
      std::set<std::string> used_words;
      std::vector<std::string> clauses;
      for (int e = 0; e < n_events; ++e) {
        auto [clause, frame] = MakeClause(Pick(Templates(), rng), rng,
                                          used_words);
        clauses.push_back(std::move(clause));
        inst.gold_frames.push_back(std::move(frame));
      }
      std::string text = clauses[0];
      if (clauses.size() > 1) text += " , and then " + clauses[1];
      inst.context = text + " .";
    }
    corpus.push_back(std::move(inst));
  }
  return corpus;
}

Script OracleScript(const std::vector<ContextInstance> &instances,
                    const CodecConfig &codec) {
  Ontology ontology = OntologyFromCorpus(instances);
  Script script;
  for (const auto &inst : instances) {
    const std::string prompt = BuildTriggerPrompt(inst.context, codec);
    if (script.count(prompt)) continue;  // repeated context
    auto &hyps = script[prompt];
    if (inst.gold_frames.empty()) hyps.push_back({codec.empty_token, 0.0});
    for (const auto &f : inst.gold_frames) {
      hyps.push_back({EncodeTrigger(f.trigger), 0.0});
    }
    // Low-probability distractors give the selector its negatives.
    auto words = DistractorWords(inst);
    for (size_t i = 0; i < std::min<size_t>(3, words.size()); ++i) {
      const auto &type = Templates()[i % Templates().size()].type;
      hyps.push_back({EncodeTrigger({words[i], type}), -15.0 - double(i)});
    }
    AddArgumentTargets(inst, ontology, codec, script);
  }
  return script;
}

Script NoisyScript(const std::vector<ContextInstance> &instances,
                   uint64_t seed, const CodecConfig &codec) {
  constexpr size_t kBeams = 10;
  Ontology ontology = OntologyFromCorpus(instances);
  Rng rng(seed);
  std::uniform_real_distribution<double> beam(-3.0, 0.0);
  Script script;
  for (const auto &inst : instances) {
    const std::string prompt = BuildTriggerPrompt(inst.context, codec);
    if (script.count(prompt)) continue;  // repeated context
    std::vector<std::string> texts;
    auto add = [&](const std::string &text) {
      if (texts.size() < kBeams &&
          std::find(texts.begin(), texts.end(), text) == texts.end()) {
        texts.push_back(text);
      }
    };
    if (inst.gold_frames.empty()) add(codec.empty_token);
    for (const auto &f : inst.gold_frames) add(EncodeTrigger(f.trigger));
    if (!inst.gold_frames.empty()) add(codec.empty_token);
    for (const auto &f : inst.gold_frames) {
      for (const auto &type : OtherTypes(f.trigger.event_type)) {
        if (Coin(rng, 0.6)) add(EncodeTrigger({f.trigger.word, type}));
      }
    }
    auto words = DistractorWords(inst);
    std::shuffle(words.begin(), words.end(), rng);
    for (const auto &w : words) {
      if (texts.size() >= kBeams - 1) break;
      add(EncodeTrigger({w, Pick(Templates(), rng).type}));
    }

    auto &hyps = script[prompt];
    for (const auto &t : texts) hyps.push_back({t, beam(rng)});
    SortHypotheses(hyps);
    AddArgumentTargets(inst, ontology, codec, script);
  }
  return script;
}

void WriteBundle(const std::string &dir, const BundleSizes &sizes,
                 uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto train = MakeCorpus(sizes.train, seed + 1, "train");
  auto dev = MakeCorpus(sizes.dev, seed + 2, "dev");
  auto test = MakeCorpus(sizes.test, seed + 3, "test");
  WriteJsonl((fs::path(dir) / "train.jsonl").string(), train);
  WriteJsonl((fs::path(dir) / "dev.jsonl").string(), dev);
  WriteJsonl((fs::path(dir) / "test.jsonl").string(), test);

  std::vector<ContextInstance> all = train;
  all.insert(all.end(), dev.begin(), dev.end());
  all.insert(all.end(), test.begin(), test.end());
  SaveScript(OracleScript(all), (fs::path(dir) / "oracle_script.jsonl").string());
  SaveScript(NoisyScript(all, seed + 4),
             (fs::path(dir) / "noisy_script.jsonl").string());

  for (const std::string name : {"oracle", "noisy"}) {
    nlohmann::json config = {
        {"corpus",
         {{"train", "train.jsonl"}, {"dev", "dev.jsonl"}, {"test", "test.jsonl"}}},
        {"backend",
         {{"id", "toy"},
          {"hyperparams",
           {{"script", name + "_script.jsonl"}, {"memorize", false}}}}},
        {"selector", {{"epochs", 60}, {"learning_rate", 0.2}}},
        {"selection", "tune"},
        {"seed", 13}};
    std::ofstream out((fs::path(dir) / (name + ".json")).string());
    out << config.dump(2) << "\n";
  }
}

}  // namespace ofee::synthetic
