#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.h"
#include "ofee/common.h"
#include "ofee/corpus.h"

using namespace ofee;
namespace fs = std::filesystem;

namespace {

const char *kKillingContext = "And gave ... then went home ... killed him .";

ContextInstance KillingInstance() {
  return {"killing",
          kKillingContext,
          {{{"killed", "Life_Die"},
            {{"Agent", "father - in - law"}, {"Place", "home"}}},
           {{"went", "Movement_Transport"}, {}}}};
}

Ontology KillingOntology() {
  Ontology onto;
  onto.roles_by_type["Life_Die"] = {"Agent", "Place"};
  onto.roles_by_type["Movement_Transport"] = {"Artifact", "Place"};
  return onto;
}

fs::path WriteTemp(const std::string &name, const std::string &text) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("load_corpus") {
  auto path = WriteTemp(
      "ofee_corpus_test.jsonl",
      R"({"doc_id":"d1","context":"He went home .","events":[{"trigger":{"word":"went","type":"Movement_Transport"},"arguments":[{"role":"Destination","entity":"home"}]}]})"
      "\n"
      R"({"doc_id":"d2","context":"Nothing here ."})"
      "\n"
      "not json at all\n"
      "\n"
      R"({"doc_id":"d3","context":"She left .","events":[{"trigger":{"word":"ran","type":"Movement_Transport"}}]})"
      "\n");
  auto loaded = LoadCorpus(path.string());
  REQUIRE(loaded.instances.size() == 3);
  CHECK(loaded.instances[0].doc_id == "d1");
  CHECK(loaded.instances[0].gold_frames.size() == 1);
  CHECK(loaded.instances[0].gold_frames[0].arguments ==
        std::vector<ArgumentPair>{{"Destination", "home"}});
  CHECK(loaded.instances[1].gold_frames.empty());
  CHECK(loaded.instances[2].doc_id == "d3");

  REQUIRE(loaded.report.errors.size() == 1);
  CHECK(loaded.report.errors[0].line == 3);
  REQUIRE(loaded.report.warnings.size() == 1);
  CHECK(loaded.report.warnings[0].line == 5);
  CHECK(loaded.report.lines_read == 4);
  CHECK(loaded.report.ToJson()["instances_loaded"] == 3);
  fs::remove(path);

  CHECK_THROWS_AS(LoadCorpus("/nonexistent/corpus.jsonl"), Error);
}

TEST_CASE("instance json roundtrip") {
  auto inst = KillingInstance();
  auto back = InstanceFromJson(InstanceToJson(inst));
  CHECK(back.doc_id == inst.doc_id);
  CHECK(back.context == inst.context);
  CHECK(back.gold_frames == inst.gold_frames);
  CHECK(OntologyFromJson(OntologyToJson(KillingOntology())) == KillingOntology());
}

TEST_CASE("per-event training pairs") {
  auto pairs = MakeTrainingPairs(KillingInstance(), KillingOntology());
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[0].input == "TriggerEvent: And gave ... then went home ... killed him .");
  CHECK(pairs[0].target == "killed [Life_Die]");
  CHECK(pairs[0].task == Task::kTrigger);
  CHECK(pairs[1].input ==
        "Arguments: And gave ... then went home ... killed him . <Trigger> killed");
  CHECK(pairs[1].target == "<Agent> father - in - law </Agent> <Place> home </Place>");
  CHECK(pairs[1].task == Task::kArgument);
  CHECK(pairs[2].target == "went [Movement_Transport]");
  CHECK(pairs[3].input ==
        "Arguments: And gave ... then went home ... killed him . <Trigger> went");
  CHECK(pairs[3].target == "<Artifact> [None] </Artifact> <Place> [None] </Place>");

  auto multi = MakeTrainingPairs(KillingInstance(), KillingOntology(), {},
                                 {.multi_trigger_target = true});
  REQUIRE(multi.size() == 5);
  CHECK(multi[4].target == "killed [Life_Die] [and] went [Movement_Transport]");

  for (const auto &p : multi) {
    CHECK(PairFromJson(PairToJson(p)) == p);
  }
}

TEST_CASE("zero-event contexts") {
  ContextInstance empty{"e1", "Nothing happened .", {}};
  auto pairs = MakeTrainingPairs(empty, KillingOntology());
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].target == "[none]");
  CHECK(MakeTrainingPairs(empty, KillingOntology(), {},
                          {.include_empty_contexts = false})
            .empty());
}

TEST_CASE("unknown type names the doc_id") {
  ContextInstance inst{"doc-42", "They met .", {{{"met", "Contact_Meet"}, {}}}};
  CHECK_THROWS_WITH_AS(MakeTrainingPairs(inst, KillingOntology()),
                       doctest::Contains("doc-42"), Error);
}

TEST_CASE("pair invariants on random instances") {
  testing::Rng rng(11);
  for (int iter = 0; iter < 100; ++iter) {
    ContextInstance inst{"r" + std::to_string(iter), "", {}};
    inst.gold_frames = testing::RandomSmallFrames(rng);
    for (auto &f : inst.gold_frames) f = EventFrame::Make(f.trigger, f.arguments);
    inst.context = "ctx " + std::to_string(iter);
    for (const auto &f : inst.gold_frames) inst.context += " " + f.trigger.word;
    Ontology onto = OntologyFromCorpus({inst});

    auto pairs = MakeTrainingPairs(inst, onto);
    size_t n_arg = 0;
    size_t frame_idx = 0;
    for (const auto &p : pairs) {
      if (p.task == Task::kArgument) {
        ++n_arg;
        CHECK(p.input.starts_with("Arguments: "));
        CHECK(p.input.find("<Trigger>") != std::string::npos);
        const auto &frame = inst.gold_frames[frame_idx++];
        CHECK(EventFrame{frame.trigger, DecodeArgumentOutput(p.target).items} ==
              frame);
      } else {
        CHECK(p.input.starts_with("TriggerEvent: "));
        auto decoded = DecodeTriggerCandidate(p.target).items;
        if (inst.gold_frames.empty()) {
          CHECK(decoded.empty());
        } else {
          CHECK(decoded == std::vector<Trigger>{inst.gold_frames[frame_idx].trigger});
        }
      }
    }
    CHECK(n_arg == inst.gold_frames.size());
  }
}
