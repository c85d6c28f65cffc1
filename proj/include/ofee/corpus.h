#ifndef OFEE_CORPUS_H_
#define OFEE_CORPUS_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "ofee/codec.h"
#include "ofee/event_model.h"

namespace ofee {

enum class Task { kTrigger, kArgument };

std::string TaskName(Task task);

struct TrainingPair {
  std::string input;
  std::string target;
  Task task = Task::kTrigger;
  std::string doc_id;

  friend bool operator==(const TrainingPair &, const TrainingPair &) = default;
};

struct LoadIssue {
  size_t line = 0;  // 1-based
  std::string message;
};

// Malformed lines are skipped and listed in `errors`; gold triggers that do
// not occur in their context are kept and listed in `warnings`.
struct LoadReport {
  std::string path;
  size_t lines_read = 0;
  size_t instances_loaded = 0;
  std::vector<LoadIssue> errors;
  std::vector<LoadIssue> warnings;

  nlohmann::json ToJson() const;
};

struct LoadedCorpus {
  std::vector<ContextInstance> instances;
  LoadReport report;
};

// One JSON object per line:
//   {"doc_id": str, "context": str,
//    "events": [{"trigger": {"word": str, "type": str},
//                "arguments": [{"role": str, "entity": str}]}]}
// A missing "events" field means a negative context. Throws
// Error(kMissingArtifact) only if the file cannot be opened.
LoadedCorpus LoadCorpus(const std::string &path);

// Parses a single corpus line. Throws Error(kData) on any schema violation.
ContextInstance InstanceFromJson(const nlohmann::json &j);
nlohmann::json InstanceToJson(const ContextInstance &instance);

nlohmann::json FramesToJson(const std::vector<EventFrame> &frames);
std::vector<EventFrame> FramesFromJson(const nlohmann::json &events);

nlohmann::json PairToJson(const TrainingPair &pair);
TrainingPair PairFromJson(const nlohmann::json &j);

struct PairOptions {
  // Also emit one trigger pair whose target joins all triggers with the and
  // token. Only instances with two or more frames get the extra pair.
  bool multi_trigger_target = false;
  // Emit the "[none]" trigger pair for contexts without events.
  bool include_empty_contexts = true;
};

// Per frame: one trigger pair (prompt -> "word [Type]") followed by one
// argument pair (argument prompt -> slot target). Throws Error(kData) naming
// the doc_id when a frame type is missing from the ontology.
std::vector<TrainingPair> MakeTrainingPairs(const ContextInstance &instance,
                                            const Ontology &ontology,
                                            const CodecConfig &cfg = {},
                                            const PairOptions &options = {});

nlohmann::json OntologyToJson(const Ontology &ontology);
Ontology OntologyFromJson(const nlohmann::json &j);

}  // namespace ofee

#endif  // OFEE_CORPUS_H_
