#include "ofee/corpus.h"

#include <fstream>

#include "ofee/common.h"

namespace ofee {

using nlohmann::json;

namespace {

std::string RequireString(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
    throw Error(ErrorKind::kData,
                std::string("missing or non-string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

std::string TaskName(Task task) {
  return task == Task::kTrigger ? "trigger" : "argument";
}

json LoadReport::ToJson() const {
  json j;
  j["path"] = path;
  j["lines_read"] = lines_read;
  j["instances_loaded"] = instances_loaded;
  j["errors"] = json::array();
  for (const auto &e : errors) {
    j["errors"].push_back({{"line", e.line}, {"message", e.message}});
  }
  j["warnings"] = json::array();
  for (const auto &w : warnings) {
    j["warnings"].push_back({{"line", w.line}, {"message", w.message}});
  }
  return j;
}

std::vector<EventFrame> FramesFromJson(const json &events) {
  if (!events.is_array()) throw Error(ErrorKind::kData, "events not an array");
  std::vector<EventFrame> frames;
  for (const auto &ev : events) {
    if (!ev.is_object() || !ev.contains("trigger")) {
      throw Error(ErrorKind::kData, "event without trigger");
    }
    const auto &tj = ev.at("trigger");
    Trigger trigger;
    try {
      trigger = Trigger::Make(RequireString(tj, "word"),
                              RequireString(tj, "type"));
    } catch (const Error &e) {
      throw Error(ErrorKind::kData, e.what());
    }
    std::vector<ArgumentPair> args;
    if (ev.contains("arguments")) {
      const auto &aj = ev.at("arguments");
      if (!aj.is_array()) throw Error(ErrorKind::kData, "arguments not an array");
      for (const auto &a : aj) {
        try {
          args.push_back(ArgumentPair::Make(RequireString(a, "role"),
                                            RequireString(a, "entity")));
        } catch (const Error &e) {
          throw Error(ErrorKind::kData, e.what());
        }
      }
    }
    frames.push_back(EventFrame::Make(std::move(trigger), std::move(args)));
  }
  return frames;
}

json FramesToJson(const std::vector<EventFrame> &frames) {
  json events = json::array();
  for (const auto &f : frames) {
    json args = json::array();
    for (const auto &a : f.arguments) {
      args.push_back({{"role", a.role}, {"entity", a.entity}});
    }
    events.push_back(
        {{"trigger", {{"word", f.trigger.word}, {"type", f.trigger.event_type}}},
         {"arguments", std::move(args)}});
  }
  return events;
}

ContextInstance InstanceFromJson(const json &j) {
  if (!j.is_object()) throw Error(ErrorKind::kData, "line is not a JSON object");
  ContextInstance instance;
  instance.doc_id = RequireString(j, "doc_id");
  instance.context = RequireString(j, "context");
  if (NormalizeWhitespace(instance.context).empty()) {
    throw Error(ErrorKind::kData, "empty context");
  }
  if (j.contains("events")) instance.gold_frames = FramesFromJson(j.at("events"));
  return instance;
}

json InstanceToJson(const ContextInstance &instance) {
  return {{"doc_id", instance.doc_id},
          {"context", instance.context},
          {"events", FramesToJson(instance.gold_frames)}};
}

LoadedCorpus LoadCorpus(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kMissingArtifact, "cannot open corpus " + path);
  }
  LoadedCorpus out;
  out.report.path = path;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (NormalizeWhitespace(line).empty()) continue;
    ++out.report.lines_read;
    try {
      ContextInstance instance = InstanceFromJson(json::parse(line));
      for (auto &v : instance.TriggerViolations()) {
        out.report.warnings.push_back({line_no, std::move(v)});
      }
      out.instances.push_back(std::move(instance));
    } catch (const json::exception &e) {
      out.report.errors.push_back({line_no, e.what()});
    } catch (const Error &e) {
      out.report.errors.push_back({line_no, e.what()});
    }
  }
  out.report.instances_loaded = out.instances.size();
  return out;
}

json PairToJson(const TrainingPair &pair) {
  return {{"doc_id", pair.doc_id},
          {"task", TaskName(pair.task)},
          {"input", pair.input},
          {"target", pair.target}};
}

TrainingPair PairFromJson(const json &j) {
  TrainingPair pair;
  pair.doc_id = RequireString(j, "doc_id");
  pair.input = RequireString(j, "input");
  pair.target = RequireString(j, "target");
  std::string task = RequireString(j, "task");
  if (task == "trigger") {
    pair.task = Task::kTrigger;
  } else if (task == "argument") {
    pair.task = Task::kArgument;
  } else {
    throw Error(ErrorKind::kData, "unknown task '" + task + "'");
  }
  return pair;
}

std::vector<TrainingPair> MakeTrainingPairs(const ContextInstance &instance,
                                            const Ontology &ontology,
                                            const CodecConfig &cfg,
                                            const PairOptions &options) {
  std::vector<TrainingPair> pairs;
  const std::string trigger_prompt = BuildTriggerPrompt(instance.context, cfg);
  if (instance.gold_frames.empty()) {
    if (options.include_empty_contexts) {
      pairs.push_back(
          {trigger_prompt, cfg.empty_token, Task::kTrigger, instance.doc_id});
    }
    return pairs;
  }
  for (const auto &frame : instance.gold_frames) {
    if (!ontology.HasType(frame.trigger.event_type)) {
      throw Error(ErrorKind::kData, "event type " + frame.trigger.event_type +
                                        " of " + instance.doc_id +
                                        " not in ontology");
    }
    pairs.push_back({trigger_prompt, EncodeTrigger(frame.trigger),
                     Task::kTrigger, instance.doc_id});
    pairs.push_back(
        {BuildArgumentPrompt(instance.context, frame.trigger.word, cfg),
         EncodeArgumentTarget(frame, ontology, cfg), Task::kArgument,
         instance.doc_id});
  }
  if (options.multi_trigger_target && instance.gold_frames.size() > 1) {
    pairs.push_back({trigger_prompt,
                     EncodeTriggerTarget(instance.gold_frames, cfg),
                     Task::kTrigger, instance.doc_id});
  }
  return pairs;
}

json OntologyToJson(const Ontology &ontology) {
  json j = json::object();
  for (const auto &[type, roles] : ontology.roles_by_type) j[type] = roles;
  return j;
}

Ontology OntologyFromJson(const json &j) {
  Ontology ontology;
  if (!j.is_object()) throw Error(ErrorKind::kData, "ontology must be an object");
  for (const auto &[type, roles] : j.items()) {
    ontology.roles_by_type[type] = roles.get<std::vector<std::string>>();
  }
  return ontology;
}

}  // namespace ofee
