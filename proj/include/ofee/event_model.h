#ifndef OFEE_EVENT_MODEL_H_
#define OFEE_EVENT_MODEL_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ofee {

// A trigger is identified by its surface word and event type. There are no
// character offsets: generated text cannot be mapped back to them.
struct Trigger {
  std::string word;
  std::string event_type;

  // Normalizes whitespace in `word` and checks the invariants. Throws
  // Error(kInvalidArgument) on an empty word or a malformed type.
  static Trigger Make(std::string_view word, std::string_view event_type);

  friend bool operator==(const Trigger &, const Trigger &) = default;
  friend auto operator<=>(const Trigger &, const Trigger &) = default;
};

struct ArgumentPair {
  std::string role;
  std::string entity;

  // Rejects empty fields and the literal "[None]" entity.
  static ArgumentPair Make(std::string_view role, std::string_view entity);

  friend bool operator==(const ArgumentPair &, const ArgumentPair &) = default;
  friend auto operator<=>(const ArgumentPair &,
                          const ArgumentPair &) = default;
};

struct EventFrame {
  Trigger trigger;
  std::vector<ArgumentPair> arguments;

  // Collapses duplicate (role, entity) pairs, keeping first occurrences.
  static EventFrame Make(Trigger trigger, std::vector<ArgumentPair> arguments);

  // Order-insensitive over arguments, exact over the trigger.
  friend bool operator==(const EventFrame &a, const EventFrame &b);
};

struct ContextInstance {
  std::string doc_id;
  std::string context;
  std::vector<EventFrame> gold_frames;

  // Gold trigger words that do not occur in the context. These are kept and
  // still evaluated; callers only report them.
  std::vector<std::string> TriggerViolations() const;
};

// Event type -> ordered role list. Training-time only; used to lay out
// argument targets, never consulted at inference.
struct Ontology {
  std::map<std::string, std::vector<std::string>> roles_by_type;

  bool HasType(const std::string &event_type) const {
    return roles_by_type.count(event_type) > 0;
  }
  const std::vector<std::string> &Roles(const std::string &event_type) const;

  friend bool operator==(const Ontology &, const Ontology &) = default;
};

// Roles are kept in first-seen order. Throws "empty corpus" when `instances`
// is empty and rejects role names containing '<' or '>'.
Ontology OntologyFromCorpus(const std::vector<ContextInstance> &instances);

// Never throws. One message per unknown type or unknown role.
std::vector<std::string> ValidateFrame(const EventFrame &frame,
                                       const Ontology &ontology);

}  // namespace ofee

#endif  // OFEE_EVENT_MODEL_H_
