#include "ofee/event_model.h"

#include <algorithm>

#include "ofee/common.h"

namespace ofee {

Trigger Trigger::Make(std::string_view word, std::string_view event_type) {
  Trigger trigger{NormalizeWhitespace(word), std::string(event_type)};
  if (trigger.word.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty trigger word");
  }
  if (trigger.event_type.empty() || ContainsWhitespace(trigger.event_type)) {
    throw Error(ErrorKind::kInvalidArgument,
                "invalid event type '" + trigger.event_type + "'");
  }
  return trigger;
}

ArgumentPair ArgumentPair::Make(std::string_view role,
                                std::string_view entity) {
  ArgumentPair pair{NormalizeWhitespace(role), NormalizeWhitespace(entity)};
  if (pair.role.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty argument role");
  }
  if (pair.entity.empty() || pair.entity == "[None]") {
    throw Error(ErrorKind::kInvalidArgument,
                "invalid entity for role " + pair.role);
  }
  return pair;
}

EventFrame EventFrame::Make(Trigger trigger,
                            std::vector<ArgumentPair> arguments) {
  EventFrame frame{std::move(trigger), {}};
  for (auto &arg : arguments) {
    if (std::find(frame.arguments.begin(), frame.arguments.end(), arg) ==
        frame.arguments.end()) {
      frame.arguments.push_back(std::move(arg));
    }
  }
  return frame;
}

bool operator==(const EventFrame &a, const EventFrame &b) {
  if (a.trigger != b.trigger) return false;
  auto lhs = a.arguments;
  auto rhs = b.arguments;
  std::sort(lhs.begin(), lhs.end());
  std::sort(rhs.begin(), rhs.end());
  return lhs == rhs;
}

std::vector<std::string> ContextInstance::TriggerViolations() const {
  std::vector<std::string> violations;
  for (const auto &frame : gold_frames) {
    if (context.find(frame.trigger.word) == std::string::npos) {
      violations.push_back("trigger word '" + frame.trigger.word +
                           "' not found in context of " + doc_id);
    }
  }
  return violations;
}

const std::vector<std::string> &Ontology::Roles(
    const std::string &event_type) const {
  auto it = roles_by_type.find(event_type);
  if (it == roles_by_type.end()) {
    throw Error(ErrorKind::kInvalidArgument, "type not in ontology");
  }
  return it->second;
}

Ontology OntologyFromCorpus(const std::vector<ContextInstance> &instances) {
  if (instances.empty()) throw Error(ErrorKind::kData, "empty corpus");
  Ontology ontology;
  for (const auto &instance : instances) {
    for (const auto &frame : instance.gold_frames) {
      auto &roles = ontology.roles_by_type[frame.trigger.event_type];
      for (const auto &arg : frame.arguments) {
        if (arg.role.find_first_of("<>") != std::string::npos) {
          throw Error(ErrorKind::kData, "invalid role name '" + arg.role +
                                            "' in " + instance.doc_id);
        }
        if (std::find(roles.begin(), roles.end(), arg.role) == roles.end()) {
          roles.push_back(arg.role);
        }
      }
    }
  }
  return ontology;
}

std::vector<std::string> ValidateFrame(const EventFrame &frame,
                                       const Ontology &ontology) {
  std::vector<std::string> violations;
  auto it = ontology.roles_by_type.find(frame.trigger.event_type);
  if (it == ontology.roles_by_type.end()) {
    violations.push_back("unknown event type: " + frame.trigger.event_type);
    return violations;
  }
  for (const auto &arg : frame.arguments) {
    if (std::find(it->second.begin(), it->second.end(), arg.role) ==
        it->second.end()) {
      violations.push_back("unknown role " + arg.role + " for type " +
                           frame.trigger.event_type);
    }
  }
  return violations;
}

}  // namespace ofee
