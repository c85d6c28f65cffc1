#ifndef OFEE_CODEC_H_
#define OFEE_CODEC_H_

#include <string>
#include <string_view>
#include <vector>

#include "ofee/event_model.h"

namespace ofee {

// Literal strings of the generator's text protocol. The linearized strings
// below are the wire format shared with every generator backend.
struct CodecConfig {
  std::string trigger_prefix = "TriggerEvent: ";
  std::string argument_prefix = "Arguments: ";
  std::string trigger_marker = "<Trigger>";
  std::string and_token = "[and]";
  std::string none_token = "[None]";   // unfilled argument slot
  std::string empty_token = "[none]";  // context without events

  // Throws Error(kConfig) unless all six strings are nonempty and distinct.
  void Validate() const;
};

template <typename T>
struct Decoded {
  std::vector<T> items;
  std::vector<std::string> warnings;
};

// "TriggerEvent: <context>".
std::string BuildTriggerPrompt(std::string_view context,
                               const CodecConfig &cfg = {});

// "Arguments: <context> <Trigger> <word>".
std::string BuildArgumentPrompt(std::string_view context,
                                std::string_view trigger_word,
                                const CodecConfig &cfg = {});

// Renders one trigger as "word [Type]".
std::string EncodeTrigger(const Trigger &trigger);

// "w1 [T1] [and] w2 [T2]", or the empty token for no frames.
std::string EncodeTriggerTarget(const std::vector<EventFrame> &frames,
                                const CodecConfig &cfg = {});
std::string EncodeTriggers(const std::vector<Trigger> &triggers,
                           const CodecConfig &cfg = {});

// Parses "w1 [T1] [and] w2 [T2]". The type is the last bracketed token of a
// segment, so trigger words may contain spaces. Malformed segments are
// skipped and reported. Never throws.
Decoded<Trigger> DecodeTriggerCandidate(std::string_view text,
                                        const CodecConfig &cfg = {});

// True for the empty/none markers in either casing, tolerating whitespace
// inside the brackets ("[ None]").
bool IsNoneMarker(std::string_view text, const CodecConfig &cfg = {});

// One "<Role> fill </Role>" slot per ontology role, in ontology order.
std::string EncodeArgumentTarget(const EventFrame &frame,
                                 const Ontology &ontology,
                                 const CodecConfig &cfg = {});

// Extracts "<R> ... </R>" spans; tags tolerate inner whitespace. Fills equal
// to the none marker are dropped, multi-entity fills split on the and token.
// Never throws.
Decoded<ArgumentPair> DecodeArgumentOutput(std::string_view text,
                                           const CodecConfig &cfg = {});

}  // namespace ofee

#endif  // OFEE_CODEC_H_
