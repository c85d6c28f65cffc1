#include "ofee/codec.h"

#include <algorithm>
#include <cctype>
#include <optional>

#include "ofee/common.h"

namespace ofee {

namespace {

std::string Squeeze(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

struct Tag {
  bool closing = false;
  std::string name;
  size_t end = 0;  // one past '>'
};

// Parses a tag starting at text[pos] == '<'. Returns nullopt when there is no
// '>' or the tag body is empty or contains another '<'.
std::optional<Tag> ParseTag(std::string_view text, size_t pos) {
  size_t close = text.find('>', pos + 1);
  if (close == std::string_view::npos) return std::nullopt;
  std::string_view body = text.substr(pos + 1, close - pos - 1);
  if (body.find('<') != std::string_view::npos) return std::nullopt;
  Tag tag;
  tag.end = close + 1;
  std::string inner = NormalizeWhitespace(body);
  if (!inner.empty() && inner.front() == '/') {
    tag.closing = true;
    inner = NormalizeWhitespace(std::string_view(inner).substr(1));
  }
  if (inner.empty() || inner.find('/') != std::string::npos) {
    return std::nullopt;
  }
  tag.name = std::move(inner);
  return tag;
}

}  // namespace

void CodecConfig::Validate() const {
  const std::vector<const std::string *> all = {
      &trigger_prefix, &argument_prefix, &trigger_marker,
      &and_token,      &none_token,      &empty_token};
  for (size_t i = 0; i < all.size(); ++i) {
    if (all[i]->empty()) {
      throw Error(ErrorKind::kConfig, "codec strings must be nonempty");
    }
    for (size_t j = 0; j < i; ++j) {
      if (*all[i] == *all[j]) {
        throw Error(ErrorKind::kConfig,
                    "codec strings must be distinct: '" + *all[i] + "'");
      }
    }
  }
}

std::string BuildTriggerPrompt(std::string_view context,
                               const CodecConfig &cfg) {
  std::string normalized = NormalizeWhitespace(context);
  if (normalized.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty context");
  }
  return cfg.trigger_prefix + normalized;
}

std::string BuildArgumentPrompt(std::string_view context,
                                std::string_view trigger_word,
                                const CodecConfig &cfg) {
  std::string word = NormalizeWhitespace(trigger_word);
  if (word.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty trigger word");
  }
  std::string normalized = NormalizeWhitespace(context);
  if (normalized.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty context");
  }
  return cfg.argument_prefix + normalized + " " + cfg.trigger_marker + " " +
         word;
}

std::string EncodeTrigger(const Trigger &trigger) {
  return trigger.word + " [" + trigger.event_type + "]";
}

std::string EncodeTriggers(const std::vector<Trigger> &triggers,
                           const CodecConfig &cfg) {
  if (triggers.empty()) return cfg.empty_token;
  std::vector<std::string> parts;
  parts.reserve(triggers.size());
  for (const auto &t : triggers) parts.push_back(EncodeTrigger(t));
  return Join(parts, " " + cfg.and_token + " ");
}

std::string EncodeTriggerTarget(const std::vector<EventFrame> &frames,
                                const CodecConfig &cfg) {
  std::vector<Trigger> triggers;
  triggers.reserve(frames.size());
  for (const auto &f : frames) triggers.push_back(f.trigger);
  return EncodeTriggers(triggers, cfg);
}

bool IsNoneMarker(std::string_view text, const CodecConfig &cfg) {
  std::string squeezed = Squeeze(text);
  return squeezed == Squeeze(cfg.none_token) ||
         squeezed == Squeeze(cfg.empty_token);
}

Decoded<Trigger> DecodeTriggerCandidate(std::string_view text,
                                        const CodecConfig &cfg) {
  Decoded<Trigger> out;
  std::string normalized = NormalizeWhitespace(text);
  if (normalized.empty()) {
    out.warnings.push_back("empty trigger output");
    return out;
  }
  if (IsNoneMarker(normalized, cfg)) return out;

  for (const auto &raw : SplitOn(normalized, cfg.and_token)) {
    std::string segment = NormalizeWhitespace(raw);
    size_t open = segment.rfind('[');
    bool ok = !segment.empty() && segment.back() == ']' &&
              open != std::string::npos && open > 0;
    if (ok) {
      std::string word = NormalizeWhitespace(segment.substr(0, open));
      std::string type = NormalizeWhitespace(
          segment.substr(open + 1, segment.size() - open - 2));
      ok = !word.empty() && !type.empty() && !ContainsWhitespace(type) &&
           type.find(']') == std::string::npos;
      if (ok) {
        out.items.push_back(Trigger{std::move(word), std::move(type)});
        continue;
      }
    }
    out.warnings.push_back("malformed trigger segment: '" + segment + "'");
  }
  return out;
}

std::string EncodeArgumentTarget(const EventFrame &frame,
                                 const Ontology &ontology,
                                 const CodecConfig &cfg) {
  const auto &roles = ontology.Roles(frame.trigger.event_type);
  for (const auto &arg : frame.arguments) {
    if (std::find(roles.begin(), roles.end(), arg.role) == roles.end()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "role " + arg.role + " not in ontology for type " +
                      frame.trigger.event_type);
    }
  }
  std::vector<std::string> slots;
  slots.reserve(roles.size());
  for (const auto &role : roles) {
    std::vector<std::string> fills;
    for (const auto &arg : frame.arguments) {
      if (arg.role == role &&
          std::find(fills.begin(), fills.end(), arg.entity) == fills.end()) {
        fills.push_back(arg.entity);
      }
    }
    std::string fill =
        fills.empty() ? cfg.none_token : Join(fills, " " + cfg.and_token + " ");
    slots.push_back("<" + role + "> " + fill + " </" + role + ">");
  }
  return Join(slots, " ");
}

Decoded<ArgumentPair> DecodeArgumentOutput(std::string_view text,
                                           const CodecConfig &cfg) {
  Decoded<ArgumentPair> out;
  size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    auto open = ParseTag(text, pos);
    if (!open) {
      out.warnings.push_back("malformed tag at offset " + std::to_string(pos));
      ++pos;
      continue;
    }
    if (open->closing) {
      out.warnings.push_back("stray closing tag </" + open->name + ">");
      pos = open->end;
      continue;
    }
    // The fill runs up to the next tag, which must close this one.
    size_t next = text.find('<', open->end);
    std::optional<Tag> close;
    if (next != std::string_view::npos) close = ParseTag(text, next);
    if (!close || !close->closing || close->name != open->name) {
      out.warnings.push_back("unmatched tag <" + open->name + ">");
      pos = open->end;
      continue;
    }
    std::string_view fill = text.substr(open->end, next - open->end);
    for (const auto &piece : SplitOn(fill, cfg.and_token)) {
      std::string entity = NormalizeWhitespace(piece);
      if (entity.empty()) {
        out.warnings.push_back("empty fill for <" + open->name + ">");
        continue;
      }
      if (IsNoneMarker(entity, cfg)) continue;
      ArgumentPair pair{open->name, std::move(entity)};
      if (std::find(out.items.begin(), out.items.end(), pair) ==
          out.items.end()) {
        out.items.push_back(std::move(pair));
      }
    }
    pos = close->end;
  }
  return out;
}

}  // namespace ofee
