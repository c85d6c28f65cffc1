#ifndef OFEE_GENERATION_H_
#define OFEE_GENERATION_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ofee/codec.h"
#include "ofee/corpus.h"
#include "ofee/event_model.h"

namespace ofee {

struct GenerationConfig {
  int beam_width = 10;
  int max_input_len = 650;   // whitespace tokens
  int max_output_len = 200;  // whitespace tokens

  void Validate() const;
};

struct Hypothesis {
  std::string text;
  double score = 0.0;  // log scale, higher is better

  friend bool operator==(const Hypothesis &, const Hypothesis &) = default;
};

struct TriggerCandidate {
  std::string raw_text;
  std::vector<Trigger> triggers;
  double beam_score = 0.0;
  std::optional<double> rank_score;
  std::optional<double> fused_score;

  // The explicit "no event" candidate.
  bool IsEmpty() const { return triggers.empty(); }
};

struct CandidateList {
  std::string doc_id;
  std::string context;
  std::vector<TriggerCandidate> candidates;  // beam_score descending
  // Greedy argument output for every distinct candidate trigger word. The
  // argument prompt depends on the word alone, so selection can be replayed
  // offline without calling the backend again.
  std::map<std::string, std::vector<ArgumentPair>> arguments_by_word;
  std::vector<std::string> warnings;

  bool HasRankScores() const;
};

nlohmann::json CandidateListToJson(const CandidateList &list);
CandidateList CandidateListFromJson(const nlohmann::json &j);

// Sequence-to-sequence generator. Implementations must return at most k
// hypotheses, sorted by score descending, with finite scores, and be
// deterministic for a fixed state.
class Seq2SeqBackend {
 public:
  virtual ~Seq2SeqBackend() = default;

  virtual void Fit(std::span<const TrainingPair> pairs,
                   const nlohmann::json &hyperparams) = 0;
  virtual std::vector<Hypothesis> GenerateTopK(std::string_view input,
                                               int k) const = 0;
  virtual std::string GenerateGreedy(std::string_view input) const = 0;
};

using Script = std::map<std::string, std::vector<Hypothesis>, std::less<>>;

// Scripted test double. Each input maps to an ordered hypothesis list; Fit
// memorizes training pairs (at score 0) unless constructed with
// memorize = false. Unscripted inputs produce nothing.
class ToyBackend : public Seq2SeqBackend {
 public:
  explicit ToyBackend(Script script = {}, bool memorize = true);

  void Fit(std::span<const TrainingPair> pairs,
           const nlohmann::json &hyperparams) override;
  std::vector<Hypothesis> GenerateTopK(std::string_view input,
                                       int k) const override;
  std::string GenerateGreedy(std::string_view input) const override;

  // Adds a hypothesis, keeping the list sorted; a repeated text keeps the
  // higher score.
  void Add(const std::string &input, Hypothesis hypothesis);

  const Script &script() const { return script_; }

 private:
  Script script_;
  bool memorize_;
};

// Script files are JSONL: {"input": str, "outputs": [{"text": str,
// "score": num}, ...]}.
Script LoadScript(const std::string &path);
void SaveScript(const Script &script, const std::string &path);

using BackendFactory = std::function<std::unique_ptr<Seq2SeqBackend>(
    const nlohmann::json &hyperparams, const std::string &base_dir)>;

// Backends register by string id. "toy" is always available and accepts
// {"script": path, "memorize": bool}; relative paths resolve against
// base_dir.
void RegisterBackend(const std::string &id, BackendFactory factory);
std::unique_ptr<Seq2SeqBackend> MakeBackend(const std::string &id,
                                            const nlohmann::json &hyperparams,
                                            const std::string &base_dir = ".");

// Beam search over the trigger prompt, parsed and deduplicated by trigger
// multiset (highest beam score wins). Hypotheses that parse to nothing are
// dropped unless they are exactly the empty marker. Backend failures are
// rethrown as Error(kBackend) carrying the doc_id.
CandidateList GenerateTriggerCandidates(const Seq2SeqBackend &backend,
                                        const ContextInstance &instance,
                                        const GenerationConfig &cfg = {},
                                        const CodecConfig &codec = {});

// Greedy argument generation for one predicted trigger; only the trigger
// word enters the prompt.
Decoded<ArgumentPair> GenerateArguments(const Seq2SeqBackend &backend,
                                        std::string_view context,
                                        const Trigger &trigger,
                                        const CodecConfig &codec = {});

// Fills list.arguments_by_word for every distinct candidate trigger word.
void CacheCandidateArguments(const Seq2SeqBackend &backend, CandidateList &list,
                             const CodecConfig &codec = {});

}  // namespace ofee

#endif  // OFEE_GENERATION_H_
