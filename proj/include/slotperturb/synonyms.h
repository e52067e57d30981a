#ifndef SLOTPERTURB_SYNONYMS_H_
#define SLOTPERTURB_SYNONYMS_H_

// Synonym operators: replace one verb / adjective / adverb / any / stopword
// target with the best in-context candidate from a CandidateProvider.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "slotperturb/corpus.h"
#include "slotperturb/tagger.h"

namespace slotperturb {

enum class SynonymKind { kVerb, kAdj, kAdv, kAny, kStopword };

std::string_view synonym_kind_name(SynonymKind kind);

struct Candidate {
  std::string token;
  double weight = 0.0;

  friend bool operator==(const Candidate &, const Candidate &) = default;
};

// Source of fill-in candidates for one position of a token sequence.
//
// `tokens` holds the original surfaces; implementations that need a masked
// input (a masked LM) substitute the mask themselves. Results are sorted by
// descending weight and hold at most top_k entries. They may include the
// original surface; filter_candidates() removes it.
class CandidateProvider {
 public:
  virtual ~CandidateProvider() = default;

  virtual std::vector<Candidate> candidates(std::span<const std::string> tokens,
                                            std::size_t mask_index,
                                            std::size_t top_k) const = 0;

  // False when concurrent calls to candidates() are unsafe; callers then
  // serialize access to the instance.
  virtual bool thread_safe() const { return true; }

  virtual std::string describe() const = 0;
};

// Context-free dictionary lookup: the synonyms of tokens[mask_index] with
// weight 1/rank. Text format: `word<TAB>syn1,syn2,...`.
class DictionaryProvider : public CandidateProvider {
 public:
  static DictionaryProvider parse(std::string_view text);
  static DictionaryProvider load(const std::string &path);

  std::vector<Candidate> candidates(std::span<const std::string> tokens,
                                    std::size_t mask_index,
                                    std::size_t top_k) const override;
  std::string describe() const override;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
  std::string origin_ = "inline";
};

enum class TargetFallback { kNone, kNoun, kAnyToken };

std::string_view target_fallback_name(TargetFallback f);

// Ordered target indices for one application. The first entry is the
// uniformly drawn target; the rest are the retry order.
struct TargetSelection {
  std::vector<std::size_t> order;
  CoarsePos wanted = CoarsePos::kNoun;  // POS after resolving ANY
  TargetFallback fallback = TargetFallback::kNone;

  std::size_t first() const { return order.front(); }
};

// Throws OperatorError on an empty utterance.
TargetSelection select_targets(const Utterance &u, SynonymKind kind,
                               std::span<const CoarsePos> tags,
                               std::uint64_t seed);

std::size_t select_target(const Utterance &u, SynonymKind kind,
                          std::span<const CoarsePos> tags, std::uint64_t seed);

// Keeps candidates that, placed at idx and re-tagged in context, get the
// same coarse POS as the original token there. Drops the original surface
// (case-insensitive) and any candidate with a non-letter character. When
// the target is a stopword, candidates must also be in stop_inventory.
// Input order is preserved.
std::vector<Candidate> filter_candidates(
    const Utterance &u, std::size_t idx, std::span<const Candidate> cands,
    const PosLexicon &lex, const std::unordered_set<std::string> &stop_inventory,
    SynonymKind kind);

struct SynonymOptions {
  std::size_t top_k = 50;
  // Pick among filtered candidates proportionally to weight instead of argmax.
  bool sample = false;
};

// One-token replacement. Tags come from `lex` unless `tags` is non-empty.
// Returns a no-op record when no target yields a surviving candidate.
// Provider failures surface as ProviderError.
PerturbedUtterance apply_synonym(const Utterance &u, SynonymKind kind,
                                 const CandidateProvider &provider,
                                 const PosLexicon &lex, std::uint64_t seed,
                                 SynonymOptions options = {},
                                 std::span<const CoarsePos> tags = {});

}  // namespace slotperturb

#endif  // SLOTPERTURB_SYNONYMS_H_
