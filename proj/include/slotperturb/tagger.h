#ifndef SLOTPERTURB_TAGGER_H_
#define SLOTPERTURB_TAGGER_H_

// Deterministic coarse part-of-speech tagging.
//
// Precedence for a token: stopword set, then lexicon entry, then the first
// matching suffix rule, then NOUN for tokens containing a letter and OTHER
// for tokens without one (punctuation, numbers). Lookup is case-insensitive.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "slotperturb/corpus.h"

namespace slotperturb {

enum class CoarsePos { kVerb, kNoun, kAdj, kAdv, kStopword, kOther };

std::string_view pos_name(CoarsePos pos);
std::optional<CoarsePos> parse_pos(std::string_view name);

struct PosLexicon {
  std::unordered_map<std::string, CoarsePos> entries;  // lowercased keys
  std::unordered_set<std::string> stopwords;           // lowercased
  std::vector<std::pair<std::string, CoarsePos>> suffix_rules =
      default_suffix_rules();
  // Non-fatal load notes, e.g. conflicting duplicate entries.
  std::vector<std::string> warnings;

  // "-ly"->ADV, "-ing"/"-ed"->VERB, "-ous"/"-ful"/"-ive"/"-al"->ADJ.
  static std::vector<std::pair<std::string, CoarsePos>> default_suffix_rules();

  CoarsePos tag_word(std::string_view word) const;
  bool is_stopword(std::string_view word) const;
};

std::vector<CoarsePos> tag(std::span<const std::string> tokens,
                           const PosLexicon &lex);
std::vector<CoarsePos> tag(const Utterance &u, const PosLexicon &lex);

std::optional<std::size_t> first_verb_index(std::span<const CoarsePos> tags);

// Lexicon text: `word<TAB>POS` lines, POS one of VERB NOUN ADJ ADV STOPWORD
// OTHER. Blank lines and lines starting with '#' are ignored. A repeated word
// with a different tag keeps the last entry and records a warning.
PosLexicon parse_pos_lexicon(std::string_view text);
// Stopword text: one word per line.
std::unordered_set<std::string> parse_stopwords(std::string_view text);

PosLexicon load_pos_lexicon(const std::string &lexicon_path);
PosLexicon load_pos_lexicon(const std::string &lexicon_path,
                            const std::string &stopword_path);

// Externally produced tags keyed by utterance id; lets a statistical tagger
// replace the built-in one. Format: `id<TAB>TAG TAG ...`.
class ExternalTags {
 public:
  static ExternalTags parse(std::string_view text);
  static ExternalTags load(const std::string &path);

  // Tags for u when present and length-matched.
  std::optional<std::vector<CoarsePos>> find(const Utterance &u) const;
  std::size_t size() const { return by_id_.size(); }

 private:
  std::unordered_map<std::string, std::vector<CoarsePos>> by_id_;
};

}  // namespace slotperturb

#endif  // SLOTPERTURB_TAGGER_H_
