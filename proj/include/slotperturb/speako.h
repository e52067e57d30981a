#ifndef SLOTPERTURB_SPEAKO_H_
#define SLOTPERTURB_SPEAKO_H_

// Speako operator: replace one token with the phonetically closest other
// word of a frequency-filtered pronunciation lexicon.
//
// Phonemes use the 39-symbol ARPABET set of machine-readable English
// pronunciation dictionaries (stress digits are stripped on load). Each
// symbol has an IPA rendering for display; distances are computed over
// symbols.
//
// Out-of-lexicon words get a rule-based pronunciation. The word is
// lowercased and scanned left to right; at each position the longest
// matching rule wins:
//
//   3 letters: tch->CH  sch->S K  igh->AY
//   2 letters: ch->CH sh->SH th->TH ph->F wh->W ck->K ng->NG qu->K W gh->G
//              kn->N wr->R ee->IY ea->IY oo->UW ou->AW ow->OW ai->EY ay->EY
//              oi->OY oy->OY au->AO aw->AO ew->UW er->ER ar->AA R or->AO R
//              ir->ER ur->ER
//   1 letter:  a->AE b->B c->K d->D e->EH f->F g->G h->HH i->IH j->JH k->K
//              l->L m->M n->N o->AA p->P q->K r->R s->S t->T u->AH v->V
//              w->W x->K S y->Y (word-initial) / IY z->Z
//
// A single letter also swallows any immediately repeated copies of itself
// ("zzz" -> Z). A final 'e' after a consonant in words longer than two
// letters is silent. Non-letters are skipped.

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slotperturb/corpus.h"

namespace slotperturb {

using Phoneme = std::uint8_t;

inline constexpr std::size_t kPhonemeCount = 39;

std::string_view arpabet_symbol(Phoneme p);
std::string_view ipa_symbol(Phoneme p);
// Accepts an ARPABET symbol with or without a trailing stress digit.
std::optional<Phoneme> parse_arpabet(std::string_view symbol);

struct PhonemeSeq {
  std::vector<Phoneme> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  // "W AA CH"
  std::string arpabet() const;
  // IPA symbols joined by `sep`: "w ɑ tʃ"
  std::string ipa(std::string_view sep = " ") const;

  friend bool operator==(const PhonemeSeq &, const PhonemeSeq &) = default;
};

// Parses space-separated ARPABET; throws ParseError on unknown symbols.
PhonemeSeq parse_pronunciation(std::string_view text);

// Rule-based pronunciation described above.
PhonemeSeq grapheme_to_phoneme(std::string_view word);

// Unit-cost Levenshtein distance over phoneme symbols.
std::size_t phoneme_distance(const PhonemeSeq &a, const PhonemeSeq &b);

// Same distance, or nullopt as soon as it provably exceeds `limit`.
std::optional<std::size_t> bounded_phoneme_distance(const PhonemeSeq &a,
                                                    const PhonemeSeq &b,
                                                    std::size_t limit);

struct LexiconEntry {
  std::string word;  // lowercased
  PhonemeSeq phonemes;
  std::uint64_t frequency = 0;
};

class PhoneticLexicon {
 public:
  static constexpr std::uint64_t kDefaultMinFrequency = 1000;

  PhoneticLexicon() = default;

  // Keeps entries with frequency >= min_frequency and a non-empty
  // pronunciation. Words are lowercased; the first entry for a word wins.
  static PhoneticLexicon from_entries(std::vector<LexiconEntry> entries,
                                      std::uint64_t min_frequency =
                                          kDefaultMinFrequency);

  // Pronunciations: `word<TAB>SYM SYM ...`. Counts: `word<TAB>count`.
  // A word needs both to enter the lexicon.
  static PhoneticLexicon parse(std::string_view pronunciations,
                               std::string_view counts,
                               std::uint64_t min_frequency =
                                   kDefaultMinFrequency);
  static PhoneticLexicon load(const std::string &pronunciation_path,
                              const std::string &counts_path,
                              std::uint64_t min_frequency =
                                  kDefaultMinFrequency);

  const LexiconEntry *find(std::string_view word) const;
  std::span<const LexiconEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::uint64_t min_frequency() const { return min_frequency_; }

  // Entry indices whose pronunciation has exactly `length` symbols.
  std::span<const std::uint32_t> bucket(std::size_t length) const;
  std::size_t max_length() const { return buckets_.empty() ? 0 : buckets_.size() - 1; }

 private:
  std::vector<LexiconEntry> entries_;  // sorted by word
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::uint64_t min_frequency_ = kDefaultMinFrequency;
};

// Lexicon pronunciation when present, rule-based fallback otherwise.
PhonemeSeq to_phonemes(std::string_view word, const PhoneticLexicon &lex);

struct SpeakoMatch {
  std::string word;
  std::size_t distance = 0;
  std::uint64_t frequency = 0;
};

// The lexicon word other than `word` (case-insensitive) with the smallest
// phoneme distance; ties go to higher frequency, then lexicographic order.
// Throws OperatorError when nothing but the word itself is available.
SpeakoMatch nearest_speako(std::string_view word, const PhoneticLexicon &lex);

// Memo of nearest_speako results for one lexicon; safe to share between
// threads. The search is exhaustive, so repeated vocabulary pays off quickly.
class SpeakoCache {
 public:
  explicit SpeakoCache(const PhoneticLexicon &lex) : lex_(&lex) {}
  SpeakoMatch nearest(std::string_view word);
  const PhoneticLexicon &lexicon() const { return *lex_; }

 private:
  const PhoneticLexicon *lex_;
  std::mutex mu_;
  std::unordered_map<std::string, SpeakoMatch> memo_;
};

// Replaces one uniformly drawn token that contains a letter with its nearest
// speako; no such token -> no-op. The slot tag is kept; the record's detail
// holds the distance and both pronunciations.
PerturbedUtterance apply_speako(const Utterance &u, const PhoneticLexicon &lex,
                                std::uint64_t seed, SpeakoCache *cache = nullptr);

}  // namespace slotperturb

#endif  // SLOTPERTURB_SPEAKO_H_
