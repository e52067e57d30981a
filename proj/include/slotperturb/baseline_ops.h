#ifndef SLOTPERTURB_BASELINE_OPS_H_
#define SLOTPERTURB_BASELINE_OPS_H_

// Checklist-style comparison operators: typo, contraction, punctuation.
// Each makes a single label-preserving edit or returns a flagged no-op.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slotperturb/corpus.h"

namespace slotperturb {

// Contracted <-> expanded forms, e.g. "don't" <-> "do not",
// "can't" <-> "cannot". Keys are lowercase; one-to-one in both directions.
class ContractionTable {
 public:
  // Text: `contracted<TAB>expanded` lines. Throws ParseError on duplicates in
  // either direction.
  static ContractionTable parse(std::string_view text);
  static ContractionTable load(const std::string &path);
  // Built-in copy of the bundled table.
  static ContractionTable defaults();

  void add(std::string contracted, std::vector<std::string> expanded);

  std::size_t size() const { return to_expanded_.size(); }
  const std::vector<std::string> *expand(std::string_view contracted) const;
  const std::string *contract(const std::vector<std::string> &expanded) const;
  std::size_t longest_expansion() const { return longest_; }

 private:
  std::unordered_map<std::string, std::vector<std::string>> to_expanded_;
  std::unordered_map<std::string, std::string> to_contracted_;  // key: joined
  std::size_t longest_ = 0;
};

// `word` with code points k and k+1 exchanged; throws OperatorError when
// k+1 is out of range.
std::string swap_adjacent(std::string_view word, std::size_t k);

// Swaps one adjacent pair of differing characters (code points) inside one
// token. Eligible tokens have at least one such pair; none -> no-op.
PerturbedUtterance apply_typo(const Utterance &u, std::uint64_t seed);

// Rewrites the leftmost legal table match in the opposite direction. A match
// is legal when its tokens are all O or all belong to one slot chunk; the new
// tokens then get O, or B-/I- tags continuing that chunk. No legal match ->
// no-op.
PerturbedUtterance apply_contraction(const Utterance &u,
                                     const ContractionTable &table);

// Removes a final ".", "?" or "!" token, or appends "." (tag O) when absent.
// A slot-tagged final punctuation mark, or an utterance consisting only of a
// punctuation mark, yields a no-op.
PerturbedUtterance apply_punctuation(const Utterance &u);

}  // namespace slotperturb

#endif  // SLOTPERTURB_BASELINE_OPS_H_
