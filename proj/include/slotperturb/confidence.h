#ifndef SLOTPERTURB_CONFIDENCE_H_
#define SLOTPERTURB_CONFIDENCE_H_

// Per (utterance, operator) confidence of some external model in the true
// class of the perturbed utterance. JSONL, one record per pair:
//
//   {"confidence":0.82,"id":"snips-0001","operator":"eos_filler"}
//
// Ids are those of the unperturbed utterances. What the scalar means (intent
// probability, a joint score, ...) is up to the producer; only its order
// matters to the Hard builder.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slotperturb/corpus.h"

namespace slotperturb {

class ConfidenceTable {
 public:
  using Key = std::pair<std::string, OperatorId>;

  // Throws ConfigError for values outside [0, 1] (or NaN) and duplicates.
  void set(std::string id, OperatorId op, double confidence);
  std::optional<double> find(std::string_view id, OperatorId op) const;
  std::size_t size() const { return scores_.size(); }
  const std::map<Key, double> &scores() const { return scores_; }

  // Pairs (id, op) of `d` x `ops` without a score, in dataset then
  // operator order.
  std::vector<Key> missing(const Dataset &d, std::span<const OperatorId> ops) const;

  static ConfidenceTable parse(std::string_view jsonl);
  static ConfidenceTable load(const std::string &path);
  // Sorted by id, then operator order.
  std::string to_jsonl() const;

 private:
  std::map<Key, double> scores_;
};

}  // namespace slotperturb

#endif  // SLOTPERTURB_CONFIDENCE_H_
