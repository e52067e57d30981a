#ifndef SLOTPERTURB_TESTS_ORACLES_H_
#define SLOTPERTURB_TESTS_ORACLES_H_

// Reference implementations written independently of the library, kept as
// plain and brute-force as possible. Tests compare library results against
// these exactly.

#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "slotperturb/confidence.h"
#include "slotperturb/corpus.h"
#include "slotperturb/metrics.h"

namespace slotperturb::testing {

// (label, start, end) for every span [start, end) where tags[start] is B-L,
// every later tag inside is I-L and the tag at `end` (if any) is not I-L.
// Enumerates all O(n^2) spans.
std::vector<std::tuple<std::string, std::size_t, std::size_t>> oracle_chunks(
    const std::vector<std::string> &tags);

// Tag grammar via std::regex plus the I-after-B/I rule.
bool oracle_bio_valid(const std::vector<std::string> &tags);

// Full-matrix Levenshtein with unit costs.
template <typename Seq>
std::size_t oracle_levenshtein(const Seq &a, const Seq &b) {
  std::vector<std::vector<std::size_t>> m(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) m[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) m[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = m[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      std::size_t del = m[i - 1][j] + 1;
      std::size_t ins = m[i][j - 1] + 1;
      m[i][j] = std::min(sub, std::min(del, ins));
    }
  }
  return m[a.size()][b.size()];
}

struct OracleScores {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
  double intent_accuracy = 0;
  double e2e_accuracy = 0;
  double exact_match = 0;
};

// Predictions are matched to gold by position (callers align them); chunk
// sets are intersected as sets of (utterance, label, start, end).
OracleScores oracle_scores(const std::vector<Utterance> &gold,
                           const std::vector<Prediction> &preds);

// Operator index (0-based, declaration order) with the smallest value; the
// first one wins ties.
std::size_t oracle_argmin(const std::vector<double> &values);

// Checks one operator output against the label-preservation contract and
// returns a description of the first violation, if any.
std::optional<std::string> label_preservation_violation(
    const Utterance &origin, const PerturbedUtterance &out);

}  // namespace slotperturb::testing

#endif  // SLOTPERTURB_TESTS_ORACLES_H_
