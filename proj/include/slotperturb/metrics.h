#ifndef SLOTPERTURB_METRICS_H_
#define SLOTPERTURB_METRICS_H_

// Scoring of predictions against gold data: chunk-exact slot F1, intent
// accuracy and end-to-end (sentence) accuracy, plus mean/variance over
// replicate sets and a memorization baseline.
//
// Prediction files are JSONL keyed by id:
//
//   {"id":"snips-0001","intent":"AddToPlaylist","slots":["O","B-music_item"]}

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slotperturb/corpus.h"

namespace slotperturb {

struct Prediction {
  std::string utterance_id;
  std::string intent;
  std::vector<std::string> slot_tags;

  friend bool operator==(const Prediction &, const Prediction &) = default;
};

// Throws ParseError with the line number.
std::vector<Prediction> parse_predictions(std::string_view jsonl);
std::vector<Prediction> load_predictions(const std::string &path);
std::string write_predictions(std::span<const Prediction> preds);

// The prediction for each gold utterance, in gold order. Throws JoinError
// listing missing, extra, duplicated and length-mismatched ids.
std::vector<const Prediction *> join(const Dataset &gold,
                                     std::span<const Prediction> preds);

struct ScoreOptions {
  // Promote dangling I- tags in predictions to B- before chunking. Gold is
  // validated on load and never repaired.
  bool repair_predictions = false;
};

struct ChunkCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct SlotScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ChunkCounts counts;
  // Set when precision or recall had a zero denominator (scored as 0).
  bool degenerate = false;
};

SlotScore slot_f1(const Dataset &gold, std::span<const Prediction> preds,
                  ScoreOptions options = {});
double intent_accuracy(const Dataset &gold, std::span<const Prediction> preds);
double e2e_accuracy(const Dataset &gold, std::span<const Prediction> preds);
// Fraction of utterances whose tag sequence matches exactly.
double slot_exact_match(const Dataset &gold, std::span<const Prediction> preds);

struct ScoreReport {
  std::string name;
  double slot_precision = 0.0;
  double slot_recall = 0.0;
  double slot_f1 = 0.0;
  double intent_accuracy = 0.0;
  double e2e_accuracy = 0.0;
  double slot_exact_match = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t n_utterances = 0;
  bool degenerate = false;

  // Numeric fields in report order, as (name, value).
  std::vector<std::pair<std::string, double>> numeric_fields() const;
};

ScoreReport score(const Dataset &gold, std::span<const Prediction> preds,
                  ScoreOptions options = {}, std::string name = "");

struct FieldStats {
  std::string field;
  double mean = 0.0;
  double variance = 0.0;  // population variance
};

struct AggregateReport {
  std::size_t n_reports = 0;
  std::vector<FieldStats> fields;  // numeric_fields() order

  const FieldStats *find(std::string_view field) const;
};

// Throws ConfigError on an empty list.
AggregateReport aggregate(std::span<const ScoreReport> reports);

// {"aggregate": {...} (when given), "sets": [...]} with sorted keys.
std::string report_json(std::span<const ScoreReport> reports,
                        const AggregateReport *agg);
// Aligned table with Slot F1 / Intent Acc / E2E Acc columns in percent; the
// aggregate row shows mean±variance (variance in squared percentage points).
std::string report_text(std::span<const ScoreReport> reports,
                        const AggregateReport *agg);

// Memorization baseline: majority intent (ties: lexicographically first) and,
// per token surface, its most frequent training tag (ties: lexicographically
// first); unseen surfaces get O.
class BaselineModel {
 public:
  // Throws ConfigError on an empty training set.
  static BaselineModel train(const Dataset &train);

  Prediction predict(const Utterance &u) const;
  // Fraction of the utterance's tokens seen in training; 0 for no tokens.
  double hit_rate(const Utterance &u) const;
  const std::string &majority_intent() const { return intent_; }

 private:
  std::string intent_;
  std::unordered_map<std::string, std::string> tag_of_;
};

std::vector<Prediction> trivial_baseline_predict(const Dataset &train,
                                                 const Dataset &eval);

}  // namespace slotperturb

#endif  // SLOTPERTURB_METRICS_H_
