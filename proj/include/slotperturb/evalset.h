#ifndef SLOTPERTURB_EVALSET_H_
#define SLOTPERTURB_EVALSET_H_

// Perturbed evaluation sets: one operator for every utterance, a uniformly
// drawn operator per utterance (Random, replicated), or the operator a model
// is least confident about (Hard).
//
// Seeds. Every utterance gets its own streams keyed by its index, so results
// do not depend on worker count or scheduling:
//
//   apply seed   = derive_seed(master, index, 2)
//   choice seed  = derive_seed(master, index, 1)     (Random only)
//
// Random replicate r uses master = seed ^ r. With one replicate and a
// one-operator group the Random set is therefore identical to the
// single-operator set, and a Hard set applies exactly the perturbation a
// single-operator set with the same seed would have produced.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slotperturb/baseline_ops.h"
#include "slotperturb/confidence.h"
#include "slotperturb/corpus.h"
#include "slotperturb/fillers.h"
#include "slotperturb/metrics.h"
#include "slotperturb/provenance.h"
#include "slotperturb/speako.h"
#include "slotperturb/synonyms.h"
#include "slotperturb/tagger.h"

namespace slotperturb {

struct ResourcePaths {
  std::string pos_lexicon;
  std::string stopwords;
  std::string fillers;
  std::string synonyms;
  std::string pronunciations;
  std::string word_counts;
  std::string contractions;
  std::string pos_tags;  // optional externally produced tags

  // The bundled file names inside `dir`.
  static ResourcePaths under(const std::string &dir);
  // Throws ConfigError naming the first path that is not a readable file.
  void validate() const;
};

struct Resources {
  PosLexicon pos;
  std::optional<ExternalTags> external_tags;
  FillerInventory fillers = FillerInventory::defaults();
  FillerOptions filler_options;
  std::shared_ptr<const CandidateProvider> provider;
  SynonymOptions synonym_options;
  ContractionTable contractions = ContractionTable::defaults();

  // Also resets the speako memo.
  void set_phonetic(PhoneticLexicon lex);
  const PhoneticLexicon *phonetic() const { return phonetic_.get(); }
  SpeakoCache *speako_cache() const { return speako_cache_.get(); }

  // Loads everything from files; the provider is the dictionary unless one is
  // set afterwards. Validates all paths first.
  static Resources load(const ResourcePaths &paths,
                        std::uint64_t min_frequency =
                            PhoneticLexicon::kDefaultMinFrequency);

 private:
  std::shared_ptr<const PhoneticLexicon> phonetic_;
  std::shared_ptr<SpeakoCache> speako_cache_;
};

// Applies `op` once. The result's id is perturbed_id(u.id, op). Errors carry
// the utterance id and operator name.
PerturbedUtterance apply_operator(const Utterance &u, OperatorId op,
                                  const Resources &res, std::uint64_t seed);

// Wraps a provider that is not thread-safe so calls are serialized.
std::shared_ptr<const CandidateProvider> serialized(
    std::shared_ptr<const CandidateProvider> provider);

// Runs fn(i) for i in [0, n) on up to `workers` threads. If any call throws,
// the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)> &fn);

struct BuildOptions {
  unsigned workers = 1;
};

std::vector<PerturbedUtterance> build_single_operator_set(
    const Dataset &d, OperatorId op, std::uint64_t seed, const Resources &res,
    BuildOptions options = {});

// The operator drawn for utterance `index` of replicate master `master`.
OperatorId random_choice(std::uint64_t master, std::size_t index,
                         std::span<const OperatorId> group);

// One list of records per replicate. Throws ConfigError when replicates is 0
// or the group is empty.
std::vector<std::vector<PerturbedUtterance>> build_random_set(
    const Dataset &d, std::uint64_t seed, std::size_t replicates,
    const Resources &res, std::span<const OperatorId> group = kSpokenGroup,
    BuildOptions options = {});

// Share of each operator among a set's records. Percentages are rounded to
// one decimal with largest-remainder rounding, so they add up to exactly 100
// (for a non-empty set).
class CompositionReport {
 public:
  struct Row {
    OperatorId op;
    std::size_t count = 0;
    double percent = 0.0;  // unrounded
    int tenths = 0;        // rounded percentage x 10
  };

  static CompositionReport from_records(std::span<const ProvenanceRecord> records,
                                        std::span<const OperatorId> ops);
  static CompositionReport from_records(std::span<const PerturbedUtterance> records,
                                        std::span<const OperatorId> ops);

  const std::vector<Row> &rows() const { return rows_; }
  std::size_t total() const { return total_; }
  const Row *find(OperatorId op) const;

  std::string to_json() const;
  // One aligned line per operator, e.g. "EOS Filler            52.3".
  std::string to_text() const;

 private:
  std::vector<Row> rows_;
  std::size_t total_ = 0;
};

// argmin over the group of the table's confidences for `id`; ties go to the
// earlier operator in declaration order. The table must cover every pair.
OperatorId hard_choice(const ConfidenceTable &table, std::string_view id,
                       std::span<const OperatorId> group);

struct HardSet {
  std::vector<PerturbedUtterance> records;
  CompositionReport composition;
};

// Throws ConfigError listing every missing (id, operator) pair.
void check_coverage(const ConfidenceTable &table, const Dataset &d,
                    std::span<const OperatorId> group);

// Checks coverage first (see above).
HardSet build_hard_set(const Dataset &d, const ConfidenceTable &table,
                       std::uint64_t seed, const Resources &res,
                       std::span<const OperatorId> group = kSpokenGroup,
                       BuildOptions options = {});

// Proxy confidences from the memorization baseline: for each utterance and
// operator, the model's hit rate on the single-operator perturbation built
// with the same seed.
ConfidenceTable baseline_confidence(const BaselineModel &model, const Dataset &d,
                                    std::uint64_t seed, const Resources &res,
                                    std::span<const OperatorId> group = kSpokenGroup,
                                    BuildOptions options = {});

}  // namespace slotperturb

#endif  // SLOTPERTURB_EVALSET_H_
