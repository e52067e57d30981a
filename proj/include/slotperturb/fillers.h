#ifndef SLOTPERTURB_FILLERS_H_
#define SLOTPERTURB_FILLERS_H_

// Filler insertion operators: beginning-of-sentence, end-of-sentence,
// pre-verb and post-verb. Inserted tokens are always tagged O and never split
// a slot chunk.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slotperturb/corpus.h"
#include "slotperturb/tagger.h"

namespace slotperturb {

enum class FillerKind { kBos, kEos, kPreVerb, kPostVerb };

using Phrase = std::vector<std::string>;

struct FillerInventory {
  std::vector<Phrase> bos;
  std::vector<Phrase> eos;
  std::vector<Phrase> pre_verb;
  std::vector<Phrase> post_verb;
  std::string failsafe_word = "like";

  // The phrase lists bundled with the toolkit.
  static FillerInventory defaults();

  const std::vector<Phrase> &phrases(FillerKind kind) const;
};

// JSON object with arrays "bos", "eos", "pre_verb", "post_verb" (phrases as
// space-separated strings) and string "failsafe_word". Missing keys keep the
// defaults. Throws ConfigError on empty phrases or lists.
FillerInventory parse_filler_inventory(std::string_view json_text);
FillerInventory load_filler_inventory(const std::string &path);

struct FillerOptions {
  // Post-verb insertion skips a run of NOUN tokens right after the verb
  // (and the rest of any slot chunk it ends in), so "add tune" is treated
  // as the verb phrase.
  bool verb_phrase_mode = false;
};

// Indices in [0, len] that do not fall strictly inside a slot chunk.
std::vector<std::size_t> legal_insertion_points(const Utterance &u);

// Nearest legal insertion index to `index`; ties go left.
std::size_t nearest_legal_point(const Utterance &u, std::size_t index);

// Inserts one phrase drawn uniformly from the inventory for `kind`.
// PRE_VERB / POST_VERB fall back to inserting failsafe_word before the first
// slot token when the tags contain no verb, and to index 0 when there are no
// slot tokens either. Throws ConfigError when the inventory for `kind` is
// empty.
PerturbedUtterance apply_filler(const Utterance &u, FillerKind kind,
                                const FillerInventory &inv,
                                std::span<const CoarsePos> tags,
                                std::uint64_t seed, FillerOptions options = {});

}  // namespace slotperturb

#endif  // SLOTPERTURB_FILLERS_H_
