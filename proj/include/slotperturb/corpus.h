#ifndef SLOTPERTURB_CORPUS_H_
#define SLOTPERTURB_CORPUS_H_

// Data model and file I/O for BIO-tagged slot-filling / intent-detection
// corpora.
//
// Canonical file format (UTF-8, LF):
//
//   # intent=AddToPlaylist id=snips-0001
//   add<TAB>O
//   tune<TAB>B-music_item
//   ...
//   <blank line>
//
// Every utterance is a header line, one `surface<TAB>tag` line per token and
// a terminating blank line. The parser also accepts the header keys in either
// order, CRLF line endings, repeated blank lines and a missing final blank
// line; write_conll() normalizes all of those away.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slotperturb/operator_id.h"

namespace slotperturb {

struct Token {
  std::string surface;
  std::string slot_tag;

  friend bool operator==(const Token &, const Token &) = default;
};

struct Utterance {
  std::string id;
  std::vector<Token> tokens;
  std::string intent;

  std::vector<std::string> surfaces() const;
  std::vector<std::string> tags() const;
  std::size_t size() const { return tokens.size(); }

  friend bool operator==(const Utterance &, const Utterance &) = default;
};

// Half-open token span [start, end) carrying one slot label.
struct SlotChunk {
  std::string label;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const SlotChunk &, const SlotChunk &) = default;
  friend auto operator<=>(const SlotChunk &, const SlotChunk &) = default;
};

struct Dataset {
  std::string name;
  std::vector<Utterance> utterances;
  std::set<std::string> intent_inventory;
  std::set<std::string> slot_inventory;

  // Recomputes both inventories from the utterances.
  void refresh_inventories();
  std::size_t size() const { return utterances.size(); }
};

// --- BIO tags -------------------------------------------------------------

enum class TagPrefix { kOutside, kBegin, kInside };

struct ParsedTag {
  TagPrefix prefix = TagPrefix::kOutside;
  std::string_view label;  // empty for O
};

// Parses "O", "B-<label>" or "I-<label>" (label non-empty, no whitespace).
std::optional<ParsedTag> parse_tag(std::string_view tag);

enum class BioRule {
  kEmptyUtterance,
  kEmptySurface,
  kWhitespaceInSurface,
  kMalformedTag,
  kDanglingInside,  // I-L not preceded by B-L or I-L
};

std::string_view bio_rule_name(BioRule rule);

struct BioDiagnostic {
  std::string utterance_id;
  std::size_t token_index = 0;
  BioRule rule = BioRule::kMalformedTag;
  std::string detail;

  std::string to_string() const;
};

// Empty iff the utterance satisfies every Token and Utterance invariant.
std::vector<BioDiagnostic> validate_bio(const Utterance &u);

// Chunks of a tag sequence: B-L opens a chunk that extends over following
// I-L tags. I-L tags that do not continue a chunk of L open nothing, so an
// invalid sequence is scored strictly.
std::vector<SlotChunk> chunks(std::span<const std::string> tags);
std::vector<SlotChunk> chunks(const Utterance &u);

// Rewrites I-L tags that do not continue a chunk of L into B-L.
std::vector<std::string> repair_bio(std::span<const std::string> tags);

// --- File I/O -------------------------------------------------------------

// Parses the canonical format. Throws ParseError (with line number) on bad
// header or token lines or tag grammar, StructuralError on duplicate ids and
// BioError on dangling I- tags.
Dataset parse_conll(std::string_view text, std::string name = "");

std::string write_conll(const Dataset &d);

Dataset load_conll(const std::string &path);

// Importer for two-column files (`token tag` per line, blank line between
// utterances) with a separate intent file (one label per line, same order).
// Ids are `<name>-<index>` with a zero-padded 1-based index.
Dataset import_two_column(std::string_view tag_text, std::string_view intent_text,
                          std::string name);

// Builds an utterance from "add/O tune/B-music_item ..." notation; the tag
// follows the last '/' of each piece.
Utterance parse_inline(std::string_view tagged, std::string intent,
                       std::string id);

// --- Perturbation records -------------------------------------------------

struct PerturbedUtterance {
  Utterance base;  // post-edit state
  std::string origin_id;
  OperatorId op = OperatorId::kBosFiller;
  std::size_t edit_site = 0;         // token index or insertion index
  std::string inserted_or_replacement;  // new material, space-joined
  std::string replaced;              // removed material, space-joined
  std::uint64_t seed = 0;
  bool no_op = false;
  std::string no_op_reason;
  // Operator-specific extras (speako distance, synonym fallback, ...).
  std::map<std::string, std::string> detail;
};

// Builds the record for an operator that leaves the utterance unchanged.
PerturbedUtterance make_no_op(const Utterance &u, OperatorId op,
                              std::uint64_t seed, std::string reason);

enum class EditKind { kNone, kInsertion, kDeletion, kReplacement, kRewrite };

// The single contiguous region where two utterances differ, found by
// stripping the longest common token prefix and suffix.
struct EditShape {
  EditKind kind = EditKind::kNone;
  std::size_t start = 0;
  std::size_t removed = 0;   // tokens taken out of the origin
  std::size_t inserted = 0;  // tokens put into the output
};

EditShape diff_edit(const Utterance &origin, const Utterance &edited);

}  // namespace slotperturb

#endif  // SLOTPERTURB_CORPUS_H_
