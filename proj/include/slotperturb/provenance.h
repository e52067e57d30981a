#ifndef SLOTPERTURB_PROVENANCE_H_
#define SLOTPERTURB_PROVENANCE_H_

// Sidecar JSONL records describing how each perturbed utterance was made.
// One line per utterance, in dataset order:
//
//   {"detail":{...},"edit_site":5,"id":"u1@eos_filler","inserted":"if you can",
//    "no_op":false,"no_op_reason":"","operator":"eos_filler","origin_id":"u1",
//    "replaced":"","seed":123}
//
// Keys are sorted so that identical runs give identical bytes.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slotperturb/corpus.h"

namespace slotperturb {

struct ProvenanceRecord {
  std::string id;
  std::string origin_id;
  OperatorId op = OperatorId::kBosFiller;
  std::size_t edit_site = 0;
  std::string inserted;
  std::string replaced;
  std::uint64_t seed = 0;
  bool no_op = false;
  std::string no_op_reason;
  std::map<std::string, std::string> detail;

  friend bool operator==(const ProvenanceRecord &, const ProvenanceRecord &) = default;
};

ProvenanceRecord provenance_of(const PerturbedUtterance &p);

std::string provenance_line(const ProvenanceRecord &r);  // no trailing newline
std::string write_provenance(std::span<const PerturbedUtterance> records);

// Throws ParseError with the line number on malformed records.
std::vector<ProvenanceRecord> parse_provenance(std::string_view text);

// Utterance id for output sets: "<origin>@<operator name>".
std::string perturbed_id(std::string_view origin_id, OperatorId op);

// The perturbed utterances as a dataset named `name` (inventories refreshed).
Dataset to_dataset(std::span<const PerturbedUtterance> records, std::string name);

}  // namespace slotperturb

#endif  // SLOTPERTURB_PROVENANCE_H_
