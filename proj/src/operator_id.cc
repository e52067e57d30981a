#include "slotperturb/operator_id.h"

namespace slotperturb {

namespace {

struct OperatorNames {
  std::string_view name;
  std::string_view label;
};

constexpr std::array<OperatorNames, 13> kNames = {{
    {"bos_filler", "BOS Filler"},
    {"pre_verb_filler", "Pre-V. Filler"},
    {"post_verb_filler", "Post-V. Filler"},
    {"eos_filler", "EOS Filler"},
    {"syn_verb", "Syn. V."},
    {"syn_adj", "Syn. Adj."},
    {"syn_adv", "Syn. Adv."},
    {"syn_any", "Syn. Any"},
    {"syn_stopword", "Syn. StopW"},
    {"speako", "Speako"},
    {"typo", "Checklist Typo"},
    {"contraction", "Checklist Contract."},
    {"punctuation", "Checklist Punct."},
}};

}  // namespace

std::string_view operator_name(OperatorId op) {
  return kNames[static_cast<std::size_t>(op)].name;
}

std::string_view operator_label(OperatorId op) {
  return kNames[static_cast<std::size_t>(op)].label;
}

std::optional<OperatorId> parse_operator(std::string_view name) {
  for (OperatorId op : kAllOperators) {
    if (operator_name(op) == name) return op;
  }
  return std::nullopt;
}

std::optional<std::span<const OperatorId>> parse_operator_group(
    std::string_view name) {
  if (name == "spoken") return kSpokenGroup;
  if (name == "baseline") return kBaselineGroup;
  if (name == "all") return std::span<const OperatorId>(kAllOperators);
  return std::nullopt;
}

}  // namespace slotperturb
