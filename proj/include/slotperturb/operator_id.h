#ifndef SLOTPERTURB_OPERATOR_ID_H_
#define SLOTPERTURB_OPERATOR_ID_H_

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace slotperturb {

// Declaration order is the documented tie-break order for Hard selection.
enum class OperatorId {
  kBosFiller,
  kPreVerbFiller,
  kPostVerbFiller,
  kEosFiller,
  kSynonymVerb,
  kSynonymAdj,
  kSynonymAdv,
  kSynonymAny,
  kSynonymStopword,
  kSpeako,
  kTypo,
  kContraction,
  kPunctuation,
};

inline constexpr std::array<OperatorId, 13> kAllOperators = {
    OperatorId::kBosFiller,      OperatorId::kPreVerbFiller,
    OperatorId::kPostVerbFiller, OperatorId::kEosFiller,
    OperatorId::kSynonymVerb,    OperatorId::kSynonymAdj,
    OperatorId::kSynonymAdv,     OperatorId::kSynonymAny,
    OperatorId::kSynonymStopword, OperatorId::kSpeako,
    OperatorId::kTypo,           OperatorId::kContraction,
    OperatorId::kPunctuation,
};

// The ten spoken-language operators (fillers, synonyms, speako).
inline constexpr std::span<const OperatorId> kSpokenGroup{kAllOperators.data(),
                                                          10};
// Checklist-style comparison operators.
inline constexpr std::span<const OperatorId> kBaselineGroup{
    kAllOperators.data() + 10, 3};

// Stable machine name, e.g. "eos_filler".
std::string_view operator_name(OperatorId op);

// Report label, e.g. "EOS Filler".
std::string_view operator_label(OperatorId op);

std::optional<OperatorId> parse_operator(std::string_view name);

// Parses "spoken", "baseline" or "all".
std::optional<std::span<const OperatorId>> parse_operator_group(
    std::string_view name);

}  // namespace slotperturb

#endif  // SLOTPERTURB_OPERATOR_ID_H_
