#include "slotperturb/synonyms.h"

#include <algorithm>
#include <array>
#include <cstdio>

#include "slotperturb/errors.h"
#include "slotperturb/rng.h"
#include "slotperturb/text.h"

namespace slotperturb {

namespace {

OperatorId operator_for(SynonymKind kind) {
  switch (kind) {
    case SynonymKind::kVerb: return OperatorId::kSynonymVerb;
    case SynonymKind::kAdj: return OperatorId::kSynonymAdj;
    case SynonymKind::kAdv: return OperatorId::kSynonymAdv;
    case SynonymKind::kAny: return OperatorId::kSynonymAny;
    case SynonymKind::kStopword: return OperatorId::kSynonymStopword;
  }
  return OperatorId::kSynonymAny;
}

std::vector<std::size_t> indices_with(std::span<const CoarsePos> tags,
                                      CoarsePos pos) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == pos) out.push_back(i);
  }
  return out;
}

void shuffle(std::vector<std::size_t> &v, Rng &rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
  }
}

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", w);
  return buf;
}

}  // namespace

std::string_view synonym_kind_name(SynonymKind kind) {
  switch (kind) {
    case SynonymKind::kVerb: return "verb";
    case SynonymKind::kAdj: return "adj";
    case SynonymKind::kAdv: return "adv";
    case SynonymKind::kAny: return "any";
    case SynonymKind::kStopword: return "stopword";
  }
  return "any";
}

std::string_view target_fallback_name(TargetFallback f) {
  switch (f) {
    case TargetFallback::kNone: return "none";
    case TargetFallback::kNoun: return "noun";
    case TargetFallback::kAnyToken: return "any-token";
  }
  return "none";
}

// --- DictionaryProvider -----------------------------------------------------

DictionaryProvider DictionaryProvider::parse(std::string_view text) {
  DictionaryProvider p;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::size_t tab = t.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw ParseError("expected word<TAB>syn1,syn2,...", line_no);
    }
    std::vector<std::string> syns;
    for (const std::string &s : split(t.substr(tab + 1), ',')) {
      std::string_view w = trim(s);
      if (w.empty()) continue;
      if (has_whitespace(w)) {
        throw ParseError("multi-word synonym '" + std::string(w) + "'", line_no);
      }
      syns.emplace_back(w);
    }
    p.entries_[to_lower(t.substr(0, tab))] = std::move(syns);
  }
  return p;
}

DictionaryProvider DictionaryProvider::load(const std::string &path) {
  DictionaryProvider p = parse(read_file(path));
  p.origin_ = path;
  return p;
}

std::vector<Candidate> DictionaryProvider::candidates(
    std::span<const std::string> tokens, std::size_t mask_index,
    std::size_t top_k) const {
  std::vector<Candidate> out;
  if (mask_index >= tokens.size()) return out;
  auto it = entries_.find(to_lower(tokens[mask_index]));
  if (it == entries_.end()) return out;
  for (std::size_t rank = 0; rank < it->second.size() && out.size() < top_k;
       ++rank) {
    out.push_back(Candidate{it->second[rank], 1.0 / static_cast<double>(rank + 1)});
  }
  return out;
}

std::string DictionaryProvider::describe() const {
  return "dictionary:" + origin_;
}

// --- Target selection -------------------------------------------------------

TargetSelection select_targets(const Utterance &u, SynonymKind kind,
                               std::span<const CoarsePos> tags,
                               std::uint64_t seed) {
  if (u.tokens.empty()) {
    throw OperatorError("synonym target requested on empty utterance " + u.id);
  }
  if (tags.size() != u.tokens.size()) {
    throw OperatorError("POS tags not aligned with utterance " + u.id);
  }
  Rng rng(seed);
  TargetSelection sel;
  switch (kind) {
    case SynonymKind::kVerb: sel.wanted = CoarsePos::kVerb; break;
    case SynonymKind::kAdj: sel.wanted = CoarsePos::kAdj; break;
    case SynonymKind::kAdv: sel.wanted = CoarsePos::kAdv; break;
    case SynonymKind::kStopword: sel.wanted = CoarsePos::kStopword; break;
    case SynonymKind::kAny: {
      constexpr std::array<CoarsePos, 4> kChoices = {
          CoarsePos::kVerb, CoarsePos::kAdj, CoarsePos::kAdv, CoarsePos::kNoun};
      sel.wanted = kChoices[rng.uniform_index(kChoices.size())];
      break;
    }
  }
  sel.order = indices_with(tags, sel.wanted);
  if (sel.order.empty() && sel.wanted != CoarsePos::kNoun) {
    sel.order = indices_with(tags, CoarsePos::kNoun);
    sel.fallback = TargetFallback::kNoun;
  }
  if (sel.order.empty()) {
    sel.order.resize(u.tokens.size());
    for (std::size_t i = 0; i < sel.order.size(); ++i) sel.order[i] = i;
    sel.fallback = TargetFallback::kAnyToken;
  }
  shuffle(sel.order, rng);
  return sel;
}

std::size_t select_target(const Utterance &u, SynonymKind kind,
                          std::span<const CoarsePos> tags, std::uint64_t seed) {
  return select_targets(u, kind, tags, seed).first();
}

// --- Filtering --------------------------------------------------------------

std::vector<Candidate> filter_candidates(
    const Utterance &u, std::size_t idx, std::span<const Candidate> cands,
    const PosLexicon &lex, const std::unordered_set<std::string> &stop_inventory,
    [[maybe_unused]] SynonymKind kind) {
  std::vector<Candidate> out;
  if (idx >= u.tokens.size()) return out;
  std::vector<std::string> context = u.surfaces();
  const CoarsePos original = tag(context, lex)[idx];
  const std::string original_lower = to_lower(context[idx]);
  // Stopword targets (the STOPWORD kind, or any kind after the last-resort
  // fallback) draw replacements from the function-word inventory only.
  const bool need_stopword = original == CoarsePos::kStopword;

  for (const Candidate &c : cands) {
    if (!is_all_letters(c.token)) continue;
    std::string lower = to_lower(c.token);
    if (lower == original_lower) continue;
    if (need_stopword && !stop_inventory.contains(lower)) continue;
    context[idx] = c.token;
    if (tag(context, lex)[idx] != original) continue;
    out.push_back(c);
  }
  return out;
}

// --- Operator ---------------------------------------------------------------

PerturbedUtterance apply_synonym(const Utterance &u, SynonymKind kind,
                                 const CandidateProvider &provider,
                                 const PosLexicon &lex, std::uint64_t seed,
                                 SynonymOptions options,
                                 std::span<const CoarsePos> tags) {
  const OperatorId op = operator_for(kind);
  std::vector<CoarsePos> own_tags;
  if (tags.empty()) {
    own_tags = tag(u, lex);
    tags = own_tags;
  }
  TargetSelection sel = select_targets(u, kind, tags, seed);
  std::vector<std::string> surfaces = u.surfaces();
  Rng sampler(derive_seed(seed, 1));

  std::size_t attempts = 0;
  for (std::size_t idx : sel.order) {
    ++attempts;
    std::vector<Candidate> raw;
    try {
      raw = provider.candidates(surfaces, idx, options.top_k);
    } catch (const ProviderError &) {
      throw;
    } catch (const std::exception &e) {
      throw ProviderError(provider.describe() + ": " + e.what());
    }
    std::vector<Candidate> kept =
        filter_candidates(u, idx, raw, lex, lex.stopwords, kind);
    if (kept.empty()) continue;

    std::size_t pick = 0;
    if (options.sample) {
      double total = 0.0;
      for (const Candidate &c : kept) total += std::max(c.weight, 0.0);
      if (total > 0.0) {
        double r = sampler.uniform_real() * total;
        for (pick = 0; pick + 1 < kept.size(); ++pick) {
          r -= std::max(kept[pick].weight, 0.0);
          if (r < 0.0) break;
        }
      }
    } else {
      for (std::size_t i = 1; i < kept.size(); ++i) {
        if (kept[i].weight > kept[pick].weight) pick = i;
      }
    }

    PerturbedUtterance out;
    out.base = u;
    out.base.tokens[idx].surface = kept[pick].token;
    out.origin_id = u.id;
    out.op = op;
    out.edit_site = idx;
    out.inserted_or_replacement = kept[pick].token;
    out.replaced = u.tokens[idx].surface;
    out.seed = seed;
    out.detail["target_pos"] = pos_name(sel.wanted);
    out.detail["fallback"] = target_fallback_name(sel.fallback);
    out.detail["attempts"] = std::to_string(attempts);
    out.detail["weight"] = format_weight(kept[pick].weight);
    return out;
  }

  PerturbedUtterance none =
      make_no_op(u, op, seed, "no candidate survived filtering");
  none.detail["target_pos"] = pos_name(sel.wanted);
  none.detail["fallback"] = target_fallback_name(sel.fallback);
  none.detail["attempts"] = std::to_string(attempts);
  return none;
}

}  // namespace slotperturb
