#include "slotperturb/fillers.h"

#include <algorithm>

#include <json.hpp>

#include "slotperturb/errors.h"
#include "slotperturb/rng.h"
#include "slotperturb/text.h"

namespace slotperturb {

namespace {

std::vector<Phrase> to_phrases(std::initializer_list<std::string_view> items) {
  std::vector<Phrase> out;
  for (std::string_view item : items) out.push_back(split_whitespace(item));
  return out;
}

OperatorId operator_for(FillerKind kind) {
  switch (kind) {
    case FillerKind::kBos: return OperatorId::kBosFiller;
    case FillerKind::kEos: return OperatorId::kEosFiller;
    case FillerKind::kPreVerb: return OperatorId::kPreVerbFiller;
    case FillerKind::kPostVerb: return OperatorId::kPostVerbFiller;
  }
  return OperatorId::kBosFiller;
}

std::vector<Phrase> read_phrase_list(const nlohmann::json &doc,
                                     const char *key,
                                     std::vector<Phrase> fallback) {
  if (!doc.contains(key)) return fallback;
  const auto &arr = doc.at(key);
  if (!arr.is_array()) throw ConfigError(std::string(key) + " must be an array");
  std::vector<Phrase> out;
  for (const auto &item : arr) {
    if (!item.is_string()) {
      throw ConfigError(std::string(key) + " entries must be strings");
    }
    Phrase p = split_whitespace(item.get<std::string>());
    if (p.empty()) throw ConfigError(std::string(key) + " has an empty phrase");
    out.push_back(std::move(p));
  }
  if (out.empty()) throw ConfigError(std::string(key) + " is empty");
  return out;
}

// End of the slot chunk containing position `index` strictly inside, or
// `index` itself when it is a legal point.
std::size_t skip_to_chunk_end(const Utterance &u, std::size_t index) {
  for (const SlotChunk &c : chunks(u)) {
    if (c.start < index && index < c.end) return c.end;
  }
  return index;
}

}  // namespace

FillerInventory FillerInventory::defaults() {
  FillerInventory inv;
  inv.bos = to_phrases({"so", "like", "actually", "okay so", "so okay",
                        "so basically", "now", "well"});
  inv.eos = to_phrases({"if you please", "please and thank you", "if you can",
                        "right now", "right away", "would you mind ?"});
  inv.pre_verb = to_phrases({"like", "basically", "actually"});
  inv.post_verb = to_phrases({"basically", "actually", "like", "you know"});
  inv.failsafe_word = "like";
  return inv;
}

const std::vector<Phrase> &FillerInventory::phrases(FillerKind kind) const {
  switch (kind) {
    case FillerKind::kBos: return bos;
    case FillerKind::kEos: return eos;
    case FillerKind::kPreVerb: return pre_verb;
    case FillerKind::kPostVerb: return post_verb;
  }
  return bos;
}

FillerInventory parse_filler_inventory(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(std::string("filler inventory: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("filler inventory must be an object");
  FillerInventory defaults = FillerInventory::defaults();
  FillerInventory inv;
  inv.bos = read_phrase_list(doc, "bos", defaults.bos);
  inv.eos = read_phrase_list(doc, "eos", defaults.eos);
  inv.pre_verb = read_phrase_list(doc, "pre_verb", defaults.pre_verb);
  inv.post_verb = read_phrase_list(doc, "post_verb", defaults.post_verb);
  inv.failsafe_word = defaults.failsafe_word;
  if (doc.contains("failsafe_word")) {
    const auto &w = doc.at("failsafe_word");
    if (!w.is_string() || w.get<std::string>().empty() ||
        has_whitespace(w.get<std::string>())) {
      throw ConfigError("failsafe_word must be a single non-empty word");
    }
    inv.failsafe_word = w.get<std::string>();
  }
  return inv;
}

FillerInventory load_filler_inventory(const std::string &path) {
  return parse_filler_inventory(read_file(path));
}

std::vector<std::size_t> legal_insertion_points(const Utterance &u) {
  std::vector<bool> legal(u.tokens.size() + 1, true);
  for (const SlotChunk &c : chunks(u)) {
    for (std::size_t i = c.start + 1; i < c.end; ++i) legal[i] = false;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < legal.size(); ++i) {
    if (legal[i]) out.push_back(i);
  }
  return out;
}

std::size_t nearest_legal_point(const Utterance &u, std::size_t index) {
  std::vector<std::size_t> legal = legal_insertion_points(u);
  std::size_t best = legal.front();
  std::size_t best_gap = index > best ? index - best : best - index;
  for (std::size_t p : legal) {
    std::size_t gap = index > p ? index - p : p - index;
    // Strict comparison over ascending points keeps the leftmost on ties.
    if (gap < best_gap) {
      best = p;
      best_gap = gap;
    }
  }
  return best;
}

PerturbedUtterance apply_filler(const Utterance &u, FillerKind kind,
                                const FillerInventory &inv,
                                std::span<const CoarsePos> tags,
                                std::uint64_t seed, FillerOptions options) {
  const std::vector<Phrase> &pool = inv.phrases(kind);
  if (pool.empty()) throw ConfigError("empty filler inventory");
  if (tags.size() != u.tokens.size()) {
    throw OperatorError("POS tags not aligned with utterance " + u.id);
  }

  Rng rng(seed);
  Phrase phrase = pool[rng.uniform_index(pool.size())];
  std::size_t site = 0;
  std::string placement;

  switch (kind) {
    case FillerKind::kBos:
      site = 0;
      break;
    case FillerKind::kEos:
      site = u.tokens.size();
      break;
    case FillerKind::kPreVerb:
    case FillerKind::kPostVerb: {
      auto verb = first_verb_index(tags);
      if (verb) {
        if (kind == FillerKind::kPreVerb) {
          site = *verb;
        } else {
          site = *verb + 1;
          if (options.verb_phrase_mode) {
            while (site < tags.size() && tags[site] == CoarsePos::kNoun) ++site;
            site = skip_to_chunk_end(u, site);
          }
        }
        site = nearest_legal_point(u, site);
        placement = "verb";
        break;
      }
      phrase = Phrase{inv.failsafe_word};
      std::vector<SlotChunk> cs = chunks(u);
      if (!cs.empty()) {
        site = cs.front().start;
        placement = "failsafe-slot";
      } else {
        site = 0;
        placement = "failsafe-bos";
      }
      break;
    }
  }

  PerturbedUtterance out;
  out.base = u;
  std::vector<Token> inserted;
  for (const std::string &w : phrase) inserted.push_back(Token{w, "O"});
  out.base.tokens.insert(out.base.tokens.begin() + static_cast<long>(site),
                         inserted.begin(), inserted.end());
  out.origin_id = u.id;
  out.op = operator_for(kind);
  out.edit_site = site;
  out.inserted_or_replacement = join(phrase, " ");
  out.seed = seed;
  if (!placement.empty()) out.detail["placement"] = placement;
  return out;
}

}  // namespace slotperturb
