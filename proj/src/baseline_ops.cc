#include "slotperturb/baseline_ops.h"

#include <algorithm>

#include "slotperturb/errors.h"
#include "slotperturb/rng.h"
#include "slotperturb/text.h"

namespace slotperturb {

namespace {

constexpr std::string_view kDefaultContractions[][2] = {
    {"don't", "do not"},      {"doesn't", "does not"},
    {"didn't", "did not"},    {"can't", "cannot"},
    {"couldn't", "could not"}, {"won't", "will not"},
    {"wouldn't", "would not"}, {"shouldn't", "should not"},
    {"isn't", "is not"},      {"aren't", "are not"},
    {"wasn't", "was not"},    {"weren't", "were not"},
    {"haven't", "have not"},  {"hasn't", "has not"},
    {"hadn't", "had not"},    {"mustn't", "must not"},
    {"needn't", "need not"},  {"mightn't", "might not"},
    {"i'm", "i am"},          {"i've", "i have"},
    {"i'll", "i will"},       {"i'd", "i would"},
    {"you're", "you are"},    {"you've", "you have"},
    {"you'll", "you will"},   {"you'd", "you would"},
    {"we're", "we are"},      {"we've", "we have"},
    {"we'll", "we will"},     {"they're", "they are"},
    {"they've", "they have"}, {"they'll", "they will"},
    {"he's", "he is"},        {"she's", "she is"},
    {"it's", "it is"},        {"that's", "that is"},
    {"what's", "what is"},    {"where's", "where is"},
    {"who's", "who is"},      {"there's", "there is"},
    {"let's", "let us"},      {"how's", "how is"},
};

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

// Carries a leading capital from the matched text onto the replacement.
std::vector<std::string> match_case(std::vector<std::string> words,
                                    std::string_view first_original) {
  if (!words.empty() && !words[0].empty() && !first_original.empty() &&
      is_upper(first_original[0]) && words[0][0] >= 'a' && words[0][0] <= 'z') {
    words[0][0] = static_cast<char>(words[0][0] - 'a' + 'A');
  }
  return words;
}

// Tags for `count` new tokens replacing u.tokens[start, start+len), or
// nullopt when the span mixes O and chunk tokens or spans two chunks.
std::optional<std::vector<std::string>> inherit_tags(const Utterance &u,
                                                     std::size_t start,
                                                     std::size_t len,
                                                     std::size_t count) {
  auto first = parse_tag(u.tokens[start].slot_tag);
  if (!first) return std::nullopt;
  for (std::size_t i = start + 1; i < start + len; ++i) {
    auto t = parse_tag(u.tokens[i].slot_tag);
    if (!t) return std::nullopt;
    if (first->prefix == TagPrefix::kOutside) {
      if (t->prefix != TagPrefix::kOutside) return std::nullopt;
    } else if (t->prefix != TagPrefix::kInside || t->label != first->label) {
      return std::nullopt;
    }
  }
  std::vector<std::string> tags;
  if (first->prefix == TagPrefix::kOutside) {
    tags.assign(count, "O");
    return tags;
  }
  const std::string label(first->label);
  tags.push_back(u.tokens[start].slot_tag);
  for (std::size_t i = 1; i < count; ++i) tags.push_back("I-" + label);
  return tags;
}

}  // namespace

// --- ContractionTable -----------------------------------------------------

void ContractionTable::add(std::string contracted,
                           std::vector<std::string> expanded) {
  contracted = to_lower(contracted);
  for (std::string &w : expanded) w = to_lower(w);
  if (contracted.empty() || has_whitespace(contracted) || expanded.empty()) {
    throw ParseError("invalid contraction pair for '" + contracted + "'", 0);
  }
  std::string joined = join(expanded, " ");
  if (to_expanded_.contains(contracted)) {
    throw ParseError("duplicate contracted form '" + contracted + "'", 0);
  }
  if (to_contracted_.contains(joined)) {
    throw ParseError("duplicate expanded form '" + joined + "'", 0);
  }
  longest_ = std::max(longest_, expanded.size());
  to_contracted_.emplace(std::move(joined), contracted);
  to_expanded_.emplace(std::move(contracted), std::move(expanded));
}

ContractionTable ContractionTable::parse(std::string_view text) {
  ContractionTable table;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields = split(t, '\t');
    if (fields.size() != 2) {
      throw ParseError("expected contracted<TAB>expanded", line_no);
    }
    try {
      table.add(fields[0], split_whitespace(fields[1]));
    } catch (const ParseError &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return table;
}

ContractionTable ContractionTable::load(const std::string &path) {
  return parse(read_file(path));
}

ContractionTable ContractionTable::defaults() {
  ContractionTable table;
  for (const auto &pair : kDefaultContractions) {
    table.add(std::string(pair[0]), split_whitespace(pair[1]));
  }
  return table;
}

const std::vector<std::string> *ContractionTable::expand(
    std::string_view contracted) const {
  auto it = to_expanded_.find(to_lower(contracted));
  return it == to_expanded_.end() ? nullptr : &it->second;
}

const std::string *ContractionTable::contract(
    const std::vector<std::string> &expanded) const {
  std::vector<std::string> lower;
  for (const std::string &w : expanded) lower.push_back(to_lower(w));
  auto it = to_contracted_.find(join(lower, " "));
  return it == to_contracted_.end() ? nullptr : &it->second;
}

// --- Operators ------------------------------------------------------------

std::string swap_adjacent(std::string_view word, std::size_t k) {
  std::vector<std::size_t> b = utf8_boundaries(word);
  b.push_back(word.size());
  if (k + 2 >= b.size()) {
    throw OperatorError("swap position " + std::to_string(k) + " out of range for '" +
                        std::string(word) + "'");
  }
  std::string out(word.substr(0, b[k]));
  out += word.substr(b[k + 1], b[k + 2] - b[k + 1]);
  out += word.substr(b[k], b[k + 1] - b[k]);
  out += word.substr(b[k + 2]);
  return out;
}

PerturbedUtterance apply_typo(const Utterance &u, std::uint64_t seed) {
  // Positions (in code points) of adjacent differing pairs, per token.
  std::vector<std::size_t> eligible;
  std::vector<std::vector<std::size_t>> pair_starts(u.tokens.size());
  std::vector<std::vector<std::size_t>> bounds(u.tokens.size());
  for (std::size_t t = 0; t < u.tokens.size(); ++t) {
    const std::string &s = u.tokens[t].surface;
    bounds[t] = utf8_boundaries(s);
    bounds[t].push_back(s.size());
    for (std::size_t k = 0; k + 2 < bounds[t].size(); ++k) {
      std::string_view a(s.data() + bounds[t][k], bounds[t][k + 1] - bounds[t][k]);
      std::string_view b(s.data() + bounds[t][k + 1],
                         bounds[t][k + 2] - bounds[t][k + 1]);
      if (a != b) pair_starts[t].push_back(k);
    }
    if (!pair_starts[t].empty()) eligible.push_back(t);
  }
  if (eligible.empty()) {
    return make_no_op(u, OperatorId::kTypo, seed, "no token with a swappable pair");
  }

  Rng rng(seed);
  const std::size_t t = eligible[rng.uniform_index(eligible.size())];
  const std::size_t k = pair_starts[t][rng.uniform_index(pair_starts[t].size())];
  const std::string &s = u.tokens[t].surface;
  std::string swapped = swap_adjacent(s, k);

  PerturbedUtterance out;
  out.base = u;
  out.base.tokens[t].surface = swapped;
  out.origin_id = u.id;
  out.op = OperatorId::kTypo;
  out.edit_site = t;
  out.inserted_or_replacement = swapped;
  out.replaced = s;
  out.seed = seed;
  out.detail["char_index"] = std::to_string(k);
  return out;
}

PerturbedUtterance apply_contraction(const Utterance &u,
                                     const ContractionTable &table) {
  const std::size_t n = u.tokens.size();
  for (std::size_t start = 0; start < n; ++start) {
    // Longest expanded match first, then a single contracted token.
    for (std::size_t len = std::min(table.longest_expansion(), n - start);
         len >= 1; --len) {
      std::vector<std::string> span;
      for (std::size_t i = start; i < start + len; ++i) {
        span.push_back(u.tokens[i].surface);
      }
      std::vector<std::string> replacement;
      std::string direction;
      if (const std::string *c = table.contract(span)) {
        replacement = {*c};
        direction = "contract";
      } else if (len == 1) {
        if (const auto *e = table.expand(span[0])) {
          replacement = *e;
          direction = "expand";
        }
      }
      if (replacement.empty()) continue;
      auto tags = inherit_tags(u, start, len, replacement.size());
      if (!tags) continue;  // would cross a chunk boundary

      replacement = match_case(std::move(replacement), span[0]);
      PerturbedUtterance out;
      out.base = u;
      auto first = out.base.tokens.begin() + static_cast<long>(start);
      out.base.tokens.erase(first, first + static_cast<long>(len));
      std::vector<Token> inserted;
      for (std::size_t i = 0; i < replacement.size(); ++i) {
        inserted.push_back(Token{replacement[i], (*tags)[i]});
      }
      out.base.tokens.insert(out.base.tokens.begin() + static_cast<long>(start),
                             inserted.begin(), inserted.end());
      out.origin_id = u.id;
      out.op = OperatorId::kContraction;
      out.edit_site = start;
      out.inserted_or_replacement = join(replacement, " ");
      out.replaced = join(span, " ");
      out.seed = 0;
      out.detail["direction"] = direction;
      return out;
    }
  }
  return make_no_op(u, OperatorId::kContraction, 0, "no legal contraction match");
}

PerturbedUtterance apply_punctuation(const Utterance &u) {
  if (u.tokens.empty()) {
    return make_no_op(u, OperatorId::kPunctuation, 0, "empty utterance");
  }
  const Token &last = u.tokens.back();
  const bool is_final_mark =
      last.surface == "." || last.surface == "?" || last.surface == "!";
  PerturbedUtterance out;
  out.base = u;
  out.origin_id = u.id;
  out.op = OperatorId::kPunctuation;
  if (is_final_mark) {
    if (last.slot_tag != "O") {
      return make_no_op(u, OperatorId::kPunctuation, 0,
                        "final punctuation is slot-tagged");
    }
    if (u.tokens.size() == 1) {
      return make_no_op(u, OperatorId::kPunctuation, 0,
                        "utterance is a lone punctuation mark");
    }
    out.base.tokens.pop_back();
    out.edit_site = u.tokens.size() - 1;
    out.replaced = last.surface;
    out.detail["direction"] = "remove";
  } else {
    out.base.tokens.push_back(Token{".", "O"});
    out.edit_site = u.tokens.size();
    out.inserted_or_replacement = ".";
    out.detail["direction"] = "add";
  }
  return out;
}

}  // namespace slotperturb
