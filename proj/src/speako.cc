#include "slotperturb/speako.h"

#include <algorithm>
#include <array>
#include <limits>

#include "slotperturb/errors.h"
#include "slotperturb/rng.h"
#include "slotperturb/text.h"

namespace slotperturb {

namespace {

struct PhonemeInfo {
  std::string_view arpabet;
  std::string_view ipa;
};

constexpr std::array<PhonemeInfo, kPhonemeCount> kPhonemes = {{
    {"AA", "ɑ"},  {"AE", "æ"},  {"AH", "ʌ"},  {"AO", "ɔ"},  {"AW", "aʊ"},
    {"AY", "aɪ"}, {"B", "b"},   {"CH", "tʃ"}, {"D", "d"},   {"DH", "ð"},
    {"EH", "ɛ"},  {"ER", "ɝ"},  {"EY", "eɪ"}, {"F", "f"},   {"G", "ɡ"},
    {"HH", "h"},  {"IH", "ɪ"},  {"IY", "i"},  {"JH", "dʒ"}, {"K", "k"},
    {"L", "l"},   {"M", "m"},   {"N", "n"},   {"NG", "ŋ"},  {"OW", "oʊ"},
    {"OY", "ɔɪ"}, {"P", "p"},   {"R", "ɹ"},   {"S", "s"},   {"SH", "ʃ"},
    {"T", "t"},   {"TH", "θ"},  {"UH", "ʊ"},  {"UW", "u"},  {"V", "v"},
    {"W", "w"},   {"Y", "j"},   {"Z", "z"},   {"ZH", "ʒ"},
}};

struct G2pRule {
  std::string_view graphemes;
  std::string_view phonemes;
};

constexpr std::array<G2pRule, 3> kTrigraphs = {{
    {"tch", "CH"}, {"sch", "S K"}, {"igh", "AY"},
}};

constexpr std::array<G2pRule, 28> kDigraphs = {{
    {"ch", "CH"}, {"sh", "SH"}, {"th", "TH"}, {"ph", "F"},  {"wh", "W"},
    {"ck", "K"},  {"ng", "NG"}, {"qu", "K W"}, {"gh", "G"}, {"kn", "N"},
    {"wr", "R"},  {"ee", "IY"}, {"ea", "IY"}, {"oo", "UW"}, {"ou", "AW"},
    {"ow", "OW"}, {"ai", "EY"}, {"ay", "EY"}, {"oi", "OY"}, {"oy", "OY"},
    {"au", "AO"}, {"aw", "AO"}, {"ew", "UW"}, {"er", "ER"}, {"ar", "AA R"},
    {"or", "AO R"}, {"ir", "ER"}, {"ur", "ER"},
}};

constexpr std::array<std::string_view, 26> kLetters = {
    "AE", "B", "K", "D", "EH", "F", "G", "HH", "IH", "JH", "K", "L", "M",
    "N",  "AA", "P", "K", "R", "S", "T", "AH", "V", "W", "K S", "IY", "Z",
};

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

void append_symbols(std::string_view text, std::vector<Phoneme> &out) {
  for (const std::string &sym : split_whitespace(text)) {
    out.push_back(*parse_arpabet(sym));
  }
}

}  // namespace

std::string_view arpabet_symbol(Phoneme p) { return kPhonemes.at(p).arpabet; }

std::string_view ipa_symbol(Phoneme p) { return kPhonemes.at(p).ipa; }

std::optional<Phoneme> parse_arpabet(std::string_view symbol) {
  if (!symbol.empty() && symbol.back() >= '0' && symbol.back() <= '2') {
    symbol.remove_suffix(1);
  }
  for (std::size_t i = 0; i < kPhonemes.size(); ++i) {
    if (kPhonemes[i].arpabet == symbol) return static_cast<Phoneme>(i);
  }
  return std::nullopt;
}

std::string PhonemeSeq::arpabet() const {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i > 0) out += ' ';
    out += arpabet_symbol(symbols[i]);
  }
  return out;
}

std::string PhonemeSeq::ipa(std::string_view sep) const {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i > 0) out += sep;
    out += ipa_symbol(symbols[i]);
  }
  return out;
}

PhonemeSeq parse_pronunciation(std::string_view text) {
  PhonemeSeq seq;
  for (const std::string &sym : split_whitespace(text)) {
    auto p = parse_arpabet(sym);
    if (!p) throw ParseError("unknown phoneme symbol '" + sym + "'", 0);
    seq.symbols.push_back(*p);
  }
  return seq;
}

PhonemeSeq grapheme_to_phoneme(std::string_view word) {
  std::string w;
  for (char c : to_lower(word)) {
    if (c >= 'a' && c <= 'z') w.push_back(c);
  }
  PhonemeSeq seq;
  std::size_t i = 0;
  while (i < w.size()) {
    std::string_view rest = std::string_view(w).substr(i);
    bool matched = false;
    for (const G2pRule &r : kTrigraphs) {
      if (rest.starts_with(r.graphemes)) {
        append_symbols(r.phonemes, seq.symbols);
        i += 3;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (const G2pRule &r : kDigraphs) {
      if (rest.starts_with(r.graphemes)) {
        append_symbols(r.phonemes, seq.symbols);
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;

    const char c = w[i];
    const bool last = i + 1 == w.size();
    if (c == 'e' && last && w.size() > 2 && !is_vowel(w[i - 1])) break;
    if (c == 'y') {
      append_symbols(i == 0 ? "Y" : "IY", seq.symbols);
    } else {
      append_symbols(kLetters[static_cast<std::size_t>(c - 'a')], seq.symbols);
    }
    ++i;
    while (i < w.size() && w[i] == c) ++i;
  }
  return seq;
}

std::size_t phoneme_distance(const PhonemeSeq &a, const PhonemeSeq &b) {
  return *bounded_phoneme_distance(a, b,
                                   std::numeric_limits<std::size_t>::max());
}

std::optional<std::size_t> bounded_phoneme_distance(const PhonemeSeq &a,
                                                    const PhonemeSeq &b,
                                                    std::size_t limit) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if ((n > m ? n - m : m - n) > limit) return std::nullopt;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a.symbols[i - 1] == b.symbols[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      row_min = std::min(row_min, cur[j]);
    }
    // Every path to the final cell passes through this row.
    if (row_min > limit) return std::nullopt;
    std::swap(prev, cur);
  }
  if (prev[m] > limit) return std::nullopt;
  return prev[m];
}

// --- PhoneticLexicon ------------------------------------------------------

PhoneticLexicon PhoneticLexicon::from_entries(std::vector<LexiconEntry> entries,
                                              std::uint64_t min_frequency) {
  PhoneticLexicon lex;
  lex.min_frequency_ = min_frequency;
  for (LexiconEntry &e : entries) {
    e.word = to_lower(e.word);
    if (e.word.empty() || e.phonemes.empty() || e.frequency < min_frequency) {
      continue;
    }
    if (lex.index_.contains(e.word)) continue;
    lex.index_.emplace(e.word, 0);
    lex.entries_.push_back(std::move(e));
  }
  std::sort(lex.entries_.begin(), lex.entries_.end(),
            [](const LexiconEntry &x, const LexiconEntry &y) {
              return x.word < y.word;
            });
  for (std::uint32_t i = 0; i < lex.entries_.size(); ++i) {
    const LexiconEntry &e = lex.entries_[i];
    lex.index_[e.word] = i;
    if (lex.buckets_.size() <= e.phonemes.size()) {
      lex.buckets_.resize(e.phonemes.size() + 1);
    }
    lex.buckets_[e.phonemes.size()].push_back(i);
  }
  return lex;
}

PhoneticLexicon PhoneticLexicon::parse(std::string_view pronunciations,
                                       std::string_view counts,
                                       std::uint64_t min_frequency) {
  std::unordered_map<std::string, std::uint64_t> freq;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(counts)) {
    ++line_no;
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields = split(t, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      throw ParseError("counts: expected word<TAB>count", line_no);
    }
    std::uint64_t count = 0;
    try {
      std::size_t used = 0;
      count = std::stoull(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
      throw ParseError("counts: bad count '" + fields[1] + "'", line_no);
    }
    freq.try_emplace(to_lower(fields[0]), count);
  }

  std::vector<LexiconEntry> entries;
  line_no = 0;
  for (std::string_view line : split_lines(pronunciations)) {
    ++line_no;
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::size_t tab = t.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw ParseError("pronunciations: expected word<TAB>SYM SYM ...", line_no);
    }
    std::string word = to_lower(t.substr(0, tab));
    auto f = freq.find(word);
    if (f == freq.end()) continue;
    PhonemeSeq seq;
    try {
      seq = parse_pronunciation(t.substr(tab + 1));
    } catch (const ParseError &e) {
      throw ParseError(std::string("pronunciations: ") + e.what(), line_no);
    }
    entries.push_back(LexiconEntry{std::move(word), std::move(seq), f->second});
  }
  return from_entries(std::move(entries), min_frequency);
}

PhoneticLexicon PhoneticLexicon::load(const std::string &pronunciation_path,
                                      const std::string &counts_path,
                                      std::uint64_t min_frequency) {
  return parse(read_file(pronunciation_path), read_file(counts_path),
               min_frequency);
}

const LexiconEntry *PhoneticLexicon::find(std::string_view word) const {
  auto it = index_.find(to_lower(word));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::span<const std::uint32_t> PhoneticLexicon::bucket(std::size_t length) const {
  if (length >= buckets_.size()) return {};
  return buckets_[length];
}

PhonemeSeq to_phonemes(std::string_view word, const PhoneticLexicon &lex) {
  if (const LexiconEntry *e = lex.find(word)) return e->phonemes;
  return grapheme_to_phoneme(word);
}

SpeakoMatch nearest_speako(std::string_view word, const PhoneticLexicon &lex) {
  const std::string key = to_lower(word);
  const PhonemeSeq query = to_phonemes(word, lex);
  const LexiconEntry *best = nullptr;
  std::size_t best_distance = 0;

  auto better = [&](const LexiconEntry &e, std::size_t d) {
    if (!best) return true;
    if (d != best_distance) return d < best_distance;
    if (e.frequency != best->frequency) return e.frequency > best->frequency;
    return e.word < best->word;
  };
  auto scan = [&](std::size_t length) {
    for (std::uint32_t i : lex.bucket(length)) {
      const LexiconEntry &e = lex.entries()[i];
      if (e.word == key) continue;
      std::size_t limit =
          best ? best_distance : std::numeric_limits<std::size_t>::max();
      auto d = bounded_phoneme_distance(query, e.phonemes, limit);
      if (d && better(e, *d)) {
        best = &e;
        best_distance = *d;
      }
    }
  };

  // Buckets in order of increasing length gap; the gap is a lower bound on
  // the distance, so the search stops once it exceeds the best distance.
  const std::size_t q = query.size();
  const std::size_t max_gap = std::max(q, lex.max_length());
  for (std::size_t gap = 0; gap <= max_gap; ++gap) {
    if (best && gap > best_distance) break;
    if (gap <= q) scan(q - gap);
    if (gap > 0) scan(q + gap);
  }
  if (!best) {
    throw OperatorError("no speako candidate for '" + std::string(word) +
                        "': lexicon has no other entry");
  }
  return SpeakoMatch{best->word, best_distance, best->frequency};
}

SpeakoMatch SpeakoCache::nearest(std::string_view word) {
  std::string key = to_lower(word);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  SpeakoMatch match = nearest_speako(key, *lex_);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(std::move(key), match);
  return match;
}

PerturbedUtterance apply_speako(const Utterance &u, const PhoneticLexicon &lex,
                                std::uint64_t seed, SpeakoCache *cache) {
  if (cache && &cache->lexicon() != &lex) {
    throw OperatorError("speako cache built for a different lexicon");
  }
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < u.tokens.size(); ++i) {
    if (has_letter(u.tokens[i].surface)) eligible.push_back(i);
  }
  if (eligible.empty()) {
    return make_no_op(u, OperatorId::kSpeako, seed, "no token with a letter");
  }
  Rng rng(seed);
  const std::size_t idx = eligible[rng.uniform_index(eligible.size())];
  const std::string &original = u.tokens[idx].surface;
  SpeakoMatch match = cache ? cache->nearest(original) : nearest_speako(original, lex);

  PerturbedUtterance out;
  out.base = u;
  out.base.tokens[idx].surface = match.word;
  out.origin_id = u.id;
  out.op = OperatorId::kSpeako;
  out.edit_site = idx;
  out.inserted_or_replacement = match.word;
  out.replaced = original;
  out.seed = seed;
  out.detail["distance"] = std::to_string(match.distance);
  out.detail["from_ipa"] = to_phonemes(original, lex).ipa("");
  out.detail["to_ipa"] = to_phonemes(match.word, lex).ipa("");
  return out;
}

}  // namespace slotperturb
