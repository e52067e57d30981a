#include "slotperturb/tagger.h"

#include <array>

#include "slotperturb/errors.h"
#include "slotperturb/text.h"

namespace slotperturb {

namespace {

constexpr std::array<std::pair<std::string_view, CoarsePos>, 6> kPosNames = {{
    {"VERB", CoarsePos::kVerb},
    {"NOUN", CoarsePos::kNoun},
    {"ADJ", CoarsePos::kAdj},
    {"ADV", CoarsePos::kAdv},
    {"STOPWORD", CoarsePos::kStopword},
    {"OTHER", CoarsePos::kOther},
}};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string_view pos_name(CoarsePos pos) {
  for (const auto &[name, value] : kPosNames) {
    if (value == pos) return name;
  }
  return "OTHER";
}

std::optional<CoarsePos> parse_pos(std::string_view name) {
  for (const auto &[n, value] : kPosNames) {
    if (n == name) return value;
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, CoarsePos>>
PosLexicon::default_suffix_rules() {
  return {
      {"ly", CoarsePos::kAdv},  {"ing", CoarsePos::kVerb},
      {"ed", CoarsePos::kVerb}, {"ous", CoarsePos::kAdj},
      {"ful", CoarsePos::kAdj}, {"ive", CoarsePos::kAdj},
      {"al", CoarsePos::kAdj},
  };
}

bool PosLexicon::is_stopword(std::string_view word) const {
  return stopwords.contains(to_lower(word));
}

CoarsePos PosLexicon::tag_word(std::string_view word) const {
  std::string key = to_lower(word);
  if (stopwords.contains(key)) return CoarsePos::kStopword;
  if (auto it = entries.find(key); it != entries.end()) return it->second;
  if (!has_letter(key)) return CoarsePos::kOther;
  for (const auto &[suffix, pos] : suffix_rules) {
    if (ends_with(key, suffix)) return pos;
  }
  return CoarsePos::kNoun;
}

std::vector<CoarsePos> tag(std::span<const std::string> tokens,
                           const PosLexicon &lex) {
  std::vector<CoarsePos> out;
  out.reserve(tokens.size());
  for (const std::string &t : tokens) out.push_back(lex.tag_word(t));
  return out;
}

std::vector<CoarsePos> tag(const Utterance &u, const PosLexicon &lex) {
  std::vector<CoarsePos> out;
  out.reserve(u.tokens.size());
  for (const Token &t : u.tokens) out.push_back(lex.tag_word(t.surface));
  return out;
}

std::optional<std::size_t> first_verb_index(std::span<const CoarsePos> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == CoarsePos::kVerb) return i;
  }
  return std::nullopt;
}

PosLexicon parse_pos_lexicon(std::string_view text) {
  PosLexicon lex;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields = split(t, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      throw ParseError("expected word<TAB>POS", line_no);
    }
    auto pos = parse_pos(trim(fields[1]));
    if (!pos) throw ParseError("unknown POS '" + fields[1] + "'", line_no);
    std::string key = to_lower(fields[0]);
    auto [it, inserted] = lex.entries.try_emplace(key, *pos);
    if (!inserted && it->second != *pos) {
      lex.warnings.push_back("line " + std::to_string(line_no) + ": '" + key +
                             "' retagged " +
                             std::string(pos_name(it->second)) + " -> " +
                             std::string(pos_name(*pos)));
      it->second = *pos;
    }
  }
  return lex;
}

std::unordered_set<std::string> parse_stopwords(std::string_view text) {
  std::unordered_set<std::string> out;
  for (std::string_view line : split_lines(text)) {
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.insert(to_lower(t));
  }
  return out;
}

PosLexicon load_pos_lexicon(const std::string &lexicon_path) {
  return parse_pos_lexicon(read_file(lexicon_path));
}

PosLexicon load_pos_lexicon(const std::string &lexicon_path,
                            const std::string &stopword_path) {
  PosLexicon lex = load_pos_lexicon(lexicon_path);
  lex.stopwords = parse_stopwords(read_file(stopword_path));
  return lex;
}

ExternalTags ExternalTags::parse(std::string_view text) {
  ExternalTags out;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw ParseError("expected id<TAB>tags", line_no);
    }
    std::vector<CoarsePos> tags;
    for (const std::string &name : split_whitespace(line.substr(tab + 1))) {
      auto pos = parse_pos(name);
      if (!pos) throw ParseError("unknown POS '" + name + "'", line_no);
      tags.push_back(*pos);
    }
    std::string id(line.substr(0, tab));
    if (!out.by_id_.emplace(id, std::move(tags)).second) {
      throw ParseError("duplicate id " + id, line_no);
    }
  }
  return out;
}

ExternalTags ExternalTags::load(const std::string &path) {
  return parse(read_file(path));
}

std::optional<std::vector<CoarsePos>> ExternalTags::find(
    const Utterance &u) const {
  auto it = by_id_.find(u.id);
  if (it == by_id_.end() || it->second.size() != u.tokens.size()) {
    return std::nullopt;
  }
  return it->second;
}

}  // namespace slotperturb
