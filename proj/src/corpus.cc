#include "slotperturb/corpus.h"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "slotperturb/errors.h"
#include "slotperturb/text.h"

namespace slotperturb {

std::vector<std::string> Utterance::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token &t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<std::string> Utterance::tags() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token &t : tokens) out.push_back(t.slot_tag);
  return out;
}

void Dataset::refresh_inventories() {
  intent_inventory.clear();
  slot_inventory.clear();
  for (const Utterance &u : utterances) {
    intent_inventory.insert(u.intent);
    for (const Token &t : u.tokens) {
      auto parsed = parse_tag(t.slot_tag);
      if (parsed && parsed->prefix != TagPrefix::kOutside) {
        slot_inventory.emplace(parsed->label);
      }
    }
  }
}

std::optional<ParsedTag> parse_tag(std::string_view tag) {
  if (tag == "O") return ParsedTag{};
  if (tag.size() < 3 || tag[1] != '-') return std::nullopt;
  std::string_view label = tag.substr(2);
  if (has_whitespace(label)) return std::nullopt;
  if (tag[0] == 'B') return ParsedTag{TagPrefix::kBegin, label};
  if (tag[0] == 'I') return ParsedTag{TagPrefix::kInside, label};
  return std::nullopt;
}

std::string_view bio_rule_name(BioRule rule) {
  switch (rule) {
    case BioRule::kEmptyUtterance: return "empty-utterance";
    case BioRule::kEmptySurface: return "empty-surface";
    case BioRule::kWhitespaceInSurface: return "whitespace-in-surface";
    case BioRule::kMalformedTag: return "malformed-tag";
    case BioRule::kDanglingInside: return "dangling-inside";
  }
  return "unknown";
}

std::string BioDiagnostic::to_string() const {
  std::string out = utterance_id + ":" + std::to_string(token_index) + ": " +
                    std::string(bio_rule_name(rule));
  if (!detail.empty()) out += " (" + detail + ")";
  return out;
}

std::vector<BioDiagnostic> validate_bio(const Utterance &u) {
  std::vector<BioDiagnostic> out;
  if (u.tokens.empty()) {
    out.push_back({u.id, 0, BioRule::kEmptyUtterance, ""});
    return out;
  }
  // Label of the chunk the previous token belongs to, if any.
  std::optional<std::string_view> open;
  for (std::size_t i = 0; i < u.tokens.size(); ++i) {
    const Token &t = u.tokens[i];
    if (t.surface.empty()) {
      out.push_back({u.id, i, BioRule::kEmptySurface, ""});
    } else if (has_whitespace(t.surface)) {
      out.push_back({u.id, i, BioRule::kWhitespaceInSurface, t.surface});
    }
    auto parsed = parse_tag(t.slot_tag);
    if (!parsed) {
      out.push_back({u.id, i, BioRule::kMalformedTag, t.slot_tag});
      open.reset();
      continue;
    }
    switch (parsed->prefix) {
      case TagPrefix::kOutside:
        open.reset();
        break;
      case TagPrefix::kBegin:
        open = parsed->label;
        break;
      case TagPrefix::kInside:
        if (!open || *open != parsed->label) {
          out.push_back({u.id, i, BioRule::kDanglingInside, t.slot_tag});
        }
        open = parsed->label;
        break;
    }
  }
  return out;
}

std::vector<SlotChunk> chunks(std::span<const std::string> tags) {
  std::vector<SlotChunk> out;
  std::optional<SlotChunk> current;
  auto close = [&](std::size_t end) {
    if (current) {
      current->end = end;
      out.push_back(std::move(*current));
      current.reset();
    }
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    auto parsed = parse_tag(tags[i]);
    if (parsed && parsed->prefix == TagPrefix::kInside && current &&
        current->label == parsed->label) {
      continue;
    }
    close(i);
    if (parsed && parsed->prefix == TagPrefix::kBegin) {
      current = SlotChunk{std::string(parsed->label), i, i};
    }
  }
  close(tags.size());
  return out;
}

std::vector<SlotChunk> chunks(const Utterance &u) {
  std::vector<std::string> tags = u.tags();
  return chunks(std::span<const std::string>(tags));
}

std::vector<std::string> repair_bio(std::span<const std::string> tags) {
  std::vector<std::string> out(tags.begin(), tags.end());
  std::optional<std::string> open;
  for (std::string &tag : out) {
    auto parsed = parse_tag(tag);
    if (!parsed || parsed->prefix == TagPrefix::kOutside) {
      open.reset();
      continue;
    }
    std::string label(parsed->label);
    if (parsed->prefix == TagPrefix::kInside && open != label) {
      tag = "B-" + label;
    }
    open = std::move(label);
  }
  return out;
}

namespace {

struct Header {
  std::string intent;
  std::string id;
};

Header parse_header(std::string_view line, std::size_t line_no) {
  std::string_view rest = line.substr(1);
  Header h;
  bool have_intent = false;
  bool have_id = false;
  for (const std::string &field : split_whitespace(rest)) {
    std::size_t eq = field.find('=');
    if (eq == std::string::npos) {
      throw ParseError("header field without '=': " + field, line_no);
    }
    std::string key = field.substr(0, eq);
    std::string value = field.substr(eq + 1);
    if (value.empty()) throw ParseError("empty value for " + key, line_no);
    if (key == "intent" && !have_intent) {
      h.intent = std::move(value);
      have_intent = true;
    } else if (key == "id" && !have_id) {
      h.id = std::move(value);
      have_id = true;
    } else {
      throw ParseError("unexpected header field: " + key, line_no);
    }
  }
  if (!have_intent) throw ParseError("header lacks intent=", line_no);
  if (!have_id) throw ParseError("header lacks id=", line_no);
  return h;
}

Token parse_token_line(std::string_view line, std::size_t line_no) {
  std::size_t tab = line.find('\t');
  if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
    throw ParseError("token line must be surface<TAB>tag", line_no);
  }
  std::string_view surface = line.substr(0, tab);
  std::string_view tag = line.substr(tab + 1);
  if (surface.empty()) throw ParseError("empty token surface", line_no);
  if (has_whitespace(surface)) {
    throw ParseError("whitespace in token surface", line_no);
  }
  if (!parse_tag(tag)) {
    throw ParseError("malformed slot tag '" + std::string(tag) + "'", line_no);
  }
  return Token{std::string(surface), std::string(tag)};
}

void check_dataset(const Dataset &d) {
  std::unordered_set<std::string> seen;
  for (const Utterance &u : d.utterances) {
    if (!seen.insert(u.id).second) {
      throw StructuralError("duplicate utterance id: " + u.id);
    }
  }
  std::string problems;
  for (const Utterance &u : d.utterances) {
    for (const BioDiagnostic &diag : validate_bio(u)) {
      if (!problems.empty()) problems += "; ";
      problems += diag.to_string();
    }
  }
  if (!problems.empty()) throw BioError("invalid BIO tagging: " + problems);
}

}  // namespace

Dataset parse_conll(std::string_view text, std::string name) {
  Dataset d;
  d.name = std::move(name);
  std::optional<Utterance> current;
  std::size_t header_line = 0;
  auto finish = [&]() {
    if (!current) return;
    if (current->tokens.empty()) {
      throw ParseError("utterance " + current->id + " has no tokens",
                       header_line);
    }
    d.utterances.push_back(std::move(*current));
    current.reset();
  };

  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) {
      finish();
      continue;
    }
    // Headers never contain a tab, so "#tag<TAB>O" is still a token line.
    if (line.front() == '#' && line.find('\t') == std::string_view::npos) {
      finish();
      Header h = parse_header(line, line_no);
      current = Utterance{std::move(h.id), {}, std::move(h.intent)};
      header_line = line_no;
      continue;
    }
    if (!current) throw ParseError("token line before any header", line_no);
    current->tokens.push_back(parse_token_line(line, line_no));
  }
  finish();
  check_dataset(d);
  d.refresh_inventories();
  return d;
}

std::string write_conll(const Dataset &d) {
  std::string out;
  for (const Utterance &u : d.utterances) {
    out += "# intent=" + u.intent + " id=" + u.id + "\n";
    for (const Token &t : u.tokens) {
      out += t.surface;
      out += '\t';
      out += t.slot_tag;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

Dataset load_conll(const std::string &path) {
  std::string stem = std::filesystem::path(path).stem().string();
  return parse_conll(read_file(path), stem);
}

Dataset import_two_column(std::string_view tag_text,
                          std::string_view intent_text, std::string name) {
  std::vector<std::string> intents;
  for (std::string_view line : split_lines(intent_text)) {
    std::string_view t = trim(line);
    if (!t.empty()) intents.emplace_back(t);
  }

  Dataset d;
  d.name = name;
  std::vector<Token> tokens;
  std::size_t line_no = 0;
  auto finish = [&]() {
    if (tokens.empty()) return;
    std::size_t index = d.utterances.size();
    if (index >= intents.size()) {
      throw StructuralError("intent file has fewer lines than utterances");
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05zu", index + 1);
    d.utterances.push_back(
        Utterance{name + "-" + buf, std::move(tokens), intents[index]});
    tokens.clear();
  };
  for (std::string_view line : split_lines(tag_text)) {
    ++line_no;
    std::vector<std::string> fields = split_whitespace(line);
    if (fields.empty()) {
      finish();
      continue;
    }
    if (fields.size() != 2) {
      throw ParseError("expected `token tag`", line_no);
    }
    if (!parse_tag(fields[1])) {
      throw ParseError("malformed slot tag '" + fields[1] + "'", line_no);
    }
    tokens.push_back(Token{fields[0], fields[1]});
  }
  finish();
  if (d.utterances.size() != intents.size()) {
    throw StructuralError("intent file has " + std::to_string(intents.size()) +
                          " labels for " + std::to_string(d.utterances.size()) +
                          " utterances");
  }
  check_dataset(d);
  d.refresh_inventories();
  return d;
}

Utterance parse_inline(std::string_view tagged, std::string intent,
                       std::string id) {
  Utterance u{std::move(id), {}, std::move(intent)};
  for (const std::string &piece : split_whitespace(tagged)) {
    std::size_t slash = piece.rfind('/');
    if (slash == std::string::npos || slash == 0) {
      throw ParseError("inline token without /tag: " + piece, 0);
    }
    u.tokens.push_back(Token{piece.substr(0, slash), piece.substr(slash + 1)});
  }
  if (auto diags = validate_bio(u); !diags.empty()) {
    throw BioError(diags.front().to_string());
  }
  return u;
}

PerturbedUtterance make_no_op(const Utterance &u, OperatorId op,
                              std::uint64_t seed, std::string reason) {
  PerturbedUtterance p;
  p.base = u;
  p.origin_id = u.id;
  p.op = op;
  p.seed = seed;
  p.no_op = true;
  p.no_op_reason = std::move(reason);
  return p;
}

EditShape diff_edit(const Utterance &origin, const Utterance &edited) {
  const auto &a = origin.tokens;
  const auto &b = edited.tokens;
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) {
    ++prefix;
  }
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  EditShape shape;
  shape.start = prefix;
  shape.removed = a.size() - prefix - suffix;
  shape.inserted = b.size() - prefix - suffix;
  if (shape.removed == 0 && shape.inserted == 0) {
    shape.kind = EditKind::kNone;
  } else if (shape.removed == 0) {
    shape.kind = EditKind::kInsertion;
  } else if (shape.inserted == 0) {
    shape.kind = EditKind::kDeletion;
  } else if (shape.removed == 1 && shape.inserted == 1) {
    shape.kind = EditKind::kReplacement;
  } else {
    shape.kind = EditKind::kRewrite;
  }
  return shape;
}

}  // namespace slotperturb
