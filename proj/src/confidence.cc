#include "slotperturb/confidence.h"

#include <cmath>

#include <json.hpp>

#include "slotperturb/errors.h"
#include "slotperturb/text.h"

namespace slotperturb {

using nlohmann::json;

void ConfidenceTable::set(std::string id, OperatorId op, double confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw ConfigError("confidence for (" + id + ", " +
                      std::string(operator_name(op)) + ") outside [0, 1]");
  }
  Key key{std::move(id), op};
  if (scores_.contains(key)) {
    throw ConfigError("duplicate confidence for (" + key.first + ", " +
                      std::string(operator_name(op)) + ")");
  }
  scores_.emplace(std::move(key), confidence);
}

std::optional<double> ConfidenceTable::find(std::string_view id,
                                            OperatorId op) const {
  auto it = scores_.find(Key{std::string(id), op});
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

std::vector<ConfidenceTable::Key> ConfidenceTable::missing(
    const Dataset &d, std::span<const OperatorId> ops) const {
  std::vector<Key> gaps;
  for (const Utterance &u : d.utterances) {
    for (OperatorId op : ops) {
      if (!find(u.id, op)) gaps.emplace_back(u.id, op);
    }
  }
  return gaps;
}

ConfidenceTable ConfidenceTable::parse(std::string_view jsonl) {
  ConfidenceTable table;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(jsonl)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      std::string name = j.at("operator").get<std::string>();
      auto op = parse_operator(name);
      if (!op) throw ParseError("unknown operator '" + name + "'", line_no);
      const json &c = j.at("confidence");
      if (!c.is_number()) throw ParseError("confidence is not a number", line_no);
      table.set(j.at("id").get<std::string>(), *op, c.get<double>());
    } catch (const json::exception &e) {
      throw ParseError(std::string("bad confidence record: ") + e.what(), line_no);
    } catch (const ConfigError &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return table;
}

ConfidenceTable ConfidenceTable::load(const std::string &path) {
  return parse(read_file(path));
}

std::string ConfidenceTable::to_jsonl() const {
  std::string out;
  for (const auto &[key, value] : scores_) {
    json j = {{"id", key.first},
              {"operator", std::string(operator_name(key.second))},
              {"confidence", value}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace slotperturb
