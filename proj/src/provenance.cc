#include "slotperturb/provenance.h"

#include <json.hpp>

#include "slotperturb/errors.h"
#include "slotperturb/text.h"

namespace slotperturb {

using nlohmann::json;

ProvenanceRecord provenance_of(const PerturbedUtterance &p) {
  ProvenanceRecord r;
  r.id = p.base.id;
  r.origin_id = p.origin_id;
  r.op = p.op;
  r.edit_site = p.edit_site;
  r.inserted = p.inserted_or_replacement;
  r.replaced = p.replaced;
  r.seed = p.seed;
  r.no_op = p.no_op;
  r.no_op_reason = p.no_op_reason;
  r.detail = p.detail;
  return r;
}

std::string provenance_line(const ProvenanceRecord &r) {
  json j = {
      {"id", r.id},
      {"origin_id", r.origin_id},
      {"operator", std::string(operator_name(r.op))},
      {"edit_site", r.edit_site},
      {"inserted", r.inserted},
      {"replaced", r.replaced},
      {"seed", r.seed},
      {"no_op", r.no_op},
      {"no_op_reason", r.no_op_reason},
      {"detail", r.detail},
  };
  return j.dump();
}

std::string write_provenance(std::span<const PerturbedUtterance> records) {
  std::string out;
  for (const PerturbedUtterance &p : records) {
    out += provenance_line(provenance_of(p));
    out += '\n';
  }
  return out;
}

std::vector<ProvenanceRecord> parse_provenance(std::string_view text) {
  std::vector<ProvenanceRecord> out;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      ProvenanceRecord r;
      r.id = j.at("id").get<std::string>();
      r.origin_id = j.at("origin_id").get<std::string>();
      auto op = parse_operator(j.at("operator").get<std::string>());
      if (!op) throw ParseError("unknown operator", line_no);
      r.op = *op;
      r.edit_site = j.at("edit_site").get<std::size_t>();
      r.inserted = j.at("inserted").get<std::string>();
      r.replaced = j.at("replaced").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.no_op = j.at("no_op").get<bool>();
      r.no_op_reason = j.at("no_op_reason").get<std::string>();
      r.detail = j.at("detail").get<std::map<std::string, std::string>>();
      out.push_back(std::move(r));
    } catch (const json::exception &e) {
      throw ParseError(std::string("bad provenance record: ") + e.what(), line_no);
    }
  }
  return out;
}

std::string perturbed_id(std::string_view origin_id, OperatorId op) {
  std::string id(origin_id);
  id += '@';
  id += operator_name(op);
  return id;
}

Dataset to_dataset(std::span<const PerturbedUtterance> records, std::string name) {
  Dataset d;
  d.name = std::move(name);
  d.utterances.reserve(records.size());
  for (const PerturbedUtterance &p : records) d.utterances.push_back(p.base);
  d.refresh_inventories();
  return d;
}

}  // namespace slotperturb
