#include "slotperturb/metrics.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "slotperturb/errors.h"
#include "slotperturb/text.h"

namespace slotperturb {

using nlohmann::json;

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string list_ids(const std::vector<std::string> &ids) {
  constexpr std::size_t kShown = 20;
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > kShown) {
    out += ", ... (" + std::to_string(ids.size() - kShown) + " more)";
  }
  return out;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string percent_pm(double mean, double variance) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f±%.2f", 100.0 * mean, 1e4 * variance);
  return buf;
}

}  // namespace

// --- Prediction files -----------------------------------------------------

std::vector<Prediction> parse_predictions(std::string_view jsonl) {
  std::vector<Prediction> out;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(jsonl)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      Prediction p;
      p.utterance_id = j.at("id").get<std::string>();
      p.intent = j.at("intent").get<std::string>();
      p.slot_tags = j.at("slots").get<std::vector<std::string>>();
      out.push_back(std::move(p));
    } catch (const json::exception &e) {
      throw ParseError(std::string("bad prediction record: ") + e.what(), line_no);
    }
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::string &path) {
  return parse_predictions(read_file(path));
}

std::string write_predictions(std::span<const Prediction> preds) {
  std::string out;
  for (const Prediction &p : preds) {
    json j = {{"id", p.utterance_id}, {"intent", p.intent}, {"slots", p.slot_tags}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<const Prediction *> join(const Dataset &gold,
                                     std::span<const Prediction> preds) {
  std::unordered_map<std::string, const Prediction *> by_id;
  std::vector<std::string> duplicated;
  for (const Prediction &p : preds) {
    if (!by_id.emplace(p.utterance_id, &p).second) {
      duplicated.push_back(p.utterance_id);
    }
  }
  std::vector<const Prediction *> out;
  std::vector<std::string> missing, misaligned;
  std::set<std::string> gold_ids;
  for (const Utterance &u : gold.utterances) {
    gold_ids.insert(u.id);
    auto it = by_id.find(u.id);
    if (it == by_id.end()) {
      missing.push_back(u.id);
      continue;
    }
    if (it->second->slot_tags.size() != u.tokens.size()) {
      misaligned.push_back(u.id + " (" + std::to_string(it->second->slot_tags.size()) +
                           " tags for " + std::to_string(u.tokens.size()) + " tokens)");
    }
    out.push_back(it->second);
  }
  std::vector<std::string> extra;
  for (const Prediction &p : preds) {
    if (!gold_ids.contains(p.utterance_id)) extra.push_back(p.utterance_id);
  }
  if (missing.empty() && extra.empty() && duplicated.empty() && misaligned.empty()) {
    return out;
  }
  std::string msg = "predictions do not match gold '" + gold.name + "'";
  if (!missing.empty()) msg += "; missing: " + list_ids(missing);
  if (!extra.empty()) msg += "; extra: " + list_ids(extra);
  if (!duplicated.empty()) msg += "; duplicated: " + list_ids(duplicated);
  if (!misaligned.empty()) msg += "; length mismatch: " + list_ids(misaligned);
  throw JoinError(msg);
}

// --- Metrics --------------------------------------------------------------

SlotScore slot_f1(const Dataset &gold, std::span<const Prediction> preds,
                  ScoreOptions options) {
  std::vector<const Prediction *> joined = join(gold, preds);
  SlotScore s;
  for (std::size_t i = 0; i < joined.size(); ++i) {
    std::vector<SlotChunk> g = chunks(gold.utterances[i]);
    std::vector<SlotChunk> p =
        options.repair_predictions
            ? chunks(std::span<const std::string>(repair_bio(joined[i]->slot_tags)))
            : chunks(joined[i]->slot_tags);
    // Both lists are in position order and disjoint, so a merge on
    // (start, end) counts the matches.
    std::size_t a = 0, b = 0, matched = 0;
    while (a < g.size() && b < p.size()) {
      if (g[a] == p[b]) {
        ++matched;
        ++a;
        ++b;
      } else if (std::tie(g[a].start, g[a].end) < std::tie(p[b].start, p[b].end)) {
        ++a;
      } else {
        ++b;
      }
    }
    s.counts.tp += matched;
    s.counts.fp += p.size() - matched;
    s.counts.fn += g.size() - matched;
  }
  const std::size_t predicted = s.counts.tp + s.counts.fp;
  const std::size_t actual = s.counts.tp + s.counts.fn;
  s.degenerate = predicted == 0 || actual == 0;
  s.precision = ratio(s.counts.tp, predicted);
  s.recall = ratio(s.counts.tp, actual);
  s.f1 = (s.precision + s.recall) == 0.0
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

double intent_accuracy(const Dataset &gold, std::span<const Prediction> preds) {
  std::vector<const Prediction *> joined = join(gold, preds);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < joined.size(); ++i) {
    if (joined[i]->intent == gold.utterances[i].intent) ++hits;
  }
  return ratio(hits, joined.size());
}

double slot_exact_match(const Dataset &gold, std::span<const Prediction> preds) {
  std::vector<const Prediction *> joined = join(gold, preds);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < joined.size(); ++i) {
    if (joined[i]->slot_tags == gold.utterances[i].tags()) ++hits;
  }
  return ratio(hits, joined.size());
}

double e2e_accuracy(const Dataset &gold, std::span<const Prediction> preds) {
  std::vector<const Prediction *> joined = join(gold, preds);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < joined.size(); ++i) {
    const Utterance &u = gold.utterances[i];
    if (joined[i]->intent == u.intent && joined[i]->slot_tags == u.tags()) ++hits;
  }
  return ratio(hits, joined.size());
}

std::vector<std::pair<std::string, double>> ScoreReport::numeric_fields() const {
  return {
      {"slot_precision", slot_precision},
      {"slot_recall", slot_recall},
      {"slot_f1", slot_f1},
      {"intent_accuracy", intent_accuracy},
      {"e2e_accuracy", e2e_accuracy},
      {"slot_exact_match", slot_exact_match},
      {"tp", static_cast<double>(tp)},
      {"fp", static_cast<double>(fp)},
      {"fn", static_cast<double>(fn)},
      {"n_utterances", static_cast<double>(n_utterances)},
  };
}

ScoreReport score(const Dataset &gold, std::span<const Prediction> preds,
                  ScoreOptions options, std::string name) {
  ScoreReport r;
  r.name = name.empty() ? gold.name : std::move(name);
  SlotScore s = slot_f1(gold, preds, options);
  r.slot_precision = s.precision;
  r.slot_recall = s.recall;
  r.slot_f1 = s.f1;
  r.tp = s.counts.tp;
  r.fp = s.counts.fp;
  r.fn = s.counts.fn;
  r.degenerate = s.degenerate;
  r.intent_accuracy = intent_accuracy(gold, preds);
  r.e2e_accuracy = e2e_accuracy(gold, preds);
  r.slot_exact_match = slot_exact_match(gold, preds);
  r.n_utterances = gold.utterances.size();
  return r;
}

// --- Aggregation ------------------------------------------------------------

const FieldStats *AggregateReport::find(std::string_view field) const {
  for (const FieldStats &f : fields) {
    if (f.field == field) return &f;
  }
  return nullptr;
}

AggregateReport aggregate(std::span<const ScoreReport> reports) {
  if (reports.empty()) throw ConfigError("cannot aggregate zero score reports");
  AggregateReport agg;
  agg.n_reports = reports.size();
  const double n = static_cast<double>(reports.size());
  std::vector<std::vector<std::pair<std::string, double>>> rows;
  for (const ScoreReport &r : reports) rows.push_back(r.numeric_fields());
  for (std::size_t f = 0; f < rows[0].size(); ++f) {
    FieldStats st;
    st.field = rows[0][f].first;
    double sum = 0.0;
    for (const auto &row : rows) sum += row[f].second;
    st.mean = sum / n;
    double sq = 0.0;
    for (const auto &row : rows) {
      const double d = row[f].second - st.mean;
      sq += d * d;
    }
    st.variance = sq / n;
    agg.fields.push_back(std::move(st));
  }
  return agg;
}

std::string report_json(std::span<const ScoreReport> reports,
                        const AggregateReport *agg) {
  json sets = json::array();
  for (const ScoreReport &r : reports) {
    json j = {{"name", r.name},
              {"slot_precision", r.slot_precision},
              {"slot_recall", r.slot_recall},
              {"slot_f1", r.slot_f1},
              {"intent_accuracy", r.intent_accuracy},
              {"e2e_accuracy", r.e2e_accuracy},
              {"slot_exact_match", r.slot_exact_match},
              {"tp", r.tp},
              {"fp", r.fp},
              {"fn", r.fn},
              {"n_utterances", r.n_utterances},
              {"degenerate", r.degenerate}};
    sets.push_back(std::move(j));
  }
  json out = {{"sets", std::move(sets)}};
  if (agg) {
    json a = {{"n_reports", agg->n_reports}};
    for (const FieldStats &f : agg->fields) {
      a[f.field] = {{"mean", f.mean}, {"variance", f.variance}};
    }
    out["aggregate"] = std::move(a);
  }
  return out.dump(2) + "\n";
}

std::string report_text(std::span<const ScoreReport> reports,
                        const AggregateReport *agg) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Set", "Slot F1", "Intent Acc", "E2E Acc"});
  for (const ScoreReport &r : reports) {
    rows.push_back({r.name, percent(r.slot_f1), percent(r.intent_accuracy),
                    percent(r.e2e_accuracy)});
  }
  if (agg) {
    auto cell = [&](std::string_view field) {
      const FieldStats *f = agg->find(field);
      return percent_pm(f->mean, f->variance);
    };
    rows.push_back({"mean±var (n=" + std::to_string(agg->n_reports) + ")",
                    cell("slot_f1"), cell("intent_accuracy"), cell("e2e_accuracy")});
  }
  // Column widths count code points, so "±" takes one column.
  auto width = [](const std::string &s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80;
    return w;
  };
  std::vector<std::size_t> widths(4, 0);
  for (const auto &row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], width(row[c]));
    }
  }
  std::string out;
  for (const auto &row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(widths[c] - width(row[c]), ' ');
      if (c == 0) {
        line += row[c] + pad;
      } else {
        line += "  " + pad + row[c];
      }
    }
    out += line + "\n";
  }
  return out;
}

// --- Memorization baseline ------------------------------------------------

BaselineModel BaselineModel::train(const Dataset &train) {
  if (train.utterances.empty()) {
    throw ConfigError("baseline needs a non-empty training set");
  }
  std::map<std::string, std::size_t> intents;
  std::unordered_map<std::string, std::map<std::string, std::size_t>> tags;
  for (const Utterance &u : train.utterances) {
    ++intents[u.intent];
    for (const Token &t : u.tokens) ++tags[t.surface][t.slot_tag];
  }
  // std::map iterates in lexicographic order; strict > keeps the first on ties.
  auto most_frequent = [](const std::map<std::string, std::size_t> &counts) {
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    return best->first;
  };
  BaselineModel m;
  m.intent_ = most_frequent(intents);
  for (const auto &[surface, counts] : tags) m.tag_of_[surface] = most_frequent(counts);
  return m;
}

Prediction BaselineModel::predict(const Utterance &u) const {
  Prediction p;
  p.utterance_id = u.id;
  p.intent = intent_;
  for (const Token &t : u.tokens) {
    auto it = tag_of_.find(t.surface);
    p.slot_tags.push_back(it == tag_of_.end() ? "O" : it->second);
  }
  return p;
}

double BaselineModel::hit_rate(const Utterance &u) const {
  std::size_t seen = 0;
  for (const Token &t : u.tokens) seen += tag_of_.contains(t.surface);
  return ratio(seen, u.tokens.size());
}

std::vector<Prediction> trivial_baseline_predict(const Dataset &train,
                                                 const Dataset &eval) {
  BaselineModel m = BaselineModel::train(train);
  std::vector<Prediction> out;
  out.reserve(eval.utterances.size());
  for (const Utterance &u : eval.utterances) out.push_back(m.predict(u));
  return out;
}

}  // namespace slotperturb
