// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each check has a wall-clock budget that counts as part of
// the criterion.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "generators.h"
#include "oracles.h"
#include "slotperturb/errors.h"
#include "slotperturb/evalset.h"
#include "slotperturb/metrics.h"
#include "slotperturb/rng.h"
#include "slotperturb/speako.h"
#include "slotperturb/text.h"

using namespace slotperturb;
using namespace slotperturb::testing;
namespace fs = std::filesystem;

namespace {

const std::string kData = SLOTPERTURB_DATA_DIR;
const std::string kFixtures = kData + "/fixtures";

// Failure description, or nullopt on success.
using Outcome = std::optional<std::string>;

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

#define EXPECT(cond, msg)                                           \
  do {                                                              \
    if (!(cond)) {                                                  \
      std::ostringstream os_;                                       \
      os_ << msg;                                                   \
      return os_.str();                                             \
    }                                                               \
  } while (0)

const Resources &bundled() {
  static const Resources r = Resources::load(ResourcePaths::under(kData));
  return r;
}

std::string text(const Utterance &u) { return join(u.surfaces(), " "); }

// --- reference utterance ----------------------------------------------------

Outcome reference_fixture() {
  Dataset d = load_conll(kFixtures + "/reference.conll");
  EXPECT(d.size() == 1, "fixture should hold one utterance");
  const Utterance &u = d.utterances[0];
  auto ch = chunks(u);
  EXPECT(ch.size() == 2 && ch[0] == (SlotChunk{"music_item", 1, 2}) &&
             ch[1] == (SlotChunk{"playlist", 3, 5}),
         "unexpected fixture chunks");

  Resources res = bundled();
  res.provider = std::make_shared<DictionaryProvider>(
      DictionaryProvider::load(kFixtures + "/reference_synonyms.tsv"));
  res.set_phonetic(PhoneticLexicon::load(kFixtures + "/reference_pronunciations.tsv",
                                         kFixtures + "/reference_counts.tsv"));
  Resources vp = res;
  vp.filler_options.verb_phrase_mode = true;

  struct Row {
    OperatorId op;
    std::uint64_t seed;
    const Resources *res;
    std::optional<std::string> exact;
  };
  const std::vector<Row> rows = {
      {OperatorId::kBosFiller, 3, &res, "okay so add tune to sxsw fresh playlist"},
      {OperatorId::kPreVerbFiller, 0, &res, std::nullopt},
      {OperatorId::kPostVerbFiller, 8, &vp, std::nullopt},
      {OperatorId::kEosFiller, 1, &res, "add tune to sxsw fresh playlist if you can"},
      {OperatorId::kSynonymVerb, 0, &res, std::nullopt},
      {OperatorId::kSynonymAdj, 0, &res, std::nullopt},
      {OperatorId::kSynonymAdv, 0, &res, std::nullopt},
      {OperatorId::kSynonymAny, 2, &res, std::nullopt},
      {OperatorId::kSynonymStopword, 0, &res, std::nullopt},
      {OperatorId::kSpeako, 8, &res, "add tua to sxsw fresh playlist"},
  };
  const std::size_t verb = 0;
  for (const Row &row : rows) {
    PerturbedUtterance out = apply_operator(u, row.op, *row.res, row.seed);
    const std::string name(operator_name(row.op));
    EXPECT(!out.no_op, name << ": unexpected no-op (" << out.no_op_reason << ")");
    auto v = label_preservation_violation(u, out);
    EXPECT(!v, name << ": " << *v);
    if (row.exact) EXPECT(text(out.base) == *row.exact, name << ": got '" << text(out.base) << "'");
    EditShape e = diff_edit(u, out.base);
    switch (row.op) {
      case OperatorId::kBosFiller:
        EXPECT(e.kind == EditKind::kInsertion && e.start == 0, name << ": not at the start");
        break;
      case OperatorId::kPreVerbFiller:
        EXPECT(e.kind == EditKind::kInsertion && e.start == verb, name << ": not before the verb");
        break;
      case OperatorId::kPostVerbFiller:
        // Verb phrase "add tune": the filler lands between "tune" and "to".
        EXPECT(e.kind == EditKind::kInsertion && e.start == 2,
               name << ": not after the verb phrase: '" << text(out.base) << "'");
        break;
      case OperatorId::kEosFiller:
        EXPECT(e.kind == EditKind::kInsertion && e.start == u.size(), name << ": not at the end");
        break;
      case OperatorId::kSynonymVerb:
        EXPECT(out.edit_site == verb && out.inserted_or_replacement == "play",
               name << ": got '" << text(out.base) << "'");
        break;
      case OperatorId::kSynonymAdj:
        EXPECT(out.edit_site == 4 && out.inserted_or_replacement == "cool",
               name << ": got '" << text(out.base) << "'");
        break;
      case OperatorId::kSynonymAdv:
        // No adverb in the utterance: the noun fallback swaps the music item.
        EXPECT(out.edit_site == 1 && out.detail.at("fallback") == "noun",
               name << ": got '" << text(out.base) << "'");
        break;
      case OperatorId::kSynonymStopword:
        EXPECT(out.edit_site == 2 && out.inserted_or_replacement == "the",
               name << ": got '" << text(out.base) << "'");
        break;
      case OperatorId::kSpeako:
        EXPECT(out.edit_site == 1 && out.base.tokens[1].slot_tag == "B-music_item",
               name << ": wrong site or tag");
        break;
      default:
        EXPECT(e.kind == EditKind::kReplacement && e.removed == 1, name << ": not a single swap");
    }
    std::printf("    %-14s %s\n", name.c_str(), text(out.base).c_str());
  }
  return std::nullopt;
}

// --- label preservation -----------------------------------------------------

Outcome label_preservation() {
  Rng rng(20240101);
  std::size_t checked = 0, no_ops = 0;
  for (int i = 0; i < 10000; ++i) {
    Utterance u = random_utterance(rng, "gen-" + std::to_string(i));
    EXPECT(validate_bio(u).empty(), "generator produced invalid BIO for " << u.id);
    for (OperatorId op : kAllOperators) {
      PerturbedUtterance out =
          apply_operator(u, op, bundled(), derive_seed(99, i, static_cast<std::uint64_t>(op)));
      auto v = label_preservation_violation(u, out);
      EXPECT(!v, operator_name(op) << " on '" << text(u) << "': " << *v);
      ++checked;
      no_ops += out.no_op;
    }
  }
  std::printf("    %zu outputs checked, %zu flagged no-ops, 0 violations\n", checked, no_ops);
  return std::nullopt;
}

// --- metrics ----------------------------------------------------------------

Outcome metric_oracle() {
  Rng rng(31337);
  const std::vector<std::string> labels = {"artist", "album", "genre"};
  Dataset all;
  std::vector<Prediction> all_preds;
  for (int i = 0; i < 1000; ++i) {
    std::size_t len = 1 + rng.uniform_index(12);
    Utterance u;
    u.id = "p" + std::to_string(i);
    u.intent = "I" + std::to_string(rng.uniform_index(3));
    auto tags = random_tags(rng, len, labels, true);
    for (std::size_t k = 0; k < len; ++k) u.tokens.push_back({"w" + std::to_string(k), tags[k]});
    Prediction p{u.id, "I" + std::to_string(rng.uniform_index(3)),
                 rng.uniform_index(4) == 0 ? tags
                                           : random_tags(rng, len, labels, rng.uniform_index(2))};
    Dataset one;
    one.utterances = {u};
    std::vector<Prediction> pv = {p};
    ScoreReport r = score(one, pv);
    OracleScores o = oracle_scores(one.utterances, pv);
    EXPECT(r.tp == o.tp && r.fp == o.fp && r.fn == o.fn, "chunk counts differ on pair " << i);
    EXPECT(r.slot_precision == o.precision && r.slot_recall == o.recall && r.slot_f1 == o.f1,
           "slot scores differ on pair " << i);
    EXPECT(r.intent_accuracy == o.intent_accuracy && r.e2e_accuracy == o.e2e_accuracy &&
               r.slot_exact_match == o.exact_match,
           "accuracies differ on pair " << i);
    EXPECT(r.e2e_accuracy <= std::min(r.intent_accuracy, r.slot_exact_match),
           "e2e exceeds its bound on pair " << i);
    all.utterances.push_back(u);
    all_preds.push_back(p);
  }
  ScoreReport r = score(all, all_preds);
  OracleScores o = oracle_scores(all.utterances, all_preds);
  EXPECT(r.tp == o.tp && r.fp == o.fp && r.fn == o.fn && r.slot_f1 == o.f1 &&
             r.intent_accuracy == o.intent_accuracy && r.e2e_accuracy == o.e2e_accuracy,
         "corpus-level scores differ");
  EXPECT(r.e2e_accuracy <= std::min(r.intent_accuracy, r.slot_exact_match), "corpus e2e bound");
  std::printf("    corpus: F1 %.6f  intent %.4f  e2e %.4f (tp %zu fp %zu fn %zu)\n", r.slot_f1,
              r.intent_accuracy, r.e2e_accuracy, r.tp, r.fp, r.fn);
  return std::nullopt;
}

// --- speako -----------------------------------------------------------------

Outcome speako() {
  Rng rng(4242);
  auto random_seq = [&] {
    PhonemeSeq s;
    std::size_t n = rng.uniform_index(13);
    for (std::size_t k = 0; k < n; ++k) {
      s.symbols.push_back(static_cast<Phoneme>(rng.uniform_index(kPhonemeCount)));
    }
    return s;
  };
  for (int i = 0; i < 10000; ++i) {
    PhonemeSeq a = random_seq(), b = random_seq();
    std::size_t ref = oracle_levenshtein(a.symbols, b.symbols);
    EXPECT(phoneme_distance(a, b) == ref, "distance differs for '" << a.arpabet() << "' / '"
                                                                   << b.arpabet() << "'");
    auto bounded = bounded_phoneme_distance(a, b, 3);
    EXPECT(bounded == (ref <= 3 ? std::optional<std::size_t>(ref) : std::nullopt),
           "bounded distance differs for '" << a.arpabet() << "' / '" << b.arpabet() << "'");
  }
  PhoneticLexicon lex = PhoneticLexicon::load(kFixtures + "/reference_pronunciations.tsv",
                                              kFixtures + "/reference_counts.tsv");
  const LexiconEntry *watch = lex.find("watch");
  const LexiconEntry *which = lex.find("which");
  EXPECT(watch && which, "fixture lexicon lacks watch/which");
  EXPECT(phoneme_distance(watch->phonemes, which->phonemes) == 1, "watch/which distance != 1");
  SpeakoMatch m = nearest_speako("watch", lex);
  EXPECT(m.word == "which" && m.distance == 1, "watch -> " << m.word);
  std::printf("    10000 random pairs exact; watch /%s/ -> which /%s/, distance %zu\n",
              watch->phonemes.ipa("").c_str(), which->phonemes.ipa("").c_str(), m.distance);
  return std::nullopt;
}

// --- Hard builder -----------------------------------------------------------

Outcome hard_builder() {
  Dataset d = snips_like(100, 17, "hard");
  // Quantized to fifths so that ties are common.
  Rng rng(8);
  std::vector<std::vector<double>> v(d.size(), std::vector<double>(kSpokenGroup.size()));
  ConfidenceTable table;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t k = 0; k < kSpokenGroup.size(); ++k) {
      v[i][k] = static_cast<double>(rng.uniform_index(6)) / 5.0;
      table.set(d.utterances[i].id, kSpokenGroup[k], v[i][k]);
    }
  }
  HardSet h = build_hard_set(d, table, 5, bundled());
  std::map<OperatorId, std::size_t> counts;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    OperatorId expected = kSpokenGroup[oracle_argmin(v[i])];
    EXPECT(h.records[i].op == expected, d.utterances[i].id << ": chose "
                                                           << operator_name(h.records[i].op)
                                                           << ", argmin is "
                                                           << operator_name(expected));
    ++counts[expected];
    double lo = *std::min_element(v[i].begin(), v[i].end());
    ties += std::count(v[i].begin(), v[i].end(), lo) > 1;
  }
  EXPECT(ties > 0, "fixture has no ties");
  double sum = 0;
  for (const auto &row : h.composition.rows()) {
    EXPECT(row.count == counts[row.op], operator_name(row.op) << " count " << row.count
                                                              << " != " << counts[row.op]);
    EXPECT(std::abs(row.percent - 100.0 * static_cast<double>(counts[row.op]) / 100.0) < 1e-9,
           operator_name(row.op) << " percent");
    sum += row.tenths / 10.0;
  }
  EXPECT(std::abs(sum - 100.0) <= 0.1, "percentages sum to " << sum);
  std::printf("    100/100 argmin matches (%zu rows with ties); percentages sum to %.1f\n", ties,
              sum);
  return std::nullopt;
}

// --- Random builder ---------------------------------------------------------

std::string bytes_of(const std::vector<std::vector<PerturbedUtterance>> &reps) {
  std::string out;
  for (const auto &r : reps) out += write_conll(to_dataset(r, "r")) + write_provenance(r);
  return out;
}

Outcome random_builder() {
  Dataset d = snips_like(700, 23, "snips-eval");
  auto reps = build_random_set(d, 1234, 10, bundled(), kSpokenGroup, {1});
  std::map<OperatorId, double> counts;
  std::size_t draws = 0;
  for (const auto &r : reps) {
    for (const auto &p : r) {
      ++counts[p.op];
      ++draws;
    }
  }
  EXPECT(draws == 7000, "expected 7000 draws, got " << draws);
  const double expected = static_cast<double>(draws) / kSpokenGroup.size();
  double chi2 = 0;
  for (OperatorId op : kSpokenGroup) chi2 += std::pow(counts[op] - expected, 2) / expected;
  // 99th percentile of chi-square with 9 degrees of freedom.
  const double kCritical = 21.666;
  EXPECT(chi2 < kCritical, "chi-square " << chi2 << " >= " << kCritical);
  const std::string base = bytes_of(reps);
  for (unsigned w : {2u, 8u}) {
    EXPECT(bytes_of(build_random_set(d, 1234, 10, bundled(), kSpokenGroup, {w})) == base,
           "output differs at " << w << " workers");
  }
  EXPECT(bytes_of(build_random_set(d, 1234, 10, bundled(), kSpokenGroup, {1})) == base,
         "rerun differs");
  std::printf("    chi-square %.3f (df 9, critical %.3f); identical at 1/2/8 workers\n", chi2,
              kCritical);
  return std::nullopt;
}

// --- end to end -------------------------------------------------------------

Outcome end_to_end() {
  fs::path dir = fs::temp_directory_path() / ("slotperturb-e2e-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto write = [&](const std::string &name, const std::string &body) {
    std::string path = (dir / name).string();
    std::FILE *f = std::fopen(path.c_str(), "wb");
    std::fwrite(body.data(), 1, body.size(), f);
    std::fclose(f);
    return path;
  };

  Dataset train = snips_like(500, 1, "train");
  Dataset eval = snips_like(700, 2, "eval");
  std::string train_path = write("train.conll", write_conll(train));
  std::string eval_path = write("eval.conll", write_conll(eval));

  // perturb
  Dataset eval_in = load_conll(eval_path);
  auto eos = build_single_operator_set(eval_in, OperatorId::kEosFiller, 7, bundled());
  std::string eos_path = write("eval.eos_filler.conll", write_conll(to_dataset(eos, "eval")));
  write("eval.eos_filler.provenance.jsonl", write_provenance(eos));

  // predict
  Dataset train_in = load_conll(train_path);
  Dataset eos_in = load_conll(eos_path);
  std::string pred_orig = write("orig.pred.jsonl",
                                write_predictions(trivial_baseline_predict(train_in, eval_in)));
  std::string pred_eos = write("eos.pred.jsonl",
                               write_predictions(trivial_baseline_predict(train_in, eos_in)));

  // score
  std::vector<ScoreReport> reports = {
      score(eval_in, load_predictions(pred_orig), {}, "Original"),
      score(eos_in, load_predictions(pred_eos), {}, "EOS Filler")};
  std::string report = report_json(reports, nullptr);
  std::string table = report_text(reports, nullptr);
  fs::remove_all(dir);

  auto j = nlohmann::json::parse(report);
  EXPECT(j.is_object() && j.contains("sets") && j["sets"].is_array() && j["sets"].size() == 2,
         "report lacks two sets");
  for (const auto &s : j["sets"]) {
    EXPECT(s["name"].is_string(), "set without a name");
    for (const char *k : {"slot_precision", "slot_recall", "slot_f1", "intent_accuracy",
                          "e2e_accuracy", "slot_exact_match"}) {
      EXPECT(s.contains(k) && s[k].is_number() && s[k] >= 0.0 && s[k] <= 1.0,
             "field " << k << " missing or out of range");
    }
    for (const char *k : {"tp", "fp", "fn", "n_utterances"}) {
      EXPECT(s.contains(k) && s[k].is_number_unsigned(), "count " << k << " missing");
    }
    EXPECT(s["n_utterances"] == 700, "wrong utterance count");
    EXPECT(s["degenerate"].is_boolean(), "degenerate flag missing");
  }
  EXPECT(table.find("Set") == 0 && table.find("E2E Acc") != std::string::npos,
         "text report header");
  std::istringstream in(table);
  std::string line;
  while (std::getline(in, line)) std::printf("    %s\n", line.c_str());
  return std::nullopt;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"reference-utterance-fixture", 1.0, reference_fixture},
      {"label-preservation-10k-x-13", 60.0, label_preservation},
      {"metric-oracle-equivalence", 30.0, metric_oracle},
      {"speako-distance-and-selection", 60.0, speako},
      {"hard-builder-argmin-and-composition", 60.0, hard_builder},
      {"random-builder-uniformity-and-determinism", 120.0, random_builder},
      {"end-to-end-baseline-demo", 120.0, end_to_end},
  };
  // Resources are shared by several criteria; load them outside any budget.
  bundled();

  int failures = 0;
  for (const Criterion &c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome result;
    try {
      result = c.run();
    } catch (const std::exception &e) {
      result = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!result && secs > c.budget_seconds) {
      std::ostringstream os;
      os << "took " << secs << " s, budget " << c.budget_seconds << " s";
      result = os.str();
    }
    if (result) {
      ++failures;
      std::printf("FAIL %s (%.3f s): %s\n", c.name.c_str(), secs, result->c_str());
    } else {
      std::printf("PASS %s (%.3f s)\n", c.name.c_str(), secs);
    }
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
