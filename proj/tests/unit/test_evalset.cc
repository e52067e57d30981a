#include <doctest.h>

#include <atomic>
#include <fstream>
#include <stdexcept>
#include <json.hpp>

#include "generators.h"
#include "oracles.h"
#include "slotperturb/errors.h"
#include "slotperturb/evalset.h"
#include "slotperturb/rng.h"

using namespace slotperturb;
using namespace slotperturb::testing;

namespace {

const std::string kData = SLOTPERTURB_DATA_DIR;

const Resources &resources() {
  static const Resources r = Resources::load(ResourcePaths::under(kData));
  return r;
}

ConfidenceTable table_from(const Dataset &d, std::span<const OperatorId> group,
                           const std::function<double(std::size_t, std::size_t)> &f) {
  ConfidenceTable t;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t k = 0; k < group.size(); ++k) t.set(d.utterances[i].id, group[k], f(i, k));
  }
  return t;
}

std::string serialized_set(const std::vector<PerturbedUtterance> &v) {
  return write_conll(to_dataset(v, "s")) + write_provenance(v);
}

}  // namespace

TEST_CASE("resource paths: bundled names, missing files named") {
  ResourcePaths p = ResourcePaths::under(kData);
  CHECK_NOTHROW(p.validate());
  p.pronunciations = kData + "/no-such-file.tsv";
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError &e) {
    CHECK(std::string(e.what()).find("no-such-file.tsv") != std::string::npos);
  }
}

TEST_CASE("single-operator EOS set over 700 utterances") {
  Dataset d = snips_like(700, 11, "snips");
  auto out = build_single_operator_set(d, OperatorId::kEosFiller, 42, resources());
  REQUIRE(out.size() == 700);
  std::size_t no_ops = 0, edited = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Utterance &u = d.utterances[i];
    CHECK(out[i].origin_id == u.id);
    CHECK(out[i].base.id == u.id + "@eos_filler");
    CHECK(out[i].op == OperatorId::kEosFiller);
    CHECK(out[i].seed == derive_seed(42, i, 2));
    CHECK_FALSE(label_preservation_violation(u, out[i]));
    no_ops += out[i].no_op;
    edited += diff_edit(u, out[i].base).kind != EditKind::kNone;
    CHECK(out[i].edit_site == u.size());
  }
  CHECK(no_ops == 0);
  CHECK(edited == out.size() - no_ops);
  auto comp = CompositionReport::from_records(std::span<const PerturbedUtterance>(out),
                                              kSpokenGroup);
  CHECK(comp.find(OperatorId::kEosFiller)->tenths == 1000);
}

TEST_CASE("empty dataset gives empty sets") {
  Dataset empty;
  CHECK(build_single_operator_set(empty, OperatorId::kTypo, 1, resources()).empty());
  auto rnd = build_random_set(empty, 1, 3, resources());
  CHECK(rnd.size() == 3);
  CHECK(rnd[0].empty());
  HardSet h = build_hard_set(empty, ConfidenceTable{}, 1, resources());
  CHECK(h.records.empty());
  CHECK(h.composition.total() == 0);
}

TEST_CASE("edited count equals size minus no-ops for every operator") {
  Dataset d = snips_like(120, 3, "s");
  for (OperatorId op : kAllOperators) {
    auto out = build_single_operator_set(d, op, 9, resources());
    std::size_t no_ops = 0, edited = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      no_ops += out[i].no_op;
      edited += diff_edit(d.utterances[i], out[i].base).kind != EditKind::kNone;
      auto v = label_preservation_violation(d.utterances[i], out[i]);
      CHECK_MESSAGE(!v, operator_name(op), ": ", v.value_or(""));
    }
    CHECK_MESSAGE(edited == out.size() - no_ops, operator_name(op));
  }
}

TEST_CASE("random set: one replicate over a one-operator group equals the single set") {
  Dataset d = snips_like(80, 5, "s");
  std::vector<OperatorId> group = {OperatorId::kSpeako};
  auto rnd = build_random_set(d, 77, 1, resources(), group);
  auto single = build_single_operator_set(d, OperatorId::kSpeako, 77, resources());
  REQUIRE(rnd.size() == 1);
  CHECK(serialized_set(rnd[0]) == serialized_set(single));
}

TEST_CASE("random set: replicates differ and use seed ^ r") {
  Dataset d = snips_like(50, 5, "s");
  auto rnd = build_random_set(d, 1000, 3, resources());
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(rnd[r][i].op == random_choice(1000 ^ r, i, kSpokenGroup));
      CHECK(rnd[r][i].seed == derive_seed(1000 ^ r, i, 2));
    }
  }
  CHECK(serialized_set(rnd[0]) != serialized_set(rnd[1]));
  CHECK_THROWS_AS(build_random_set(d, 1, 0, resources()), ConfigError);
  CHECK_THROWS_AS(build_random_set(d, 1, 1, resources(), std::span<const OperatorId>{}),
                  ConfigError);
}

TEST_CASE("random_choice covers the group uniformly") {
  std::map<OperatorId, int> n;
  for (std::size_t i = 0; i < 20000; ++i) ++n[random_choice(3, i, kSpokenGroup)];
  REQUIRE(n.size() == 10);
  for (const auto &[op, c] : n) {
    CHECK(c > 1800);
    CHECK(c < 2200);
  }
}

TEST_CASE("worker count does not change any output") {
  Dataset d = snips_like(150, 21, "s");
  std::string one = serialized_set(build_random_set(d, 5, 2, resources())[1]);
  for (unsigned w : {2u, 8u}) {
    CHECK(serialized_set(build_random_set(d, 5, 2, resources(), kSpokenGroup, {w})[1]) == one);
  }
  auto t = table_from(d, kSpokenGroup, [](std::size_t i, std::size_t k) {
    return static_cast<double>((i * 7 + k * 3) % 10) / 10.0;
  });
  std::string h1 = serialized_set(build_hard_set(d, t, 8, resources()).records);
  CHECK(serialized_set(build_hard_set(d, t, 8, resources(), kSpokenGroup, {4}).records) == h1);
}

TEST_CASE("hard choice: hand-worked argmin over five utterances") {
  Dataset d = snips_like(5, 1, "h");
  std::vector<OperatorId> g = {OperatorId::kBosFiller, OperatorId::kEosFiller,
                               OperatorId::kSynonymAdj, OperatorId::kSpeako};
  const double values[5][4] = {{0.9, 0.2, 0.5, 0.3},
                               {0.1, 0.1, 0.1, 0.1},
                               {0.8, 0.7, 0.6, 0.5},
                               {0.5, 0.4, 0.4, 0.9},
                               {0.0, 1.0, 1.0, 1.0}};
  const OperatorId expected[5] = {OperatorId::kEosFiller, OperatorId::kBosFiller,
                                  OperatorId::kSpeako, OperatorId::kEosFiller,
                                  OperatorId::kBosFiller};
  ConfidenceTable t = table_from(d, g, [&](std::size_t i, std::size_t k) { return values[i][k]; });
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(hard_choice(t, d.utterances[i].id, g) == expected[i]);
    std::vector<double> row(values[i], values[i] + 4);
    CHECK(g[oracle_argmin(row)] == expected[i]);
  }
  HardSet h = build_hard_set(d, t, 3, resources(), g);
  CHECK(h.composition.find(OperatorId::kEosFiller)->count == 2);
  CHECK(h.composition.find(OperatorId::kBosFiller)->count == 2);
  CHECK(h.composition.find(OperatorId::kSpeako)->count == 1);
  CHECK(h.composition.find(OperatorId::kSynonymAdj)->count == 0);
  CHECK(h.composition.find(OperatorId::kEosFiller)->tenths == 400);
}

TEST_CASE("hard set: table minimal everywhere on one operator") {
  Dataset d = snips_like(60, 2, "h");
  auto t = table_from(d, kSpokenGroup, [](std::size_t, std::size_t k) {
    return kSpokenGroup[k] == OperatorId::kSynonymAdj ? 0.01 : 0.9;
  });
  HardSet h = build_hard_set(d, t, 4, resources());
  CHECK(h.composition.find(OperatorId::kSynonymAdj)->tenths == 1000);
  for (const auto &r : h.records) CHECK(r.op == OperatorId::kSynonymAdj);
  // The applied edit is the one the single-operator set makes with the same seed.
  auto single = build_single_operator_set(d, OperatorId::kSynonymAdj, 4, resources());
  CHECK(serialized_set(h.records) == serialized_set(single));
}

TEST_CASE("hard choice is invariant to monotone rescaling") {
  Dataset d = snips_like(40, 6, "h");
  Rng rng(12);
  std::vector<std::vector<double>> v(d.size(), std::vector<double>(10));
  for (auto &row : v) {
    for (double &x : row) x = static_cast<double>(rng.uniform_index(5)) / 4.0;
  }
  auto a = table_from(d, kSpokenGroup, [&](std::size_t i, std::size_t k) { return v[i][k]; });
  auto b = table_from(d, kSpokenGroup,
                      [&](std::size_t i, std::size_t k) { return 0.5 * v[i][k] * v[i][k]; });
  for (const auto &u : d.utterances) {
    CHECK(hard_choice(a, u.id, kSpokenGroup) == hard_choice(b, u.id, kSpokenGroup));
  }
}

TEST_CASE("hard set: missing pairs are listed") {
  Dataset d = snips_like(3, 1, "h");
  auto t = table_from(d, kBaselineGroup, [](std::size_t, std::size_t) { return 0.5; });
  try {
    build_hard_set(d, t, 1, resources(), kSpokenGroup);
    FAIL("expected ConfigError");
  } catch (const ConfigError &e) {
    std::string m = e.what();
    CHECK(m.find("30 ") != std::string::npos);
    CHECK(m.find("(h-00002, speako)") != std::string::npos);
  }
}

TEST_CASE("composition: largest remainder sums to exactly 100") {
  std::vector<ProvenanceRecord> recs(3);
  recs[0].op = OperatorId::kBosFiller;
  recs[1].op = OperatorId::kEosFiller;
  recs[2].op = OperatorId::kSpeako;
  std::vector<OperatorId> g = {OperatorId::kBosFiller, OperatorId::kEosFiller,
                               OperatorId::kSpeako};
  auto c = CompositionReport::from_records(recs, g);
  CHECK(c.rows()[0].tenths == 334);
  CHECK(c.rows()[1].tenths == 333);
  CHECK(c.rows()[2].tenths == 333);
  CHECK(c.rows()[0].percent == doctest::Approx(100.0 / 3));

  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ProvenanceRecord> rs(1 + rng.uniform_index(997));
    for (auto &r : rs) r.op = kSpokenGroup[rng.uniform_index(10)];
    auto comp = CompositionReport::from_records(rs, kSpokenGroup);
    int sum = 0;
    for (const auto &row : comp.rows()) {
      sum += row.tenths;
      CHECK(std::abs(row.tenths / 10.0 - row.percent) < 0.1 + 1e-9);
    }
    CHECK(sum == 1000);
  }
}

TEST_CASE("composition text and JSON") {
  std::vector<ProvenanceRecord> recs(10);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].op = i < 7 ? OperatorId::kEosFiller : OperatorId::kSynonymAny;
  }
  auto c = CompositionReport::from_records(recs, kSpokenGroup);
  std::string text = c.to_text();
  CHECK(text.find("EOS Filler") != std::string::npos);
  std::istringstream in(text);
  std::string line;
  std::size_t lines = 0, width = 0;
  while (std::getline(in, line)) {
    ++lines;
    if (width == 0) width = line.size();
    CHECK(line.size() == width);
    if (line.rfind("EOS Filler", 0) == 0) CHECK(line.ends_with(" 70.0"));
  }
  CHECK(lines == 10);
  auto j = nlohmann::json::parse(c.to_json());
  CHECK(j["total"] == 10);
  REQUIRE(j["operators"].size() == 10);
  CHECK(j["operators"][3]["operator"] == "eos_filler");
  CHECK(j["operators"][3]["label"] == "EOS Filler");
  CHECK(j["operators"][3]["count"] == 7);
  CHECK(j["operators"][3]["percent"].get<double>() == doctest::Approx(70.0));
}

TEST_CASE("parallel_for runs every index once and rethrows the lowest failure") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 8, [&](std::size_t i) { ++hits[i]; });
  for (auto &h : hits) CHECK(h.load() == 1);
  try {
    parallel_for(200, 4, [](std::size_t i) {
      if (i == 17 || i == 150) throw std::runtime_error("boom " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error &e) {
    CHECK(std::string(e.what()) == "boom 17");
  }
}

TEST_CASE("operator errors carry utterance id and operator") {
  Resources r = resources();
  r.provider = nullptr;
  Utterance u = parse_inline("add/O fresh/O tunes/O", "I", "zz-1");
  try {
    apply_operator(u, OperatorId::kSynonymAdj, r, 1);
    FAIL("expected an error");
  } catch (const Error &e) {
    std::string m = e.what();
    CHECK(m.find("zz-1") != std::string::npos);
    CHECK(m.find("syn_adj") != std::string::npos);
  }
}

TEST_CASE("baseline confidences are hit rates of the perturbed utterances") {
  Dataset train = snips_like(200, 1, "tr");
  Dataset d = snips_like(30, 2, "ev");
  BaselineModel m = BaselineModel::train(train);
  ConfidenceTable t = baseline_confidence(m, d, 6, resources());
  CHECK(t.size() == 300);
  CHECK(t.missing(d, kSpokenGroup).empty());
  auto eos = build_single_operator_set(d, OperatorId::kEosFiller, 6, resources());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(*t.find(d.utterances[i].id, OperatorId::kEosFiller) == m.hit_rate(eos[i].base));
  }
}
