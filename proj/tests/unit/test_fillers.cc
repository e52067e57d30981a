#include <doctest.h>

#include "oracles.h"
#include "slotperturb/errors.h"
#include "slotperturb/fillers.h"
#include "slotperturb/tagger.h"
#include "slotperturb/text.h"

using namespace slotperturb;

namespace {

const std::string kData = SLOTPERTURB_DATA_DIR;

const PosLexicon &lexicon() {
  static const PosLexicon lex =
      load_pos_lexicon(kData + "/pos_lexicon.tsv", kData + "/stopwords.txt");
  return lex;
}

Utterance reference() {
  return parse_inline(
      "add/O tune/B-music_item to/O sxsw/B-playlist fresh/I-playlist playlist/O",
      "AddToPlaylist", "ref");
}

FillerInventory only(FillerKind kind, const std::string &phrase) {
  FillerInventory inv = FillerInventory::defaults();
  Phrase p = split_whitespace(phrase);
  switch (kind) {
    case FillerKind::kBos: inv.bos = {p}; break;
    case FillerKind::kEos: inv.eos = {p}; break;
    case FillerKind::kPreVerb: inv.pre_verb = {p}; break;
    case FillerKind::kPostVerb: inv.post_verb = {p}; break;
  }
  return inv;
}

std::string text(const PerturbedUtterance &p) { return join(p.base.surfaces(), " "); }

// Legal points by brute force: i is legal unless some chunk has start < i < end.
std::vector<std::size_t> oracle_points(const Utterance &u) {
  std::vector<std::string> tags = u.tags();
  auto cs = testing::oracle_chunks(tags);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i <= u.size(); ++i) {
    bool inside = false;
    for (const auto &[l, s, e] : cs) inside = inside || (s < i && i < e);
    if (!inside) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("default inventory ships the documented phrases") {
  FillerInventory inv = FillerInventory::defaults();
  CHECK(inv.bos.size() == 8);
  CHECK(inv.eos.size() == 6);
  CHECK(inv.pre_verb.size() == 3);
  CHECK(inv.post_verb.size() == 4);
  CHECK(inv.failsafe_word == "like");
  CHECK(inv.eos.back() == Phrase{"would", "you", "mind", "?"});
  FillerInventory file = load_filler_inventory(kData + "/fillers.json");
  CHECK(file.bos == inv.bos);
  CHECK(file.eos == inv.eos);
  CHECK(file.pre_verb == inv.pre_verb);
  CHECK(file.post_verb == inv.post_verb);
}

TEST_CASE("inventory parsing") {
  FillerInventory inv = parse_filler_inventory(R"({"bos": ["um"], "failsafe_word": "uh"})");
  CHECK(inv.bos == std::vector<Phrase>{{"um"}});
  CHECK(inv.eos == FillerInventory::defaults().eos);
  CHECK(inv.failsafe_word == "uh");
  CHECK_THROWS_AS(parse_filler_inventory(R"({"bos": []})"), ConfigError);
  CHECK_THROWS_AS(parse_filler_inventory(R"({"bos": [""]})"), ConfigError);
  CHECK_THROWS_AS(parse_filler_inventory("not json"), ConfigError);
}

TEST_CASE("legal insertion points") {
  Utterance all_o = parse_inline("a/O b/O c/O", "I", "x");
  CHECK(legal_insertion_points(all_o) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(legal_insertion_points(reference()) == std::vector<std::size_t>{0, 1, 2, 3, 5, 6});
  CHECK(legal_insertion_points(reference()) == oracle_points(reference()));
  Utterance whole = parse_inline("new/B-city york/I-city city/I-city", "I", "x");
  CHECK(legal_insertion_points(whole) == std::vector<std::size_t>{0, 3});
  CHECK(nearest_legal_point(reference(), 4) == 3);  // tie 3 vs 5 goes left
  Utterance long_chunk = parse_inline("a/O b/B-x c/I-x d/I-x e/I-x f/O", "I", "x");
  CHECK(nearest_legal_point(long_chunk, 2) == 1);
  CHECK(nearest_legal_point(long_chunk, 4) == 5);
}

TEST_CASE("BOS and EOS with the reference phrases") {
  Utterance u = reference();
  auto tags = tag(u, lexicon());
  auto bos = apply_filler(u, FillerKind::kBos, only(FillerKind::kBos, "okay so"), tags, 1);
  CHECK(text(bos) == "okay so add tune to sxsw fresh playlist");
  CHECK(bos.base.tokens[0].slot_tag == "O");
  CHECK(bos.base.tokens[1].slot_tag == "O");
  CHECK(bos.edit_site == 0);
  CHECK(bos.inserted_or_replacement == "okay so");
  auto eos = apply_filler(u, FillerKind::kEos, only(FillerKind::kEos, "if you can"), tags, 1);
  CHECK(text(eos) == "add tune to sxsw fresh playlist if you can");
  CHECK(eos.edit_site == 6);
}

TEST_CASE("pinned seeds pick the reference phrases from the default inventory") {
  Utterance u = reference();
  auto tags = tag(u, lexicon());
  FillerInventory inv = FillerInventory::defaults();
  CHECK(text(apply_filler(u, FillerKind::kBos, inv, tags, 3)) ==
        "okay so add tune to sxsw fresh playlist");
  CHECK(text(apply_filler(u, FillerKind::kEos, inv, tags, 1)) ==
        "add tune to sxsw fresh playlist if you can");
  CHECK(text(apply_filler(u, FillerKind::kPreVerb, inv, tags, 0)) ==
        "like add tune to sxsw fresh playlist");
  CHECK(text(apply_filler(u, FillerKind::kPostVerb, inv, tags, 8, {true})) ==
        "add tune actually to sxsw fresh playlist");
}

TEST_CASE("post-verb default goes right after the verb; verb-phrase mode after its object") {
  Utterance u = reference();
  auto tags = tag(u, lexicon());
  auto inv = only(FillerKind::kPostVerb, "actually");
  CHECK(text(apply_filler(u, FillerKind::kPostVerb, inv, tags, 0)) ==
        "add actually tune to sxsw fresh playlist");
  auto vp = apply_filler(u, FillerKind::kPostVerb, inv, tags, 0, {true});
  CHECK(text(vp) == "add tune actually to sxsw fresh playlist");
  CHECK(vp.detail.at("placement") == "verb");
}

TEST_CASE("pre-verb inside a chunk shifts to the nearest boundary") {
  // The verb sits inside a slot chunk; insertion moves out of it.
  Utterance u = parse_inline("find/O the/B-work book/I-work thief/I-work", "I", "x");
  std::vector<CoarsePos> tags = {CoarsePos::kNoun, CoarsePos::kStopword,
                                 CoarsePos::kVerb, CoarsePos::kNoun};
  auto p = apply_filler(u, FillerKind::kPreVerb, only(FillerKind::kPreVerb, "like"), tags, 0);
  CHECK(text(p) == "find like the book thief");
  CHECK(p.edit_site == 1);
}

TEST_CASE("fail-safe: no verb inserts the fail-safe word before the first slot token") {
  Utterance u = parse_inline("cheapest/O fare/O to/O boston/B-toloc", "atis_airfare", "x");
  auto tags = tag(u, lexicon());
  REQUIRE_FALSE(first_verb_index(tags));
  for (FillerKind kind : {FillerKind::kPreVerb, FillerKind::kPostVerb}) {
    auto p = apply_filler(u, kind, FillerInventory::defaults(), tags, 11);
    CHECK(text(p) == "cheapest fare to like boston");
    CHECK(p.base.tokens[3].slot_tag == "O");
    CHECK(p.base.tokens[4].slot_tag == "B-toloc");
    CHECK(p.detail.at("placement") == "failsafe-slot");
  }
  Utterance bare = parse_inline("hello/O there/O", "Greet", "y");
  auto p = apply_filler(bare, FillerKind::kPreVerb, FillerInventory::defaults(),
                        tag(bare, lexicon()), 0);
  CHECK(text(p) == "like hello there");
  CHECK(p.detail.at("placement") == "failsafe-bos");
}

TEST_CASE("BOS/EOS never use the fail-safe") {
  Utterance u = parse_inline("cheapest/O fare/O to/O boston/B-toloc", "I", "x");
  auto tags = tag(u, lexicon());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto b = apply_filler(u, FillerKind::kBos, FillerInventory::defaults(), tags, seed);
    auto e = apply_filler(u, FillerKind::kEos, FillerInventory::defaults(), tags, seed);
    CHECK(b.edit_site == 0);
    CHECK(e.edit_site == 4);
    CHECK(b.detail.count("placement") == 0);
  }
}

TEST_CASE("filler is deterministic and phrase choice covers the inventory") {
  Utterance u = reference();
  auto tags = tag(u, lexicon());
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto a = apply_filler(u, FillerKind::kBos, FillerInventory::defaults(), tags, seed);
    auto b = apply_filler(u, FillerKind::kBos, FillerInventory::defaults(), tags, seed);
    CHECK(a.base == b.base);
    seen.insert(a.inserted_or_replacement);
  }
  CHECK(seen.size() == FillerInventory::defaults().bos.size());
}

TEST_CASE("misaligned tags are rejected") {
  Utterance u = reference();
  std::vector<CoarsePos> tags = {CoarsePos::kVerb};
  CHECK_THROWS(apply_filler(u, FillerKind::kPreVerb, FillerInventory::defaults(), tags, 0));
}
