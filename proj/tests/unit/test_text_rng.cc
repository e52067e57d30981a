#include <doctest.h>

#include <map>

#include "slotperturb/errors.h"
#include "slotperturb/rng.h"
#include "slotperturb/text.h"

using namespace slotperturb;

TEST_CASE("split_lines strips CR and ignores the final newline") {
  auto lines = split_lines("a\r\nb\n\nc\n");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "a");
  CHECK(lines[1] == "b");
  CHECK(lines[2] == "");
  CHECK(lines[3] == "c");
  CHECK(split_lines("").empty());
}

TEST_CASE("whitespace helpers") {
  CHECK(split_whitespace("  add  tune\tto ") == std::vector<std::string>{"add", "tune", "to"});
  CHECK(trim("  x ") == "x");
  CHECK(has_whitespace("a b"));
  CHECK_FALSE(has_whitespace("ab"));
  CHECK(to_lower("SxSW") == "sxsw");
}

TEST_CASE("letters: ASCII letters and non-ASCII bytes count") {
  CHECK(is_all_letters("tune"));
  CHECK(is_all_letters("café"));
  CHECK_FALSE(is_all_letters("can't"));
  CHECK_FALSE(is_all_letters(""));
  CHECK(has_letter("o'clock"));
  CHECK_FALSE(has_letter("42?"));
}

TEST_CASE("utf8 boundaries") {
  CHECK(utf8_boundaries("abc") == std::vector<std::size_t>{0, 1, 2});
  CHECK(utf8_boundaries("çé") == std::vector<std::size_t>{0, 2});
}

TEST_CASE("fnv1a64 known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("read_file on a missing path throws IoError") {
  CHECK_THROWS_AS(read_file("/nonexistent/definitely/missing.txt"), IoError);
}

TEST_CASE("rng is reproducible and derive_seed separates streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 1) != derive_seed(1, 2, 2));
  CHECK(derive_seed(1, 2, 1) != derive_seed(1, 3, 1));
  CHECK(derive_seed(1, 2, 1) != derive_seed(2, 2, 1));
}

TEST_CASE("uniform_index stays in range and covers every value") {
  Rng rng(7);
  std::map<std::size_t, int> seen;
  for (int i = 0; i < 7000; ++i) {
    std::size_t v = rng.uniform_index(7);
    REQUIRE(v < 7);
    ++seen[v];
  }
  CHECK(seen.size() == 7);
  for (auto &[v, c] : seen) {
    CHECK(c > 800);
    CHECK(c < 1200);
  }
  CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("uniform_real in [0, 1)") {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) {
    double x = rng.uniform_real();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}
