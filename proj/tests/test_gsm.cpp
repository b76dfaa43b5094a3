#include <doctest.h>

#include "dfrc/gsm.hpp"

using namespace dfrc;

namespace {

// Pascal-triangle binomial, independent of the library's implementation.
std::uint64_t binom_ref(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::vector<std::uint64_t> row(n + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = i; j >= 1; --j) row[j] += row[j - 1];
  return row[k];
}

}  // namespace

TEST_CASE("pattern counts") {
  CHECK(pattern_count(32, 5, false) == 201376);
  CHECK(pattern_count(32, 5, true) == 4060);
  CHECK(pattern_count(7, 7, false) == 1);
  for (int n = 2; n <= 12; ++n)
    for (int k = 1; k <= n; ++k) CHECK(pattern_count(n, k, false) == binom_ref(n, k));
  CHECK_THROWS_AS(pattern_count(32, 40, false), GsmError);
  CHECK_THROWS_AS(pattern_count(32, 0, false), GsmError);
}

TEST_CASE("bits per pattern") {
  CHECK(bits_per_pattern(32, 5, false) == 17);
  CHECK(bits_per_pattern(32, 5, true) == 11);
  CHECK(bits_per_pattern(2, 2, false) == 0);
  CHECK(bits_per_pattern(32, 2, false) == 8);
  CHECK(bits_per_pattern(32, 7, false) == 21);

  // monotone nondecreasing in N_t for fixed N_x
  for (int nx : {2, 3, 5}) {
    int prev = 0;
    for (int nt = nx; nt <= 20; ++nt) {
      const int b = bits_per_pattern(nt, nx, false);
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("encode examples") {
  auto p0 = encode_pattern(0, 6, 3, true);
  CHECK(p0.indices == std::vector<int>{0, 1, 5});
  auto p3 = encode_pattern(3, 6, 3, true);
  CHECK(p3.indices == std::vector<int>{0, 4, 5});
  CHECK(decode_pattern(p0, 6, 3) == 0);
  CHECK(decode_pattern(p3, 6, 3) == 3);
  CHECK_THROWS_AS(encode_pattern(4, 6, 3, true), GsmError);  // B = 2 here
}

TEST_CASE("round trip and invariants") {
  for (bool fixed : {false, true}) {
    const int b = bits_per_pattern(8, 3, fixed);
    for (std::uint64_t v = 0; v < (1ULL << b); ++v) {
      const AntennaPattern p = encode_pattern(v, 8, 3, fixed);
      CHECK_NOTHROW(validate_pattern(p, 8, 3));
      CHECK(decode_pattern(p, 8, 3) == v);
    }
  }
}

TEST_CASE("unencodable patterns are rejected") {
  // rank C(30,3)-1 = 4059 >= 2^11, never produced by the encoder
  AntennaPattern last;
  last.fixed_endpoints = true;
  last.indices = {0, 28, 29, 30, 31};
  bool threw = false;
  try {
    decode_pattern(last, 32, 5);
  } catch (const GsmError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("unencodable") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("pattern validation") {
  AntennaPattern p;
  p.indices = {3, 3, 7};
  CHECK_THROWS_AS(validate_pattern(p, 8, 3), GsmError);
  p.indices = {1, 3, 7};
  p.fixed_endpoints = true;
  CHECK_THROWS_AS(validate_pattern(p, 8, 3), GsmError);
  p.indices = {0, 3, 7};
  CHECK_NOTHROW(validate_pattern(p, 8, 3));
}
