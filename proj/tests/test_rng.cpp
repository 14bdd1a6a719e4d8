#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "qlock/rng.hpp"

using namespace qlock;

TEST_CASE("generator version tag is stable") {
  CHECK(std::string(kRngVersion) == "qlock-prng-v1");
}

TEST_CASE("pinned first outputs for seed 42") {
  // Frozen stream values: any change to seeding or the generator core breaks
  // replay of existing sidecar records, so these are exact.
  Rng r(42);
  CHECK(r.next_u64() == 1546998764402558742ULL);
  CHECK(r.next_u64() == 6990951692964543102ULL);
  CHECK(r.next_u64() == 12544586762248559009ULL);
}

TEST_CASE("pinned substream output") {
  Rng r = Rng(42).substream("block");
  CHECK(r.next_u64() == 4371698805551947394ULL);
}

TEST_CASE("pinned double outputs for seed 7") {
  Rng r(7);
  CHECK(r.next_double() == 0.7005764821796896);
  CHECK(r.next_double() == 0.2787512294737843);
}

TEST_CASE("same seed gives identical sequences") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  bool any_diff = false;
  for (int i = 0; i < 8; ++i) any_diff |= (a.next_u64() != b.next_u64());
  CHECK(any_diff);
}

TEST_CASE("seed accessor returns the construction seed") {
  CHECK(Rng(99).seed() == 99);
}

TEST_CASE("substreams with distinct labels are independent") {
  Rng master(5);
  Rng a = master.substream("alpha");
  Rng b = master.substream("beta");
  CHECK(a.next_u64() != b.next_u64());
  Rng a1 = master.substream("alpha");
  Rng a2 = master.substream("alpha");
  for (int i = 0; i < 10; ++i) CHECK(a1.next_u64() == a2.next_u64());
}

TEST_CASE("substream derivation does not disturb the parent") {
  Rng a(77), b(77);
  (void)b.substream("x");
  (void)b.substream("y");
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("nested substreams depend on the whole path") {
  Rng r(3);
  Rng ab = r.substream("a").substream("b");
  Rng ba = r.substream("b").substream("a");
  CHECK(ab.next_u64() != ba.next_u64());
}

TEST_CASE("next_below stays in range and hits every residue") {
  Rng r(11);
  std::set<uint64_t> seen;
  for (int i = 0; i < 400; ++i) {
    const uint64_t v = r.next_below(10);
    CHECK(v < 10);
    seen.insert(v);
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("next_below(1) is always zero") {
  Rng r(2);
  for (int i = 0; i < 20; ++i) CHECK(r.next_below(1) == 0);
}

TEST_CASE("next_double lies in the unit interval") {
  Rng r(13);
  for (int i = 0; i < 1000; ++i) {
    const double d = r.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
  }
}

TEST_CASE("fnv1a64 matches the published test vector") {
  // Independent cross-check: the standard FNV-1a 64-bit digest of "abc".
  CHECK(fnv1a64("abc") == 16654208175385433931ULL);
  CHECK(fnv1a64("") == 14695981039346656037ULL);  // offset basis
  CHECK(fnv1a64("a") != fnv1a64("b"));
}

TEST_CASE("hash_hex formats 16 hex digits") {
  CHECK(hash_hex(0) == std::string(16, '0'));
  CHECK(hash_hex(0x1a2b3c4d5e6f7081ULL) == "1a2b3c4d5e6f7081");
}
