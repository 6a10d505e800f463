#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ctrie.h"

namespace {

// Inverse of the library's key mix; lets a test prescribe hash values.
constexpr std::uint64_t unmix64(std::uint64_t z) {
  z ^= (z >> 31) ^ (z >> 62);
  z *= 0x319642b2d24d8ec3ULL;
  z ^= (z >> 27) ^ (z >> 54);
  z *= 0x96de1b173f119089ULL;
  z ^= (z >> 30) ^ (z >> 60);
  return z;
}

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

static_assert(mix64(unmix64(0xfeedfacecafebeefULL)) == 0xfeedfacecafebeefULL);

struct Handle {
  ctrie_map* t;
  Handle() : t(ctrie_new()) {}
  ~Handle() { ctrie_free(t); }
};

}  // namespace

TEST_CASE("insert, lookup, remove round trip with status codes") {
  Handle h;
  std::uint64_t v = 0;
  CHECK(ctrie_lookup(h.t, 1, &v) == CTRIE_NOT_FOUND);
  CHECK(ctrie_insert(h.t, 1, 11) == CTRIE_OK);
  CHECK(ctrie_lookup(h.t, 1, &v) == CTRIE_OK);
  CHECK(v == 11);
  CHECK(ctrie_insert(h.t, 1, 12) == CTRIE_OK);
  CHECK(ctrie_lookup(h.t, 1, nullptr) == CTRIE_OK);
  std::uint64_t old = 0;
  CHECK(ctrie_remove(h.t, 1, &old) == CTRIE_OK);
  CHECK(old == 12);
  CHECK(ctrie_remove(h.t, 1, &old) == CTRIE_NOT_FOUND);
}

TEST_CASE("null arguments are rejected") {
  CHECK(ctrie_insert(nullptr, 1, 1) == CTRIE_EINVAL);
  CHECK(ctrie_lookup(nullptr, 1, nullptr) == CTRIE_EINVAL);
  CHECK(ctrie_remove(nullptr, 1, nullptr) == CTRIE_EINVAL);
  CHECK(ctrie_get_metrics(nullptr, nullptr) == CTRIE_EINVAL);
  CHECK(ctrie_validate(nullptr, nullptr, 0) == -1);
  CHECK(ctrie_fuzz(1, 0, 16, nullptr) == CTRIE_EINVAL);
  CHECK(ctrie_bench(nullptr, nullptr) == CTRIE_EINVAL);
}

TEST_CASE("metrics and the validation JSON line") {
  Handle h;
  for (std::uint64_t k = 0; k < 100; ++k) ctrie_insert(h.t, k, k);

  ctrie_metrics m{};
  REQUIRE(ctrie_get_metrics(h.t, &m) == CTRIE_OK);
  CHECK(m.live_inodes >= 1);
  CHECK(m.null_inodes == 0);
  CHECK(m.tomb_inodes == 0);

  char json[256];
  const long violations = ctrie_validate(h.t, json, sizeof json);
  CHECK(violations == 0);
  const auto j = nlohmann::json::parse(json);
  for (const char* field : {"n", "t", "l", "r", "d", "tips", "violations"})
    REQUIRE(j.contains(field));
  CHECK(j["violations"] == 0);
  CHECK(j["l"] == m.live_inodes);
  CHECK(j["d"] == m.total_path_length);
}

TEST_CASE("fuzz driver: clean run") {
  ctrie_fuzz_report rep{};
  REQUIRE(ctrie_fuzz(3, 50000, 1u << 12, &rep) == CTRIE_OK);
  CHECK(rep.diverged == 0);
  CHECK(rep.ops_executed == 50000);
}

TEST_CASE("lincheck driver: accepted rounds and a JSONL dump") {
  const char* path = "capi_histories.jsonl";
  ctrie_lincheck_report rep{};
  REQUIRE(ctrie_lincheck(3, 5, 4, 20, 2, path, &rep) == CTRIE_OK);
  CHECK(rep.rounds_run == 20);
  CHECK(rep.rounds_accepted == 20);
  CHECK(rep.first_rejected_round == -1);

  std::ifstream is(path);
  REQUIRE(is.good());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(is, line)) {
    ++lines;
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("t"));
    CHECK(j.contains("op"));
  }
  CHECK(lines == 20u * 3u * 5u);
  std::remove(path);

  CHECK(ctrie_lincheck(1, 5, 4, 1, 2, nullptr, &rep) == CTRIE_EINVAL);
  CHECK(ctrie_lincheck(8, 33, 4, 1, 2, nullptr, &rep) == CTRIE_EINVAL);
}

TEST_CASE("bench driver") {
  ctrie_bench_spec spec{};
  spec.scenario = "insert";
  spec.structure = "ctrie";
  spec.elements = 2000;
  spec.threads = 2;
  spec.reps = 3;
  spec.warmup = 0;
  spec.seed = 5;

  ctrie_bench_result res{};
  REQUIRE(ctrie_bench(&spec, &res) == CTRIE_OK);
  CHECK(res.median_ms >= 0.0);
  CHECK(res.total_ops == 2000);
  CHECK(res.hardware_threads >= 1);

  spec.scenario = "warp";
  CHECK(ctrie_bench(&spec, &res) == CTRIE_EINVAL);
  spec.scenario = "insert";
  spec.elements = 1;  // < threads
  CHECK(ctrie_bench(&spec, &res) == CTRIE_EINVAL);
}

TEST_CASE("bench CSV sweep") {
  ctrie_bench_spec spec{};
  spec.scenario = "insert";
  spec.structure = "ctrie";
  spec.elements = 1000;
  spec.threads = 1;
  spec.reps = 3;
  spec.warmup = 0;
  spec.seed = 5;

  const char* path = "capi_bench.csv";
  const std::uint64_t points[] = {500, 1000};
  REQUIRE(ctrie_bench_csv(&spec, "elements", points, 2, path) == CTRIE_OK);
  std::ifstream is(path);
  REQUIRE(is.good());
  std::string header;
  std::getline(is, header);
  CHECK(header == "scenario,structure,N,P,r,rep,median_ms,min_ms,error");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 6);
  std::remove(path);
}

TEST_CASE("engineered 32-bit hash collisions through the C interface") {
  // Two keys whose mixed hashes agree on the low 32 bits.
  const std::uint64_t h1 = 0x00000000deadbeefULL;
  const std::uint64_t h2 = h1 | (0x7ULL << 32);
  const std::uint64_t k1 = unmix64(h1);
  const std::uint64_t k2 = unmix64(h2);
  REQUIRE(k1 != k2);
  REQUIRE((mix64(k1) & 0xffffffffu) == (mix64(k2) & 0xffffffffu));

  Handle h;
  CHECK(ctrie_insert(h.t, k1, 100) == CTRIE_OK);
  CHECK(ctrie_insert(h.t, k2, 200) == CTRIE_OK);
  std::uint64_t v = 0;
  CHECK(ctrie_lookup(h.t, k1, &v) == CTRIE_OK);
  CHECK(v == 100);
  CHECK(ctrie_lookup(h.t, k2, &v) == CTRIE_OK);
  CHECK(v == 200);
  CHECK(ctrie_validate(h.t, nullptr, 0) == 0);

  CHECK(ctrie_remove(h.t, k1, &v) == CTRIE_OK);
  CHECK(ctrie_lookup(h.t, k2, &v) == CTRIE_OK);
  CHECK(v == 200);
  CHECK(ctrie_lookup(h.t, k1, nullptr) == CTRIE_NOT_FOUND);
  CHECK(ctrie_validate(h.t, nullptr, 0) == 0);
}

TEST_CASE("handles are safe to hammer from several threads") {
  Handle h;
  std::vector<std::thread> pool;
  for (int tid = 0; tid < 4; ++tid)
    pool.emplace_back([&h, tid] {
      for (std::uint64_t i = 0; i < 20000; ++i) {
        const std::uint64_t k = (i * 31 + static_cast<std::uint64_t>(tid)) % 256;
        switch ((i + static_cast<std::uint64_t>(tid)) % 3) {
          case 0: ctrie_insert(h.t, k, i); break;
          case 1: ctrie_lookup(h.t, k, nullptr); break;
          default: ctrie_remove(h.t, k, nullptr); break;
        }
      }
    });
  for (auto& t : pool) t.join();
  CHECK(ctrie_validate(h.t, nullptr, 0) == 0);
}
