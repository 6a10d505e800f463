#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ctrie/bench.hpp"

using ctrie::BenchConfig;
using ctrie::BenchRow;
using ctrie::Scenario;
using ctrie::StructureKind;

namespace {

BenchConfig tiny(Scenario s, StructureKind st) {
  BenchConfig cfg;
  cfg.scenario = s;
  cfg.structure = st;
  cfg.elements = 2000;
  cfg.threads = 2;
  cfg.reps = 3;
  cfg.warmup = 1;
  cfg.seed = 7;
  return cfg;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("configuration validation") {
  BenchConfig cfg = tiny(Scenario::insert, StructureKind::ctrie);
  CHECK_FALSE(ctrie::validate_config(cfg).has_value());

  cfg.elements = 0;
  CHECK(ctrie::validate_config(cfg).has_value());  // N >= P violated

  cfg = tiny(Scenario::insert, StructureKind::ctrie);
  cfg.threads = 0;
  CHECK(ctrie::validate_config(cfg).has_value());

  cfg = tiny(Scenario::insert, StructureKind::ctrie);
  cfg.elements = 1;
  cfg.threads = 2;
  CHECK(ctrie::validate_config(cfg).has_value());

  cfg = tiny(Scenario::insert, StructureKind::ctrie);
  cfg.reps = 2;
  CHECK(ctrie::validate_config(cfg).has_value());

  const BenchRow row = ctrie::run_scenario(cfg);
  CHECK_FALSE(row.ok());
}

TEST_CASE("every scenario runs clean on every structure at desk scale") {
  for (auto st : {StructureKind::ctrie, StructureKind::locked_hash,
                  StructureKind::locked_ordered}) {
    for (auto sc : {Scenario::insert, Scenario::remove, Scenario::lookup,
                    Scenario::mixed}) {
      BenchConfig cfg = tiny(sc, st);
      if (sc == Scenario::mixed) cfg.ratio = 2;
      const BenchRow row = ctrie::run_scenario(cfg);
      INFO(ctrie::to_string(sc), " on ", ctrie::to_string(st), ": ",
           row.error);
      REQUIRE(row.ok());
      CHECK(row.rep_ms.size() == cfg.reps);
      CHECK(row.median_ms >= 0.0);
      CHECK(row.min_ms <= row.median_ms);
      CHECK(row.hardware_threads >= 1);
      const std::uint64_t want =
          sc == Scenario::mixed ? cfg.elements * (1 + cfg.ratio)
                                : cfg.elements;
      CHECK(row.total_ops == want);
    }
  }
}

TEST_CASE("keys are distinct and reproducible") {
  const auto a = ctrie::bench_detail::make_keys(5000, 11);
  const auto b = ctrie::bench_detail::make_keys(5000, 11);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  const auto c = ctrie::bench_detail::make_keys(5000, 12);
  CHECK(a != c);
}

TEST_CASE("sweep: one row per point per structure, CSV round-trips") {
  BenchConfig base = tiny(Scenario::insert, StructureKind::ctrie);
  const auto rows =
      ctrie::sweep(ctrie::SweepAxis::elements, base, {500, 1000});
  REQUIRE(rows.size() == 6);  // 2 points x 3 structures
  for (const BenchRow& r : rows) CHECK(r.ok());

  std::ostringstream os;
  ctrie::write_csv(rows, os);
  const std::string csv = os.str();
  CHECK(count_lines(csv) == 7);  // header + 6 rows
  CHECK(csv.rfind("scenario,structure,N,P,r,rep,median_ms,min_ms,error\n",
                  0) == 0);
  CHECK(csv.find("insert,ctrie,500,2,0,3,") != std::string::npos);
  CHECK(csv.find("insert,locked-ordered,1000,2,0,3,") != std::string::npos);
}

TEST_CASE("sweep over the lookup/insert ratio") {
  BenchConfig base = tiny(Scenario::mixed, StructureKind::ctrie);
  base.elements = 1000;
  const auto rows = ctrie::sweep(ctrie::SweepAxis::ratio, base, {2, 5, 9});
  REQUIRE(rows.size() == 9);
  for (const BenchRow& r : rows) {
    REQUIRE(r.ok());
    CHECK(r.total_ops == base.elements * (1 + r.config.ratio));
  }
  CHECK(rows[0].config.ratio == 2);
  CHECK(rows[8].config.ratio == 9);
}

TEST_CASE("sweep: a failing point becomes an error row, the sweep goes on") {
  BenchConfig base = tiny(Scenario::insert, StructureKind::ctrie);
  base.threads = 4;
  // First point violates N >= P; the second is fine.
  const auto rows = ctrie::sweep(ctrie::SweepAxis::elements, base, {2, 4000});
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < 3; ++i) CHECK_FALSE(rows[i].ok());
  for (std::size_t i = 3; i < 6; ++i) CHECK(rows[i].ok());

  std::ostringstream os;
  ctrie::write_csv(rows, os);
  CHECK(os.str().find("elements must be >= threads") != std::string::npos);
}

TEST_CASE("single-point sweep matches a direct run's shape") {
  BenchConfig base = tiny(Scenario::lookup, StructureKind::ctrie);
  const auto rows = ctrie::sweep(ctrie::SweepAxis::threads, base, {1});
  REQUIRE(rows.size() == 3);
  const BenchRow direct = ctrie::run_scenario(rows[0].config);
  CHECK(direct.ok());
  CHECK(rows[0].ok());
  CHECK(direct.total_ops == rows[0].total_ops);
  CHECK(direct.config.threads == 1);
  CHECK(rows[0].rep_ms.size() == direct.rep_ms.size());
}

TEST_CASE("locked baselines behave like maps") {
  ctrie::LockedHashMap h;
  ctrie::LockedOrderedMap o;
  h.insert(1, 10);
  o.insert(1, 10);
  CHECK(h.lookup(1) == std::optional<std::uint64_t>(10));
  CHECK(o.lookup(1) == std::optional<std::uint64_t>(10));
  CHECK(h.remove(2) == std::nullopt);
  CHECK(o.remove(2) == std::nullopt);
  CHECK(h.remove(1) == std::optional<std::uint64_t>(10));
  CHECK(o.remove(1) == std::optional<std::uint64_t>(10));
  CHECK(h.size() == 0);
  CHECK(o.size() == 0);
}
