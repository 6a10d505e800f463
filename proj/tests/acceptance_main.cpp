// Acceptance suite: one check per release criterion, each printed as a
// single PASS / FAIL / SKIP line. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ctrie/bench.hpp"
#include "ctrie/ctrie.hpp"
#include "ctrie/fuzz.hpp"
#include "ctrie/history.hpp"
#include "ctrie/lincheck.hpp"
#include "ctrie/progress.hpp"
#include "ctrie/validate.hpp"

#include "lincheck_reference.hpp"

using Trie = ctrie::BenchTrie;  // the production uint64 configuration

namespace {

#if defined(__SANITIZE_THREAD__)
constexpr const char* kSanitizer = "thread sanitizer active";
#elif defined(__SANITIZE_ADDRESS__)
constexpr const char* kSanitizer = "address sanitizer active";
#elif defined(__has_feature)
#if __has_feature(thread_sanitizer)
constexpr const char* kSanitizer = "thread sanitizer active";
#elif __has_feature(address_sanitizer)
constexpr const char* kSanitizer = "address sanitizer active";
#else
constexpr const char* kSanitizer = "no sanitizer in this build";
#endif
#else
constexpr const char* kSanitizer = "no sanitizer in this build";
#endif

struct Outcome {
  enum Kind { pass, fail, skip } kind = pass;
  std::string detail;
};

Outcome ok(std::string detail) { return {Outcome::pass, std::move(detail)}; }
Outcome bad(std::string detail) { return {Outcome::fail, std::move(detail)}; }

Outcome sequential_oracle() {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Trie t;
    const auto rep = ctrie::sequential_fuzz(t, seed, 100000, 1u << 14);
    if (!rep.ok)
      return bad("seed " + std::to_string(seed) + " diverged at op " +
                 std::to_string(rep.divergence_index) + ": " + rep.detail);
  }
  return ok("10 seeds x 100000 ops over 16384 keys, zero divergences");
}

Outcome invariant_snapshots() {
  std::uint64_t snapshots = 0;
  std::uint64_t violations = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Trie t;
    const auto rep = ctrie::sequential_fuzz(
        t, seed * 31, 20000, 4096,
        [&](std::uint64_t, Trie& trie) {
          ++snapshots;
          violations += ctrie::validate(trie).violations.size();
        },
        200);
    if (!rep.ok) return bad("fuzz run diverged");
  }
  if (snapshots < 1000)
    return bad("only " + std::to_string(snapshots) + " snapshots taken");
  if (violations != 0)
    return bad(std::to_string(violations) + " violations across " +
               std::to_string(snapshots) + " snapshots");
  return ok(std::to_string(snapshots) + " snapshots validated, 0 violations");
}

Outcome compactness() {
  std::mt19937_64 seeds(404);
  for (int round = 0; round < 200; ++round) {
    Trie t;
    const std::uint64_t seed = seeds();
    std::vector<std::thread> pool;
    for (int tid = 0; tid < 4; ++tid)
      pool.emplace_back([&t, seed, tid] {
        std::mt19937_64 rng(seed ^ (0x9e37ull * (tid + 1)));
        for (int i = 0; i < 500; ++i) {
          const std::uint64_t k = rng() % 64;
          switch (rng() % 100) {
            case 0 ... 44: t.insert(k, rng()); break;
            case 45 ... 79: (void)t.lookup(k); break;
            default: (void)t.remove(k); break;
          }
        }
      });
    for (auto& th : pool) th.join();
    if (round % 2 == 1)
      for (std::uint64_t k = 0; k < 64; ++k) (void)t.remove(k);
    const std::uint64_t tips = ctrie::tip_count(t);
    if (tips > 1)
      return bad("round " + std::to_string(round) + " ended with " +
                 std::to_string(tips) + " tips");
  }
  return ok("200 rounds, tip count <= 1 after every one");
}

Outcome empty_after_delete() {
  Trie t;
  std::vector<std::uint64_t> keys;
  std::mt19937_64 rng(77);
  for (int i = 0; i < 10000; ++i) keys.push_back(rng());
  for (std::size_t i = 0; i < keys.size(); ++i) t.insert(keys[i], i);
  for (const std::uint64_t k : keys)
    if (!t.remove(k).has_value()) return bad("a key went missing");
  const auto* root = t.quiescent_root();
  const bool root_ok =
      root == nullptr || root->main.load(std::memory_order_relaxed) == nullptr;
  const auto m = ctrie::state_metrics(t);
  if (!root_ok) return bad("root is neither absent nor a null-inode");
  if (m.live_inodes != 0)
    return bad("live inodes after full removal: " +
               std::to_string(m.live_inodes));
  return ok("10000 keys in and out; root " +
            std::string(root == nullptr ? "absent" : "a lone null-inode") +
            ", l = 0");
}

Outcome linearizability_corpus() {
  for (unsigned round = 0; round < 500; ++round) {
    Trie t;
    const ctrie::History h = ctrie::record_history(t, 4, 8, 4, 1000 + round);
    const auto res = ctrie::check_linearizable(h);
    if (!res.accepted())
      return bad("round " + std::to_string(round) + " rejected");
  }
  // A found value that precedes every insert invocation cannot linearize.
  ctrie::History impossible;
  ctrie::HistoryEvent a;
  a.thread = 0;
  a.op = ctrie::OpKind::lookup;
  a.key = 1;
  a.res = ctrie::ResKind::found;
  a.res_value = 42;
  a.invoke_ns = 0;
  a.return_ns = 10;
  ctrie::HistoryEvent b;
  b.thread = 1;
  b.op = ctrie::OpKind::insert;
  b.key = 1;
  b.value = 42;
  b.res = ctrie::ResKind::unit;
  b.invoke_ns = 20;
  b.return_ns = 30;
  impossible.events = {a, b};
  if (ctrie::check_linearizable(impossible).accepted())
    return bad("the impossible history was accepted");
  return ok("500 recorded histories accepted; impossible history rejected");
}

Outcome checker_cross_validation() {
  // Mirrors the harness test generator: plausible and random histories.
  std::mt19937_64 rng(31337);
  int agreed = 0;
  for (int i = 0; i < 200; ++i) {
    ctrie::History h;
    const int threads = 2 + static_cast<int>(rng() % 2);
    const int total = 2 + static_cast<int>(rng() % 5);
    std::int64_t clock = 0;
    std::vector<std::int64_t> free_at(static_cast<std::size_t>(threads), 0);
    for (int e = 0; e < total; ++e) {
      const int tid = static_cast<int>(rng() % threads);
      ctrie::HistoryEvent x;
      x.thread = tid;
      x.op = static_cast<ctrie::OpKind>(rng() % 3);
      x.key = rng() % 2;
      x.value = 1 + rng() % 3;
      x.invoke_ns = std::max<std::int64_t>(
          free_at[static_cast<std::size_t>(tid)],
          clock - static_cast<std::int64_t>(rng() % 40));
      x.return_ns = x.invoke_ns + 1 + static_cast<std::int64_t>(rng() % 60);
      clock = std::max(clock, x.return_ns);
      free_at[static_cast<std::size_t>(tid)] = x.return_ns + 1;
      if (x.op != ctrie::OpKind::insert) {
        x.res = rng() % 2 ? ctrie::ResKind::found : ctrie::ResKind::not_found;
        x.res_value = rng() % 3;
      }
      h.events.push_back(x);
    }
    const bool fast = ctrie::check_linearizable(h).accepted();
    const bool slow = tutil::permutation_filter_linearizable(h);
    if (fast != slow)
      return bad("disagreement on generated history " + std::to_string(i));
    ++agreed;
  }
  return ok(std::to_string(agreed) + "/200 histories: checker and "
            "permutation filter agree");
}

Outcome concurrent_stress() {
  Trie t;
  std::vector<std::thread> pool;
  for (int tid = 0; tid < 8; ++tid)
    pool.emplace_back([&t, tid] {
      std::mt19937_64 rng(0xabcdef ^ (tid * 7919));
      for (int i = 0; i < 100000; ++i) {
        const std::uint64_t k = rng() % 1024;
        switch (rng() % 100) {
          case 0 ... 44: t.insert(k, rng()); break;
          case 45 ... 79: (void)t.lookup(k); break;
          default: (void)t.remove(k); break;
        }
      }
    });
  for (auto& th : pool) th.join();
  const auto report = ctrie::validate(t);
  if (!report.ok())
    return bad(std::to_string(report.violations.size()) +
               " invariant violations after the stress run");
  const auto set = ctrie::to_set(t);
  return ok("8 threads x 100000 ops done; final set of " +
            std::to_string(set.size()) + " keys validates (" + kSanitizer +
            ")");
}

Outcome progress_smoke_pair() {
  Trie t;
  for (std::uint64_t k = 0; k < 64; ++k) t.insert(k, k);
  const auto good =
      ctrie::progress_smoke(t, 1, 3, 10000, std::chrono::seconds(30));
  if (!good.passed)
    return bad("trie finished only " + std::to_string(good.completed_ops) +
               "/10000 ops with a parked writer");
  ctrie::LockedHashMap locked;
  for (std::uint64_t k = 0; k < 64; ++k) locked.insert(k, k);
  const auto control =
      ctrie::progress_smoke(locked, 1, 3, 10000, std::chrono::seconds(30));
  if (control.passed)
    return bad("locked baseline made progress behind a parked lock holder");
  return ok("trie passed in " + std::to_string(good.elapsed_s).substr(0, 4) +
            " s; locked baseline wedged as expected (negative control)");
}

Outcome collision_handling() {
  const std::uint64_t h1 = 0x00000000feedbeefULL;
  const std::uint64_t h2 = h1 | (0x5ULL << 32);
  const std::uint64_t k1 = ctrie::unmix64(h1);
  const std::uint64_t k2 = ctrie::unmix64(h2);
  if (k1 == k2 || (ctrie::mix64(k1) & 0xffffffffu) !=
                      (ctrie::mix64(k2) & 0xffffffffu))
    return bad("collision engineering failed");
  Trie t;
  t.insert(k1, 100);
  t.insert(k2, 200);
  if (t.lookup(k1) != std::optional<std::uint64_t>(100) ||
      t.lookup(k2) != std::optional<std::uint64_t>(200))
    return bad("colliding keys are not independently retrievable");
  if (!ctrie::validate(t).ok()) return bad("collision state is invalid");
  if (t.remove(k1) != std::optional<std::uint64_t>(100))
    return bad("first colliding key failed to remove");
  if (t.lookup(k2) != std::optional<std::uint64_t>(200))
    return bad("removing one colliding key lost the other");
  if (t.remove(k2) != std::optional<std::uint64_t>(200))
    return bad("second colliding key failed to remove");
  if (!ctrie::validate(t).ok()) return bad("post-removal state is invalid");
  return ok("two keys sharing one 32-bit hash insert, resolve and remove "
            "independently");
}

Outcome scaling_direction() {
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw < 4)
    return {Outcome::skip,
            "machine reports " + std::to_string(hw) +
                " hardware threads (< 4)"};
  ctrie::BenchConfig cfg;
  cfg.scenario = ctrie::Scenario::lookup;
  cfg.structure = ctrie::StructureKind::ctrie;
  cfg.elements = 200000;
  cfg.reps = 5;
  cfg.warmup = 1;
  cfg.seed = 9;
  cfg.threads = 1;
  const auto one = ctrie::run_scenario(cfg);
  cfg.threads = 4;
  const auto four = ctrie::run_scenario(cfg);
  if (!one.ok() || !four.ok()) return bad("benchmark run failed");
  const double speedup = one.median_ms / four.median_ms;
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "lookup N=200k: P=1 %.1f ms, P=4 %.1f ms, speedup %.2fx",
                one.median_ms, four.median_ms, speedup);
  if (speedup < 1.3) return bad(std::string(buf) + " (< 1.3x)");
  return ok(buf);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"sequential-oracle-equivalence", sequential_oracle},
      {"invariant-snapshots", invariant_snapshots},
      {"compactness-after-removals", compactness},
      {"empty-after-delete", empty_after_delete},
      {"linearizability-corpus", linearizability_corpus},
      {"checker-cross-validation", checker_cross_validation},
      {"concurrent-stress", concurrent_stress},
      {"progress-smoke", progress_smoke_pair},
      {"collision-handling", collision_handling},
      {"scaling-direction", scaling_direction},
  };

  int failed = 0;
  int skipped = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome out = criteria[i].fn();
    const double secs =
        std::chrono::duration_cast<std::chrono::duration<double>>(
            std::chrono::steady_clock::now() - t0)
            .count();
    const char* tag = out.kind == Outcome::pass   ? "PASS"
                      : out.kind == Outcome::fail ? "FAIL"
                                                  : "SKIP";
    if (out.kind == Outcome::fail) ++failed;
    if (out.kind == Outcome::skip) ++skipped;
    std::printf("[%2zu/%zu] %s  %-32s %s (%.1fs)\n", i + 1, criteria.size(),
                tag, criteria[i].name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("RESULT: %zu passed, %d failed, %d skipped\n",
              criteria.size() - static_cast<std::size_t>(failed) -
                  static_cast<std::size_t>(skipped),
              failed, skipped);
  return failed == 0 ? 0 : 1;
}
