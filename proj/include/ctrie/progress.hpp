// Progress smoke test: parks a configurable number of threads at the pause
// point between a main-cell read and its CAS, then checks whether the
// remaining threads still push operations through. A lock-free structure
// passes; a lock-based one wedges behind the parked lock holder. This is a
// regression smoke test, not a proof.
//
// Requires the pause hook, so it only exists in test builds.

#ifndef CTRIE_PROGRESS_HPP_INCLUDED
#define CTRIE_PROGRESS_HPP_INCLUDED

#if !defined(CTRIE_TEST_PAUSE_HOOK)
#error "progress.hpp needs CTRIE_TEST_PAUSE_HOOK (a test-build facility)"
#endif

#include <atomic>
#include <chrono>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "ctrie/testhook.hpp"

namespace ctrie {

struct ProgressReport {
  bool passed = false;
  std::uint64_t completed_ops = 0;
  double elapsed_s = 0.0;
  unsigned parked = 0;
};

namespace progress_detail {

struct Park {
  std::atomic<bool> release{false};
  std::atomic<unsigned> parked{0};

  static thread_local bool is_victim;

  static void hook(void* ctx) {
    auto* self = static_cast<Park*>(ctx);
    if (!is_victim || self->release.load(std::memory_order_acquire)) return;
    is_victim = false;  // park exactly once
    self->parked.fetch_add(1);
    self->release.wait(false);
  }
};

inline thread_local bool Park::is_victim = false;

}  // namespace progress_detail

// `paused_threads` workers are parked mid-operation; `active_threads`
// workers must jointly complete `budget_ops` within `timeout`.
template <class MapT>
ProgressReport progress_smoke(MapT& map, unsigned paused_threads,
                              unsigned active_threads,
                              std::uint64_t budget_ops,
                              std::chrono::milliseconds timeout,
                              std::uint64_t key_space = 64,
                              std::uint64_t seed = 1) {
  using clock = std::chrono::steady_clock;
  progress_detail::Park park;
  testhook::ScopedPauseHook hook(&progress_detail::Park::hook, &park);

  ProgressReport report;
  std::vector<std::thread> victims;
  victims.reserve(paused_threads);
  for (unsigned i = 0; i < paused_threads; ++i) {
    victims.emplace_back([&map, i] {
      progress_detail::Park::is_victim = true;
      map.insert(1 + i, 0xdeadu + i);  // parks at the pre-CAS pause point
      progress_detail::Park::is_victim = false;
    });
  }
  // Wait for the adversary to be in place. With a lock-based structure only
  // the first victim can reach the pause point, so give up after a grace
  // period rather than requiring all of them.
  const auto park_deadline = clock::now() + std::chrono::seconds(2);
  while (park.parked.load() < paused_threads && clock::now() < park_deadline)
    std::this_thread::yield();
  report.parked = park.parked.load();

  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> completed{0};
  std::vector<std::thread> actives;
  actives.reserve(active_threads);
  const auto t0 = clock::now();
  for (unsigned tid = 0; tid < active_threads; ++tid) {
    actives.emplace_back([&, tid] {
      std::mt19937_64 rng(mix64(seed) ^ (tid + 100));
      while (!stop.load(std::memory_order_relaxed)) {
        const std::uint64_t k = rng() % key_space;
        switch (rng() % 3) {
          case 0: map.insert(k, rng()); break;
          case 1: (void)map.lookup(k); break;
          default: (void)map.remove(k); break;
        }
        if (completed.fetch_add(1) + 1 >= budget_ops) {
          stop.store(true, std::memory_order_relaxed);
          break;
        }
      }
    });
  }

  for (;;) {
    const std::uint64_t done = completed.load();
    const auto elapsed = clock::now() - t0;
    if (done >= budget_ops || elapsed >= timeout) {
      report.passed = done >= budget_ops;
      report.completed_ops = done;
      report.elapsed_s =
          std::chrono::duration_cast<std::chrono::duration<double>>(elapsed)
              .count();
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }

  stop.store(true);
  park.release.store(true);
  park.release.notify_all();
  for (auto& t : victims) t.join();
  for (auto& t : actives) t.join();
  return report;
}

}  // namespace ctrie

#endif  // CTRIE_PROGRESS_HPP_INCLUDED
