// Concurrent history recording: worker threads hammer one shared trie while
// every call is bracketed with monotonic timestamps. The resulting event log
// feeds the linearizability checker and can be dumped as JSON Lines.

#ifndef CTRIE_HISTORY_HPP_INCLUDED
#define CTRIE_HISTORY_HPP_INCLUDED

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ctrie/fuzz.hpp"

namespace ctrie {

enum class OpKind : std::uint8_t { insert, lookup, remove };
enum class ResKind : std::uint8_t { unit, found, not_found };

struct HistoryEvent {
  int thread = 0;
  OpKind op = OpKind::insert;
  std::uint64_t key = 0;
  std::uint64_t value = 0;      // insert argument
  ResKind res = ResKind::unit;
  std::uint64_t res_value = 0;  // found payload
  std::int64_t invoke_ns = 0;
  std::int64_t return_ns = 0;
};

struct History {
  std::vector<HistoryEvent> events;
  std::vector<std::uint64_t> key_space;  // the keys the workers drew from
};

inline const char* to_string(OpKind op) {
  switch (op) {
    case OpKind::insert: return "insert";
    case OpKind::lookup: return "lookup";
    case OpKind::remove: return "remove";
  }
  return "?";
}

// Per-thread events must be time-ordered and non-overlapping, and every
// event must be complete.
inline bool well_formed(const History& h, std::string* why = nullptr) {
  const auto fail = [&](std::string msg) {
    if (why != nullptr) *why = std::move(msg);
    return false;
  };
  std::vector<std::int64_t> last_return;
  for (std::size_t i = 0; i < h.events.size(); ++i) {
    const HistoryEvent& e = h.events[i];
    if (e.invoke_ns >= e.return_ns)
      return fail("event " + std::to_string(i) + " has invoke >= return");
    if (e.thread < 0) return fail("negative thread id");
    if (static_cast<std::size_t>(e.thread) >= last_return.size())
      last_return.resize(static_cast<std::size_t>(e.thread) + 1,
                         INT64_MIN);
    auto& prev = last_return[static_cast<std::size_t>(e.thread)];
    if (e.invoke_ns < prev)
      return fail("thread " + std::to_string(e.thread) +
                  " events overlap or are out of order");
    prev = e.return_ns;
  }
  return true;
}

// Launches `threads` workers over one shared trie, `ops_per_thread` seeded
// random operations each, and returns the merged, per-thread-ordered log.
// Insert values are unique per event so the checker has something to bite on.
template <class TrieT>
History record_history(TrieT& trie, unsigned threads,
                       unsigned ops_per_thread, std::uint64_t key_space,
                       std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto now_ns = [&t0] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() -
                                                                t0)
        .count();
  };

  std::vector<std::vector<HistoryEvent>> logs(threads);
  std::atomic<unsigned> ready{0};
  std::atomic<bool> go{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned tid = 0; tid < threads; ++tid) {
    pool.emplace_back([&, tid] {
      std::mt19937_64 rng(mix64(seed) ^ (0x9e3779b97f4a7c15ULL * (tid + 1)));
      auto& log = logs[tid];
      log.reserve(ops_per_thread);
      ready.fetch_add(1);
      while (!go.load(std::memory_order_acquire)) std::this_thread::yield();
      for (unsigned i = 0; i < ops_per_thread; ++i) {
        HistoryEvent e;
        e.thread = static_cast<int>(tid);
        e.op = static_cast<OpKind>(fuzz_pick_op(rng));
        e.key = rng() % key_space;
        if (e.op == OpKind::insert)
          e.value = (static_cast<std::uint64_t>(tid) << 32) | (i + 1);
        e.invoke_ns = now_ns();
        switch (e.op) {
          case OpKind::insert:
            trie.insert(e.key, e.value);
            e.res = ResKind::unit;
            break;
          case OpKind::lookup: {
            auto r = trie.lookup(e.key);
            e.res = r.has_value() ? ResKind::found : ResKind::not_found;
            e.res_value = r.value_or(0);
            break;
          }
          case OpKind::remove: {
            auto r = trie.remove(e.key);
            e.res = r.has_value() ? ResKind::found : ResKind::not_found;
            e.res_value = r.value_or(0);
            break;
          }
        }
        e.return_ns = now_ns();
        if (e.return_ns <= e.invoke_ns) e.return_ns = e.invoke_ns + 1;
        log.push_back(e);
      }
    });
  }
  while (ready.load() != threads) std::this_thread::yield();
  go.store(true, std::memory_order_release);
  for (auto& t : pool) t.join();

  History h;
  for (auto& log : logs)
    h.events.insert(h.events.end(), log.begin(), log.end());
  h.key_space.reserve(key_space);
  for (std::uint64_t k = 0; k < key_space; ++k) h.key_space.push_back(k);
  return h;
}

// One event per line:
// {"t":0,"op":"insert","k":3,"v":42,"res":null,"inv":120,"ret":180}
// res is the found value, "notfound", or null for inserts.
inline void dump_jsonl(const History& h, std::ostream& os) {
  for (const HistoryEvent& e : h.events) {
    os << "{\"t\":" << e.thread << ",\"op\":\"" << to_string(e.op)
       << "\",\"k\":" << e.key;
    if (e.op == OpKind::insert)
      os << ",\"v\":" << e.value;
    else
      os << ",\"v\":null";
    os << ",\"res\":";
    switch (e.res) {
      case ResKind::unit: os << "null"; break;
      case ResKind::found: os << e.res_value; break;
      case ResKind::not_found: os << "\"notfound\""; break;
    }
    os << ",\"inv\":" << e.invoke_ns << ",\"ret\":" << e.return_ns << "}\n";
  }
}

}  // namespace ctrie

#endif  // CTRIE_HISTORY_HPP_INCLUDED
