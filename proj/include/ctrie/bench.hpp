// Throughput benchmark driver: insert / remove / lookup / mixed scenarios
// over the concurrent trie and two single-lock baselines, with repetition,
// warmup, work-conservation accounting and per-scenario post-condition
// checks. Timing covers the parallel region only: from worker release to the
// last join.
//
// The lock-based maps exist as baselines for shape comparison and as the
// blocking negative control in the progress smoke test; they make no
// scalability claims.

#ifndef CTRIE_BENCH_HPP_INCLUDED
#define CTRIE_BENCH_HPP_INCLUDED

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ctrie/ctrie.hpp"
#include "ctrie/hash.hpp"
#include "ctrie/testhook.hpp"

namespace ctrie {

class LockedHashMap {
 public:
  void insert(std::uint64_t k, std::uint64_t v) {
    std::lock_guard<std::mutex> lk(mx_);
    CTRIE_PAUSE_POINT();
    map_[k] = v;
  }
  std::optional<std::uint64_t> lookup(std::uint64_t k) const {
    std::lock_guard<std::mutex> lk(mx_);
    CTRIE_PAUSE_POINT();
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::uint64_t> remove(std::uint64_t k) {
    std::lock_guard<std::mutex> lk(mx_);
    CTRIE_PAUSE_POINT();
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    std::uint64_t v = it->second;
    map_.erase(it);
    return v;
  }
  std::size_t size() const {
    std::lock_guard<std::mutex> lk(mx_);
    return map_.size();
  }

 private:
  mutable std::mutex mx_;
  std::unordered_map<std::uint64_t, std::uint64_t> map_;
};

class LockedOrderedMap {
 public:
  void insert(std::uint64_t k, std::uint64_t v) {
    std::lock_guard<std::mutex> lk(mx_);
    CTRIE_PAUSE_POINT();
    map_[k] = v;
  }
  std::optional<std::uint64_t> lookup(std::uint64_t k) const {
    std::lock_guard<std::mutex> lk(mx_);
    CTRIE_PAUSE_POINT();
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::uint64_t> remove(std::uint64_t k) {
    std::lock_guard<std::mutex> lk(mx_);
    CTRIE_PAUSE_POINT();
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    std::uint64_t v = it->second;
    map_.erase(it);
    return v;
  }
  std::size_t size() const {
    std::lock_guard<std::mutex> lk(mx_);
    return map_.size();
  }

 private:
  mutable std::mutex mx_;
  std::map<std::uint64_t, std::uint64_t> map_;
};

using BenchTrie = Ctrie<std::uint64_t, std::uint64_t, U64Hash>;

enum class Scenario : std::uint8_t { insert, remove, lookup, mixed };
enum class StructureKind : std::uint8_t { ctrie, locked_hash, locked_ordered };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::insert: return "insert";
    case Scenario::remove: return "remove";
    case Scenario::lookup: return "lookup";
    case Scenario::mixed: return "mixed";
  }
  return "?";
}

inline const char* to_string(StructureKind s) {
  switch (s) {
    case StructureKind::ctrie: return "ctrie";
    case StructureKind::locked_hash: return "locked-hash";
    case StructureKind::locked_ordered: return "locked-ordered";
  }
  return "?";
}

inline std::optional<Scenario> parse_scenario(const std::string& s) {
  if (s == "insert") return Scenario::insert;
  if (s == "remove") return Scenario::remove;
  if (s == "lookup") return Scenario::lookup;
  if (s == "mixed") return Scenario::mixed;
  return std::nullopt;
}

inline std::optional<StructureKind> parse_structure(const std::string& s) {
  if (s == "ctrie") return StructureKind::ctrie;
  if (s == "locked-hash") return StructureKind::locked_hash;
  if (s == "locked-ordered") return StructureKind::locked_ordered;
  return std::nullopt;
}

struct BenchConfig {
  Scenario scenario = Scenario::insert;
  StructureKind structure = StructureKind::ctrie;
  std::uint64_t elements = 50'000;  // N
  unsigned threads = 1;             // P
  unsigned ratio = 0;               // r: lookups per insert (mixed only)
  unsigned reps = 5;
  unsigned warmup = 1;
  std::uint64_t seed = 1;
};

inline std::optional<std::string> validate_config(const BenchConfig& c) {
  if (c.threads < 1) return "threads must be >= 1";
  if (c.elements < c.threads) return "elements must be >= threads";
  if (c.reps < 3) return "reps must be >= 3 (median over at least 3 runs)";
  return std::nullopt;
}

struct BenchRow {
  BenchConfig config;
  std::vector<double> rep_ms;
  double median_ms = 0.0;
  double min_ms = 0.0;
  std::uint64_t total_ops = 0;  // per repetition, exact
  unsigned hardware_threads = 0;
  std::string error;

  bool ok() const { return error.empty(); }
};

namespace bench_detail {

// Distinct 64-bit keys, reproducible from the seed: consecutive outputs of
// the splitmix64 stream, which is injective in the counter.
inline std::vector<std::uint64_t> make_keys(std::uint64_t n,
                                            std::uint64_t seed) {
  std::vector<std::uint64_t> keys;
  keys.reserve(n);
  std::uint64_t state = seed;
  for (std::uint64_t i = 0; i < n; ++i) {
    state += 0x9e3779b97f4a7c15ULL;
    keys.push_back(mix64(state));
  }
  return keys;
}

struct Slice {
  std::uint64_t begin;
  std::uint64_t end;
};

inline Slice slice_for(std::uint64_t n, unsigned threads, unsigned tid) {
  const std::uint64_t base = n / threads;
  const std::uint64_t extra = n % threads;
  const std::uint64_t begin = tid * base + std::min<std::uint64_t>(tid, extra);
  const std::uint64_t len = base + (tid < extra ? 1 : 0);
  return Slice{begin, begin + len};
}

// Runs `work(tid)` on `threads` workers; returns the wall time in ms from
// worker release to the last join.
template <class Fn>
double parallel_region_ms(unsigned threads, const Fn& work) {
  std::atomic<unsigned> ready{0};
  std::atomic<bool> go{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned tid = 0; tid < threads; ++tid) {
    pool.emplace_back([&, tid] {
      ready.fetch_add(1);
      while (!go.load(std::memory_order_acquire)) std::this_thread::yield();
      work(tid);
    });
  }
  while (ready.load() != threads) std::this_thread::yield();
  const auto t0 = std::chrono::steady_clock::now();
  go.store(true, std::memory_order_release);
  for (auto& t : pool) t.join();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
             t1 - t0)
      .count();
}

template <class MapT>
bool root_relaxed_or_absent(const MapT&) {
  return true;
}
inline bool root_relaxed_or_absent(const BenchTrie& t) {
  const auto* r = t.quiescent_root();
  return r == nullptr || r->main.load(std::memory_order_relaxed) == nullptr;
}

// One timed repetition; fills `err` and returns a negative time on a failed
// post-condition or accounting check.
template <class MapT>
double run_rep(const BenchConfig& cfg,
               const std::vector<std::uint64_t>& keys, std::string& err) {
  MapT map;
  const std::uint64_t n = cfg.elements;
  std::atomic<std::uint64_t> ops{0};
  std::atomic<std::uint64_t> found{0};
  double ms = 0.0;

  switch (cfg.scenario) {
    case Scenario::insert: {
      ms = parallel_region_ms(cfg.threads, [&](unsigned tid) {
        const Slice s = slice_for(n, cfg.threads, tid);
        std::uint64_t done = 0;
        for (std::uint64_t i = s.begin; i < s.end; ++i, ++done)
          map.insert(keys[i], i);
        ops.fetch_add(done);
      });
      if (ops.load() != n) {
        err = "insert: executed " + std::to_string(ops.load()) +
              " ops, expected " + std::to_string(n);
        return -1.0;
      }
      for (std::uint64_t i = 0; i < n; ++i)
        if (map.lookup(keys[i]) != std::optional<std::uint64_t>(i)) {
          err = "insert: key " + std::to_string(i) + " missing afterwards";
          return -1.0;
        }
      break;
    }
    case Scenario::remove: {
      for (std::uint64_t i = 0; i < n; ++i) map.insert(keys[i], i);  // untimed
      ms = parallel_region_ms(cfg.threads, [&](unsigned tid) {
        const Slice s = slice_for(n, cfg.threads, tid);
        std::uint64_t done = 0, hits = 0;
        for (std::uint64_t i = s.begin; i < s.end; ++i, ++done)
          if (map.remove(keys[i]).has_value()) ++hits;
        ops.fetch_add(done);
        found.fetch_add(hits);
      });
      if (ops.load() != n || found.load() != n) {
        err = "remove: " + std::to_string(found.load()) + "/" +
              std::to_string(n) + " removals found their key";
        return -1.0;
      }
      for (std::uint64_t i = 0; i < n; ++i)
        if (map.lookup(keys[i]).has_value()) {
          err = "remove: structure not empty afterwards";
          return -1.0;
        }
      if (!root_relaxed_or_absent(map)) {
        err = "remove: trie root neither absent nor a null-inode";
        return -1.0;
      }
      break;
    }
    case Scenario::lookup: {
      for (std::uint64_t i = 0; i < n; ++i) map.insert(keys[i], i);  // untimed
      ms = parallel_region_ms(cfg.threads, [&](unsigned tid) {
        const Slice s = slice_for(n, cfg.threads, tid);
        std::uint64_t done = 0, hits = 0;
        for (std::uint64_t i = s.begin; i < s.end; ++i, ++done)
          if (map.lookup(keys[i]).has_value()) ++hits;
        ops.fetch_add(done);
        found.fetch_add(hits);
      });
      if (ops.load() != n || found.load() != n) {
        err = "lookup: " + std::to_string(found.load()) + "/" +
              std::to_string(n) + " lookups found their key";
        return -1.0;
      }
      break;
    }
    case Scenario::mixed: {
      // Every insert is chased by `ratio` lookups of random elements.
      ms = parallel_region_ms(cfg.threads, [&](unsigned tid) {
        const Slice s = slice_for(n, cfg.threads, tid);
        std::mt19937_64 rng(mix64(cfg.seed) ^ (tid + 1));
        std::uint64_t done = 0;
        for (std::uint64_t i = s.begin; i < s.end; ++i) {
          map.insert(keys[i], i);
          ++done;
          for (unsigned r = 0; r < cfg.ratio; ++r) {
            (void)map.lookup(keys[rng() % n]);
            ++done;
          }
        }
        ops.fetch_add(done);
      });
      const std::uint64_t expect = n + n * cfg.ratio;
      if (ops.load() != expect) {
        err = "mixed: executed " + std::to_string(ops.load()) +
              " ops, expected " + std::to_string(expect);
        return -1.0;
      }
      break;
    }
  }
  return ms;
}

template <class MapT>
void run_structure(const BenchConfig& cfg,
                   const std::vector<std::uint64_t>& keys, BenchRow& row) {
  for (unsigned w = 0; w < cfg.warmup; ++w) {
    std::string err;
    if (run_rep<MapT>(cfg, keys, err) < 0) {
      row.error = err;
      return;
    }
  }
  for (unsigned rep = 0; rep < cfg.reps; ++rep) {
    std::string err;
    const double ms = run_rep<MapT>(cfg, keys, err);
    if (ms < 0) {
      row.error = err;
      return;
    }
    row.rep_ms.push_back(ms);
  }
}

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace bench_detail

inline BenchRow run_scenario(const BenchConfig& cfg) {
  BenchRow row;
  row.config = cfg;
  row.hardware_threads = std::thread::hardware_concurrency();
  if (auto err = validate_config(cfg)) {
    row.error = *err;
    return row;
  }
  const auto keys = bench_detail::make_keys(cfg.elements, cfg.seed);
  switch (cfg.structure) {
    case StructureKind::ctrie:
      bench_detail::run_structure<BenchTrie>(cfg, keys, row);
      break;
    case StructureKind::locked_hash:
      bench_detail::run_structure<LockedHashMap>(cfg, keys, row);
      break;
    case StructureKind::locked_ordered:
      bench_detail::run_structure<LockedOrderedMap>(cfg, keys, row);
      break;
  }
  if (!row.ok()) return row;
  row.median_ms = bench_detail::median(row.rep_ms);
  row.min_ms = *std::min_element(row.rep_ms.begin(), row.rep_ms.end());
  row.total_ops = cfg.scenario == Scenario::mixed
                      ? cfg.elements + cfg.elements * cfg.ratio
                      : cfg.elements;
  return row;
}

enum class SweepAxis : std::uint8_t { elements, threads, ratio };

inline std::optional<SweepAxis> parse_axis(const std::string& s) {
  if (s == "elements") return SweepAxis::elements;
  if (s == "threads") return SweepAxis::threads;
  if (s == "ratio") return SweepAxis::ratio;
  return std::nullopt;
}

// One row per point per structure; a failing point becomes a row with the
// error column set and the sweep continues.
inline std::vector<BenchRow> sweep(SweepAxis axis, const BenchConfig& base,
                                   const std::vector<std::uint64_t>& points) {
  static constexpr StructureKind kAll[] = {StructureKind::ctrie,
                                           StructureKind::locked_hash,
                                           StructureKind::locked_ordered};
  std::vector<BenchRow> rows;
  for (const std::uint64_t p : points) {
    for (const StructureKind s : kAll) {
      BenchConfig cfg = base;
      cfg.structure = s;
      switch (axis) {
        case SweepAxis::elements: cfg.elements = p; break;
        case SweepAxis::threads: cfg.threads = static_cast<unsigned>(p); break;
        case SweepAxis::ratio: cfg.ratio = static_cast<unsigned>(p); break;
      }
      rows.push_back(run_scenario(cfg));
    }
  }
  return rows;
}

inline void write_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
  os << "scenario,structure,N,P,r,rep,median_ms,min_ms,error\n";
  for (const BenchRow& row : rows) {
    const BenchConfig& c = row.config;
    os << to_string(c.scenario) << ',' << to_string(c.structure) << ','
       << c.elements << ',' << c.threads << ',' << c.ratio << ',' << c.reps
       << ',';
    if (row.ok()) {
      os << row.median_ms << ',' << row.min_ms << ',';
    } else {
      std::string quoted = row.error;
      std::replace(quoted.begin(), quoted.end(), '"', '\'');
      os << ",,\"" << quoted << '"';
    }
    os << '\n';
  }
}

}  // namespace ctrie

#endif  // CTRIE_BENCH_HPP_INCLUDED
