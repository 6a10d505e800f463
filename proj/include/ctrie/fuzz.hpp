// Sequential differential fuzzing: a seeded stream of random operations runs
// against the trie and the reference model in lockstep; any difference in a
// per-operation result or in the final key set is a bug in the trie.

#ifndef CTRIE_FUZZ_HPP_INCLUDED
#define CTRIE_FUZZ_HPP_INCLUDED

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <type_traits>

#include "ctrie/model_map.hpp"
#include "ctrie/validate.hpp"

namespace ctrie {

struct FuzzReport {
  bool ok = true;
  std::uint64_t seed = 0;
  std::uint64_t ops_executed = 0;
  std::uint64_t divergence_index = 0;  // first diverging op when !ok
  std::string detail;
};

// Operation mix: 45% insert, 35% lookup, 20% remove.
enum class FuzzOp : std::uint8_t { insert, lookup, remove };

inline FuzzOp fuzz_pick_op(std::mt19937_64& rng) {
  const std::uint64_t roll = rng() % 100;
  if (roll < 45) return FuzzOp::insert;
  if (roll < 80) return FuzzOp::lookup;
  return FuzzOp::remove;
}

// Runs `n_ops` seeded operations over keys in [0, key_space) against `trie`
// and the model. `observer`, when given, is called every `observe_every` ops
// (and once at the end) with the op index; the trie is quiescent during the
// call. Deterministic for a fixed seed.
template <class TrieT>
FuzzReport sequential_fuzz(
    TrieT& trie, std::uint64_t seed, std::uint64_t n_ops,
    std::uint64_t key_space,
    const std::function<void(std::uint64_t, std::type_identity_t<TrieT>&)>&
        observer = {},
    std::uint64_t observe_every = 0) {
  FuzzReport report;
  report.seed = seed;
  std::mt19937_64 rng(seed);
  ModelMap model;

  const auto diverge = [&](std::uint64_t i, std::string what) {
    report.ok = false;
    report.divergence_index = i;
    report.detail = std::move(what);
  };

  for (std::uint64_t i = 0; i < n_ops; ++i) {
    const FuzzOp op = fuzz_pick_op(rng);
    const std::uint64_t k = rng() % key_space;
    report.ops_executed = i + 1;
    switch (op) {
      case FuzzOp::insert: {
        const std::uint64_t v = rng();
        trie.insert(k, v);
        model.insert(k, v);
        break;
      }
      case FuzzOp::lookup: {
        const auto got = trie.lookup(k);
        const auto want = model.lookup(k);
        if (got != want) {
          diverge(i, "lookup(" + std::to_string(k) + ") mismatch");
          return report;
        }
        break;
      }
      case FuzzOp::remove: {
        const auto got = trie.remove(k);
        const auto want = model.remove(k);
        if (got != want) {
          diverge(i, "remove(" + std::to_string(k) + ") mismatch");
          return report;
        }
        break;
      }
    }
    if (observer && observe_every != 0 && (i + 1) % observe_every == 0)
      observer(i + 1, trie);
  }

  auto trie_set = to_set(trie);
  auto model_set = model.entries();
  std::sort(trie_set.begin(), trie_set.end());
  std::sort(model_set.begin(), model_set.end());
  if (trie_set != model_set) {
    diverge(n_ops, "final key set differs from the model (" +
                       std::to_string(trie_set.size()) + " vs " +
                       std::to_string(model_set.size()) + " entries)");
    return report;
  }
  if (observer) observer(n_ops, trie);
  return report;
}

}  // namespace ctrie

#endif  // CTRIE_FUZZ_HPP_INCLUDED
