// Shared-library implementation of the C interface: a concrete uint64->uint64
// instantiation of the trie plus drivers for the verification harness and the
// benchmark CLI.

#include "ctrie.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "ctrie/bench.hpp"
#include "ctrie/ctrie.hpp"
#include "ctrie/fuzz.hpp"
#include "ctrie/hash.hpp"
#include "ctrie/history.hpp"
#include "ctrie/lincheck.hpp"
#include "ctrie/validate.hpp"

using Trie = ctrie::Ctrie<uint64_t, uint64_t, ctrie::U64Hash>;

struct ctrie_map {
  Trie trie;
};

extern "C" ctrie_map* ctrie_new(void) { return new ctrie_map; }

extern "C" void ctrie_free(ctrie_map* t) { delete t; }

extern "C" ctrie_status ctrie_insert(ctrie_map* t, uint64_t key, uint64_t value) {
  if (t == nullptr) return CTRIE_EINVAL;
  t->trie.insert(key, value);
  return CTRIE_OK;
}

extern "C" ctrie_status ctrie_lookup(const ctrie_map* t, uint64_t key,
                                     uint64_t* value_out) {
  if (t == nullptr) return CTRIE_EINVAL;
  const auto v = t->trie.lookup(key);
  if (!v.has_value()) return CTRIE_NOT_FOUND;
  if (value_out != nullptr) *value_out = *v;
  return CTRIE_OK;
}

extern "C" ctrie_status ctrie_remove(ctrie_map* t, uint64_t key,
                                     uint64_t* old_value_out) {
  if (t == nullptr) return CTRIE_EINVAL;
  const auto v = t->trie.remove(key);
  if (!v.has_value()) return CTRIE_NOT_FOUND;
  if (old_value_out != nullptr) *old_value_out = *v;
  return CTRIE_OK;
}

extern "C" ctrie_status ctrie_get_metrics(const ctrie_map* t,
                                          ctrie_metrics* out) {
  if (t == nullptr || out == nullptr) return CTRIE_EINVAL;
  const ctrie::StateMetrics m = ctrie::state_metrics(t->trie);
  out->null_inodes = m.null_inodes;
  out->tomb_inodes = m.tomb_inodes;
  out->live_inodes = m.live_inodes;
  out->single_tips = m.single_tips;
  out->total_path_length = m.total_path_length;
  out->tips = ctrie::tip_count(t->trie);
  return CTRIE_OK;
}

extern "C" long ctrie_validate(const ctrie_map* t, char* json_out,
                               size_t json_cap) {
  if (t == nullptr) return -1;
  const ctrie::InvariantReport report = ctrie::validate(t->trie);
  const ctrie::StateMetrics m = ctrie::state_metrics(t->trie);
  const uint64_t tips = ctrie::tip_count(t->trie);
  if (json_out != nullptr && json_cap > 0) {
    std::snprintf(json_out, json_cap,
                  "{\"n\":%llu,\"t\":%llu,\"l\":%llu,\"r\":%llu,\"d\":%llu,"
                  "\"tips\":%llu,\"violations\":%zu}",
                  static_cast<unsigned long long>(m.null_inodes),
                  static_cast<unsigned long long>(m.tomb_inodes),
                  static_cast<unsigned long long>(m.live_inodes),
                  static_cast<unsigned long long>(m.single_tips),
                  static_cast<unsigned long long>(m.total_path_length),
                  static_cast<unsigned long long>(tips),
                  report.violations.size());
  }
  return static_cast<long>(report.violations.size());
}

extern "C" ctrie_status ctrie_fuzz(uint64_t seed, uint64_t ops,
                                   uint64_t key_space,
                                   ctrie_fuzz_report* out) {
  if (out == nullptr || ops == 0 || key_space == 0) return CTRIE_EINVAL;
  Trie trie;
  const ctrie::FuzzReport r = ctrie::sequential_fuzz(trie, seed, ops, key_space);
  out->ops_executed = r.ops_executed;
  out->diverged = r.ok ? 0 : 1;
  out->divergence_index = r.divergence_index;
  std::snprintf(out->detail, sizeof out->detail, "%s",
                r.ok ? "clean" : r.detail.c_str());
  return r.ok ? CTRIE_OK : CTRIE_ECHECK;
}

extern "C" ctrie_status ctrie_lincheck(unsigned threads,
                                       unsigned ops_per_thread,
                                       uint64_t key_space, unsigned rounds,
                                       uint64_t seed,
                                       const char* histories_jsonl_path,
                                       ctrie_lincheck_report* out) {
  if (out == nullptr || threads < 2 || ops_per_thread == 0 ||
      key_space == 0 || rounds == 0)
    return CTRIE_EINVAL;
  if (static_cast<uint64_t>(threads) * ops_per_thread > ctrie::kMaxLinEvents)
    return CTRIE_EINVAL;

  std::ofstream dump;
  if (histories_jsonl_path != nullptr) {
    dump.open(histories_jsonl_path, std::ios::out | std::ios::trunc);
    if (!dump) return CTRIE_EIO;
  }

  out->rounds_run = 0;
  out->rounds_accepted = 0;
  out->first_rejected_round = -1;
  for (unsigned round = 0; round < rounds; ++round) {
    Trie trie;
    const ctrie::History h = ctrie::record_history(
        trie, threads, ops_per_thread, key_space, seed + round);
    if (dump.is_open()) ctrie::dump_jsonl(h, dump);
    const ctrie::LinResult res = ctrie::check_linearizable(h);
    out->rounds_run += 1;
    if (res.accepted()) {
      out->rounds_accepted += 1;
    } else if (out->first_rejected_round < 0) {
      out->first_rejected_round = static_cast<int64_t>(round);
    }
  }
  return out->rounds_accepted == out->rounds_run ? CTRIE_OK : CTRIE_ECHECK;
}

namespace {

bool fill_config(const ctrie_bench_spec* spec, ctrie::BenchConfig& cfg) {
  if (spec == nullptr || spec->scenario == nullptr ||
      spec->structure == nullptr)
    return false;
  const auto scenario = ctrie::parse_scenario(spec->scenario);
  const auto structure = ctrie::parse_structure(spec->structure);
  if (!scenario || !structure) return false;
  cfg.scenario = *scenario;
  cfg.structure = *structure;
  cfg.elements = spec->elements;
  cfg.threads = spec->threads;
  cfg.ratio = spec->ratio;
  cfg.reps = spec->reps;
  cfg.warmup = spec->warmup;
  cfg.seed = spec->seed;
  return !ctrie::validate_config(cfg).has_value();
}

}  // namespace

extern "C" ctrie_status ctrie_bench(const ctrie_bench_spec* spec,
                                    ctrie_bench_result* out) {
  if (out == nullptr) return CTRIE_EINVAL;
  ctrie::BenchConfig cfg;
  if (!fill_config(spec, cfg)) return CTRIE_EINVAL;
  const ctrie::BenchRow row = ctrie::run_scenario(cfg);
  if (!row.ok()) return CTRIE_ECHECK;
  out->median_ms = row.median_ms;
  out->min_ms = row.min_ms;
  out->total_ops = row.total_ops;
  out->hardware_threads = row.hardware_threads;
  return CTRIE_OK;
}

extern "C" ctrie_status ctrie_bench_csv(const ctrie_bench_spec* spec,
                                        const char* axis,
                                        const uint64_t* points,
                                        size_t n_points,
                                        const char* csv_path) {
  if (csv_path == nullptr) return CTRIE_EINVAL;
  ctrie::BenchConfig cfg;
  if (!fill_config(spec, cfg)) return CTRIE_EINVAL;

  std::vector<ctrie::BenchRow> rows;
  if (axis == nullptr) {
    rows.push_back(ctrie::run_scenario(cfg));
  } else {
    const auto ax = ctrie::parse_axis(axis);
    if (!ax || points == nullptr || n_points == 0) return CTRIE_EINVAL;
    rows = ctrie::sweep(*ax, cfg,
                        std::vector<uint64_t>(points, points + n_points));
  }

  std::ofstream os(csv_path, std::ios::out | std::ios::trunc);
  if (!os) return CTRIE_EIO;
  ctrie::write_csv(rows, os);
  return os.good() ? CTRIE_OK : CTRIE_EIO;
}
