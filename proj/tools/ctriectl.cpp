// ctriectl: command-line front end over the shared C interface.
//
//   ctriectl validate --seed S --ops N --keys K
//   ctriectl metrics  --seed S --ops N --keys K
//   ctriectl fuzz     --seed S --ops N --keys K
//   ctriectl lincheck --threads T --ops-per-thread M --keys K --rounds R
//                     --seed S [--dump-histories PATH]
//   ctriectl bench    --scenario insert|remove|lookup|mixed
//                     --structure ctrie|locked-hash|locked-ordered
//                     --elements N --threads P [--ratio r] [--reps k]
//                     [--warmup w] [--seed s] [--csv path]
//
// bench accepts a comma-separated list for exactly one of
// --elements/--threads/--ratio and sweeps that axis across all structures
// (requires --csv). Exit codes: 0 success, 1 a check failed, 2 bad
// configuration.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctrie.h"

namespace {

// Seeded warm-up traffic so validate/metrics have a populated structure to
// inspect. Mirrors the fuzzer's 45/35/20 op mix.
void run_workload(ctrie_map* t, std::uint64_t seed, std::uint64_t ops,
                  std::uint64_t keys) {
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < ops; ++i) {
    const std::uint64_t roll = rng() % 100;
    const std::uint64_t k = rng() % keys;
    if (roll < 45)
      ctrie_insert(t, k, rng());
    else if (roll < 80)
      ctrie_lookup(t, k, nullptr);
    else
      ctrie_remove(t, k, nullptr);
  }
}

std::vector<std::uint64_t> parse_points(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t end = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, end == std::string::npos ? std::string::npos
                                                 : end - pos);
    if (!tok.empty()) out.push_back(std::stoull(tok));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lock-free concurrent hash trie toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::uint64_t ops = 10'000;
  std::uint64_t keys = 1024;

  auto add_workload_opts = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "rng seed");
    cmd->add_option("--ops", ops, "operations to run");
    cmd->add_option("--keys", keys, "key space size");
  };

  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "run a seeded workload, then check structural invariants");
  add_workload_opts(validate_cmd);
  CLI::App* metrics_cmd = app.add_subcommand(
      "metrics", "run a seeded workload, then print state metrics");
  add_workload_opts(metrics_cmd);
  CLI::App* fuzz_cmd = app.add_subcommand(
      "fuzz", "differential fuzz against the reference model");
  add_workload_opts(fuzz_cmd);

  unsigned threads = 4;
  unsigned ops_per_thread = 8;
  unsigned rounds = 100;
  std::string dump_path;
  CLI::App* lincheck_cmd =
      app.add_subcommand("lincheck", "record concurrent histories and check "
                                     "them for linearizability");
  lincheck_cmd->add_option("--threads", threads, "worker threads per round");
  lincheck_cmd->add_option("--ops-per-thread", ops_per_thread,
                           "operations per worker");
  lincheck_cmd->add_option("--keys", keys, "key space size");
  lincheck_cmd->add_option("--rounds", rounds, "independent rounds");
  lincheck_cmd->add_option("--seed", seed, "rng seed");
  lincheck_cmd->add_option("--dump-histories", dump_path,
                           "append every event as JSON Lines");

  std::string scenario = "insert";
  std::string structure = "ctrie";
  std::string elements_arg = "50000";
  std::string threads_arg = "1";
  std::string ratio_arg = "0";
  unsigned reps = 5;
  unsigned warmup = 1;
  std::string csv_path;
  CLI::App* bench_cmd = app.add_subcommand("bench", "throughput benchmarks");
  bench_cmd->add_option("--scenario", scenario,
                        "insert | remove | lookup | mixed");
  bench_cmd->add_option("--structure", structure,
                        "ctrie | locked-hash | locked-ordered");
  bench_cmd->add_option("--elements", elements_arg,
                        "N, or comma list to sweep");
  bench_cmd->add_option("--threads", threads_arg,
                        "P, or comma list to sweep");
  bench_cmd->add_option("--ratio", ratio_arg,
                        "lookups per insert (mixed), or comma list to sweep");
  bench_cmd->add_option("--reps", reps, "timed repetitions (>= 3)");
  bench_cmd->add_option("--warmup", warmup, "warmup rounds");
  bench_cmd->add_option("--seed", seed, "key generator seed");
  bench_cmd->add_option("--csv", csv_path, "write rows as CSV");

  CLI11_PARSE(app, argc, argv);

  if (validate_cmd->parsed() || metrics_cmd->parsed()) {
    ctrie_map* t = ctrie_new();
    run_workload(t, seed, ops, keys);
    char json[256];
    const long violations = ctrie_validate(t, json, sizeof json);
    ctrie_free(t);
    if (violations < 0) return 2;
    std::printf("%s\n", json);
    return validate_cmd->parsed() && violations > 0 ? 1 : 0;
  }

  if (fuzz_cmd->parsed()) {
    ctrie_fuzz_report report;
    const ctrie_status st = ctrie_fuzz(seed, ops, keys, &report);
    if (st == CTRIE_EINVAL) {
      std::fprintf(stderr, "fuzz: bad configuration\n");
      return 2;
    }
    std::printf("{\"seed\":%" PRIu64 ",\"ops\":%" PRIu64
                ",\"diverged\":%s,\"detail\":\"%s\"}\n",
                seed, report.ops_executed,
                report.diverged ? "true" : "false", report.detail);
    return report.diverged ? 1 : 0;
  }

  if (lincheck_cmd->parsed()) {
    ctrie_lincheck_report report;
    const ctrie_status st = ctrie_lincheck(
        threads, ops_per_thread, keys, rounds, seed,
        dump_path.empty() ? nullptr : dump_path.c_str(), &report);
    if (st == CTRIE_EINVAL) {
      std::fprintf(stderr,
                   "lincheck: bad configuration (threads >= 2, and threads * "
                   "ops-per-thread <= 64)\n");
      return 2;
    }
    if (st == CTRIE_EIO) {
      std::fprintf(stderr, "lincheck: cannot write %s\n", dump_path.c_str());
      return 2;
    }
    std::printf("{\"rounds\":%" PRIu64 ",\"accepted\":%" PRIu64
                ",\"first_rejected\":%" PRId64 "}\n",
                report.rounds_run, report.rounds_accepted,
                report.first_rejected_round);
    return st == CTRIE_OK ? 0 : 1;
  }

  if (bench_cmd->parsed()) {
    const auto elements = parse_points(elements_arg);
    const auto thread_points = parse_points(threads_arg);
    const auto ratios = parse_points(ratio_arg);
    if (elements.empty() || thread_points.empty() || ratios.empty()) {
      std::fprintf(stderr, "bench: bad numeric list\n");
      return 2;
    }

    ctrie_bench_spec spec{};
    spec.scenario = scenario.c_str();
    spec.structure = structure.c_str();
    spec.elements = elements[0];
    spec.threads = static_cast<unsigned>(thread_points[0]);
    spec.ratio = static_cast<unsigned>(ratios[0]);
    spec.reps = reps;
    spec.warmup = warmup;
    spec.seed = seed;

    const char* axis = nullptr;
    const std::vector<std::uint64_t>* points = nullptr;
    unsigned lists = 0;
    if (elements.size() > 1) { axis = "elements"; points = &elements; ++lists; }
    if (thread_points.size() > 1) { axis = "threads"; points = &thread_points; ++lists; }
    if (ratios.size() > 1) { axis = "ratio"; points = &ratios; ++lists; }
    if (lists > 1) {
      std::fprintf(stderr, "bench: only one axis may be a list\n");
      return 2;
    }

    if (!csv_path.empty()) {
      const ctrie_status st =
          ctrie_bench_csv(&spec, axis, points ? points->data() : nullptr,
                          points ? points->size() : 0, csv_path.c_str());
      if (st == CTRIE_EINVAL) {
        std::fprintf(stderr, "bench: bad configuration\n");
        return 2;
      }
      if (st == CTRIE_EIO) {
        std::fprintf(stderr, "bench: cannot write %s\n", csv_path.c_str());
        return 2;
      }
      std::printf("wrote %s\n", csv_path.c_str());
      return 0;
    }

    if (axis != nullptr) {
      std::fprintf(stderr, "bench: sweeping an axis requires --csv\n");
      return 2;
    }
    ctrie_bench_result result;
    const ctrie_status st = ctrie_bench(&spec, &result);
    if (st == CTRIE_EINVAL) {
      std::fprintf(stderr, "bench: bad configuration\n");
      return 2;
    }
    if (st == CTRIE_ECHECK) {
      std::fprintf(stderr, "bench: a post-condition check failed\n");
      return 1;
    }
    std::printf("{\"scenario\":\"%s\",\"structure\":\"%s\",\"N\":%" PRIu64
                ",\"P\":%u,\"r\":%u,\"reps\":%u,\"median_ms\":%.3f,"
                "\"min_ms\":%.3f,\"ops_per_rep\":%" PRIu64
                ",\"hardware_threads\":%u}\n",
                scenario.c_str(), structure.c_str(), spec.elements,
                spec.threads, spec.ratio, reps, result.median_ms,
                result.min_ms, result.total_ops, result.hardware_threads);
    return 0;
  }

  return 2;
}
