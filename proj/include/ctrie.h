/*
 * C interface to the lock-free concurrent hash trie.
 *
 * The handle wraps a map from uint64 keys to uint64 values. Insert, lookup
 * and remove may be called from any number of threads concurrently; the
 * inspection, fuzzing, linearizability and benchmark entry points manage
 * their own threads and must not race with other calls on the same handle.
 */

#ifndef CTRIE_H
#define CTRIE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ctrie_map ctrie_map; /* opaque */

typedef enum ctrie_status {
  CTRIE_OK = 0,
  CTRIE_NOT_FOUND = 1,
  CTRIE_EINVAL = 2, /* bad argument or configuration */
  CTRIE_EIO = 3,    /* could not write an output file */
  CTRIE_ECHECK = 4, /* a verification step reported a failure */
} ctrie_status;

ctrie_map* ctrie_new(void);
void ctrie_free(ctrie_map* t);

ctrie_status ctrie_insert(ctrie_map* t, uint64_t key, uint64_t value);
/* CTRIE_OK and *value_out set, or CTRIE_NOT_FOUND. value_out may be NULL. */
ctrie_status ctrie_lookup(const ctrie_map* t, uint64_t key, uint64_t* value_out);
/* CTRIE_OK and *old_value_out set, or CTRIE_NOT_FOUND. */
ctrie_status ctrie_remove(ctrie_map* t, uint64_t key, uint64_t* old_value_out);

/*
 * Quiescent-state inspection. The caller must guarantee that no other thread
 * is operating on the handle.
 */
typedef struct ctrie_metrics {
  uint64_t null_inodes;       /* n */
  uint64_t tomb_inodes;       /* t */
  uint64_t live_inodes;       /* l */
  uint64_t single_tips;       /* r */
  uint64_t total_path_length; /* d */
  uint64_t tips;              /* length-1 tips */
} ctrie_metrics;

ctrie_status ctrie_get_metrics(const ctrie_map* t, ctrie_metrics* out);

/*
 * Validates the structure. Returns the number of invariant violations
 * (0 = valid) or -1 on bad arguments. When json_out is non-NULL, writes a
 * single-line JSON object {"n":..,"t":..,"l":..,"r":..,"d":..,"tips":..,
 * "violations":..} into it, truncating at json_cap.
 */
long ctrie_validate(const ctrie_map* t, char* json_out, size_t json_cap);

/*
 * Sequential differential fuzz of a fresh trie against a reference map:
 * `ops` seeded random operations over keys in [0, key_space). Returns
 * CTRIE_OK on a clean run, CTRIE_ECHECK when a divergence was found (see
 * the report), CTRIE_EINVAL on bad arguments.
 */
typedef struct ctrie_fuzz_report {
  uint64_t ops_executed;
  int diverged;              /* 0 = clean */
  uint64_t divergence_index; /* first diverging op when diverged */
  char detail[240];
} ctrie_fuzz_report;

ctrie_status ctrie_fuzz(uint64_t seed, uint64_t ops, uint64_t key_space,
                        ctrie_fuzz_report* out);

/*
 * Runs `rounds` concurrent recording rounds (threads x ops_per_thread over
 * keys in [0, key_space)) on fresh tries and checks every recorded history
 * for linearizability. When histories_jsonl_path is non-NULL, all events are
 * appended there as JSON Lines. Returns CTRIE_OK when every round is
 * accepted, CTRIE_ECHECK otherwise.
 */
typedef struct ctrie_lincheck_report {
  uint64_t rounds_run;
  uint64_t rounds_accepted;
  int64_t first_rejected_round; /* -1 when none */
} ctrie_lincheck_report;

ctrie_status ctrie_lincheck(unsigned threads, unsigned ops_per_thread,
                            uint64_t key_space, unsigned rounds,
                            uint64_t seed, const char* histories_jsonl_path,
                            ctrie_lincheck_report* out);

/*
 * Benchmark driver. scenario: insert | remove | lookup | mixed;
 * structure: ctrie | locked-hash | locked-ordered. reps must be >= 3;
 * elements >= threads >= 1.
 */
typedef struct ctrie_bench_spec {
  const char* scenario;
  const char* structure;
  uint64_t elements;
  unsigned threads;
  unsigned ratio; /* lookups per insert; mixed scenario only */
  unsigned reps;
  unsigned warmup;
  uint64_t seed;
} ctrie_bench_spec;

typedef struct ctrie_bench_result {
  double median_ms;
  double min_ms;
  uint64_t total_ops; /* operations per repetition */
  unsigned hardware_threads;
} ctrie_bench_result;

ctrie_status ctrie_bench(const ctrie_bench_spec* spec,
                         ctrie_bench_result* out);

/*
 * Sweeps one axis (axis: "elements" | "threads" | "ratio") across `points`,
 * running every structure at every point, and writes the rows as CSV with
 * header scenario,structure,N,P,r,rep,median_ms,min_ms,error. A NULL axis
 * runs just the spec as given. Per-point failures become rows with the
 * error column set; the sweep continues.
 */
ctrie_status ctrie_bench_csv(const ctrie_bench_spec* spec, const char* axis,
                             const uint64_t* points, size_t n_points,
                             const char* csv_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CTRIE_H */
