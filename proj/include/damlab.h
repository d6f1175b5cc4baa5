/*
 * Copyright 2026 the damlab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef DAMLAB_H
#define DAMLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define DAMLAB_OK 0
#define DAMLAB_ERR_PARAM 2
#define DAMLAB_ERR_ORACLE 3
#define DAMLAB_ERR_IO 4

typedef struct damlab_instance damlab_instance;

/* Last error message of the calling thread; valid until the next call. */
const char* damlab_last_error(void);
void damlab_string_free(char* p);

/* Random two-sized instance. `sizes` may be NULL (random stripe sizes)
 * or point to `stripes` entries. */
int damlab_gen(size_t small_count, size_t large_count, uint32_t width,
               size_t stripes, const size_t* sizes, uint64_t seed,
               damlab_instance** out);
/* kind: "sk" (one large per stripe), "kkt" (one small between stripes),
 * "kk" (perfect interleaving). */
int damlab_gen_sub(const char* kind, size_t k, size_t small_count, uint32_t width,
                   uint64_t seed, damlab_instance** out);
int damlab_read_file(const char* path, damlab_instance** out);
int damlab_write_file(const damlab_instance* inst, const char* path);
void damlab_instance_free(damlab_instance* inst);

int damlab_instance_small_count(const damlab_instance* inst, size_t* out);
int damlab_instance_large_count(const damlab_instance* inst, size_t* out);
int damlab_instance_width(const damlab_instance* inst, uint32_t* out);
int damlab_instance_stripes(const damlab_instance* inst, size_t* out);

/* The fixed experiment CSV header (no trailing newline). */
const char* damlab_csv_header(void);

/* Run `algo` on the instance under a fresh simulator session, verify the
 * result against the brute-force oracle, and return one CSV row.
 * algo: ram | sort-dam | ple-dfs | ple-bfs | ple-auto | sampled | 2btree.
 * j_param: 0 for the derived batch parameter, else an override (2btree only).
 * out_trace may be NULL; otherwise receives the ledger trace when trace != 0.
 * Returned strings are heap-allocated; free with damlab_string_free. */
int damlab_run_csv(const damlab_instance* inst, const char* algo, size_t B,
                   size_t M, double price_a, double price_b, double price_c,
                   double j_param, int trace, char** out_row, char** out_trace);

/* Closed-form bound report, as key=value lines and as header+row CSV. */
int damlab_bound_report(double S, double L, double w, double k, double B,
                        double M, char** out_lines, char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* DAMLAB_H */
