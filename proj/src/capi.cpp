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
#include "damlab.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "damlab/bounds.hpp"
#include "damlab/core.hpp"
#include "damlab/dam.hpp"
#include "damlab/em_sort.hpp"
#include "damlab/errors.hpp"
#include "damlab/full_sort.hpp"
#include "damlab/ple.hpp"
#include "damlab/ple_special.hpp"
#include "damlab/ram_sort.hpp"

struct damlab_instance {
    damlab::Instance inst;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

template <typename Fn>
int wrap(Fn&& fn) {
    try {
        fn();
        return DAMLAB_OK;
    } catch (const damlab::OracleError& e) {
        g_last_error = e.what();
        return DAMLAB_ERR_ORACLE;
    } catch (const damlab::IoError& e) {
        g_last_error = e.what();
        return DAMLAB_ERR_IO;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DAMLAB_ERR_PARAM;
    }
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

constexpr const char* kCsvHeader =
    "algo,S,L,w,k,B,M,seed,reads,writes,total_ios,bound_lower,bound_upper,"
    "ratio_upper";

struct RowNumbers {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    double total_ios = 0;
    double bound_lower = 0;
    double bound_upper = 0;
};

std::string make_row(const damlab::Instance& inst, const std::string& algo,
                     std::size_t B, std::size_t M, const RowNumbers& n) {
    std::ostringstream os;
    const double ratio =
        n.bound_upper > 0 ? n.total_ios / n.bound_upper : 0.0;
    os << algo << ',' << inst.small_count() << ',' << inst.large_volume() << ','
       << inst.w << ',' << inst.k << ',' << B << ',' << M << ',' << inst.seed
       << ',' << n.reads << ',' << n.writes << ',' << format_number(n.total_ios)
       << ',' << format_number(n.bound_lower) << ','
       << format_number(n.bound_upper) << ',' << format_number(ratio);
    return os.str();
}

void check_assignment(const damlab::StripeAssignment& got,
                      const damlab::StripeAssignment& want) {
    if (got.predecessor_index != want.predecessor_index ||
        got.stripe_id != want.stripe_id || got.stripe_count != want.stripe_count)
        throw damlab::OracleError("stripe assignment disagrees with oracle");
}

std::string run_algo(const damlab::Instance& inst, const std::string& algo,
                     std::size_t B, std::size_t M, double pa, double pb, double pc,
                     double j_param, bool trace, std::string* trace_out) {
    using namespace damlab;
    const double Sd = static_cast<double>(inst.small_count());
    const double Ld = static_cast<double>(inst.large_volume());
    const double wd = static_cast<double>(inst.w);
    const double kd = static_cast<double>(inst.k);
    const double Bd = static_cast<double>(B);
    const double Md = static_cast<double>(M);

    if (algo == "ram") {
        PriceTriple prices{pa, pb, pc};
        const auto res = priced_sort(inst.smalls, inst.larges, prices);
        if (res.sorted != inst.all_keys_sorted())
            throw OracleError("ram output is not the sorted key sequence");
        RowNumbers n;
        n.total_ios = res.ledger.total_cost(prices);
        n.bound_lower = n.bound_upper = bounds::ram_bound(
            inst.small_count(), inst.k, inst.stripe_sizes, pa, pb, pc);
        if (trace && trace_out) {
            std::ostringstream os;
            os << "count_a=" << res.ledger.count_a
               << " count_b=" << res.ledger.count_b
               << " count_c=" << res.ledger.count_c
               << " descents=" << res.red_tree_descents;
            *trace_out = os.str();
        }
        return make_row(inst, algo, B, M, n);
    }

    DamSession s(B, M);
    s.ledger().tracing = trace;
    const auto oracle =
        brute_force_predecessors(inst.sorted_smalls(), inst.larges);
    RowNumbers n;

    if (algo == "sort-dam") {
        Run smalls = materialize(s, inst.smalls, 1);
        Run larges = materialize(s, inst.larges, inst.w);
        const auto res = two_sized_sort(s, smalls, larges, PleAlgo::Auto, inst.k,
                                        inst.smalls_sorted);
        if (peek_mixed(s, res.output_start, res.output_volume) !=
            inst.all_keys_sorted())
            throw OracleError("sort output is not the sorted key sequence");
        check_assignment(res.assignment, oracle);
        std::vector<double> vols;
        for (std::size_t sz : inst.stripe_sizes)
            vols.push_back(static_cast<double>(sz) * wd);
        n.bound_lower = bounds::sort_bound(
            Sd, Ld, wd, vols, Bd, Md, bounds::ple_lower(Sd, Ld, wd, kd, Bd, Md));
        n.bound_upper = bounds::sort_bound(
            Sd, Ld, wd, vols, Bd, Md, bounds::ple_upper(Sd, Ld, wd, kd, Bd, Md));
    } else if (algo == "ple-dfs" || algo == "ple-bfs" || algo == "ple-auto") {
        Run smalls = materialize(s, inst.sorted_smalls(), 1);
        Run larges = materialize(s, inst.larges, inst.w);
        StripeAssignment got;
        if (algo == "ple-dfs")
            got = ple_dfs(s, smalls, larges);
        else if (algo == "ple-bfs")
            got = ple_bfs(s, smalls, larges);
        else
            got = ple_auto(s, smalls, larges, inst.k);
        check_assignment(got, oracle);
        n.bound_lower = bounds::ple_lower(Sd, Ld, wd, kd, Bd, Md);
        n.bound_upper = bounds::ple_upper(Sd, Ld, wd, kd, Bd, Md);
    } else if (algo == "sampled") {
        Run base = materialize(s, inst.sorted_smalls(), 1);
        const auto idx = build_sampled_index(s, base);
        for (std::size_t i = 0; i < inst.larges.size(); ++i) {
            const std::size_t pred = query_sampled(s, idx, inst.larges[i]);
            if (pred != oracle.predecessor_index[i])
                throw OracleError("sampled query disagrees with scan oracle");
        }
        const double per_query = 3.0 * bounds::logc(Bd, Sd) + 3.0;
        n.bound_upper = 2.0 * Sd / Bd +
                        per_query * static_cast<double>(inst.larges.size());
    } else if (algo == "2btree") {
        Run smalls = materialize(s, inst.sorted_smalls(), 1);
        Run larges = materialize(s, inst.larges, inst.w);
        std::optional<double> j;
        if (j_param > 0) j = j_param;
        const auto res = kk_sort_2b(s, smalls, larges, j);
        check_assignment(res.assignment, oracle);
        std::vector<Key> want(inst.larges);
        std::sort(want.begin(), want.end());
        if (peek_run(s, res.sorted_larges) != want)
            throw OracleError("swipe sort output is not sorted");
        const double kc = static_cast<double>(inst.larges.size());
        n.bound_upper = (kc / Bd) * bounds::log2c(kc);
    } else {
        throw ParamError("unknown algorithm: " + algo);
    }

    n.reads = s.ledger().reads;
    n.writes = s.ledger().writes;
    n.total_ios = static_cast<double>(s.ledger().total_ios());
    if (trace && trace_out) *trace_out = s.ledger().dump_trace();
    return make_row(inst, algo, B, M, n);
}

}  // namespace

extern "C" {

const char* damlab_last_error(void) { return g_last_error.c_str(); }

void damlab_string_free(char* p) { std::free(p); }

int damlab_gen(size_t small_count, size_t large_count, uint32_t width,
               size_t stripes, const size_t* sizes, uint64_t seed,
               damlab_instance** out) {
    return wrap([&] {
        std::optional<std::vector<std::size_t>> sz;
        if (sizes) sz = std::vector<std::size_t>(sizes, sizes + stripes);
        auto* inst = new damlab_instance{
            damlab::gen_instance(small_count, large_count, width, stripes, sz, seed)};
        *out = inst;
    });
}

int damlab_gen_sub(const char* kind, size_t k, size_t small_count, uint32_t width,
                   uint64_t seed, damlab_instance** out) {
    return wrap([&] {
        damlab::SubproblemKind sk;
        const std::string ks = kind ? kind : "";
        if (ks == "sk")
            sk = damlab::SubproblemKind::SK;
        else if (ks == "kkt")
            sk = damlab::SubproblemKind::KKTilde;
        else if (ks == "kk")
            sk = damlab::SubproblemKind::KK;
        else
            throw damlab::ParamError("subproblem kind must be sk, kkt, or kk");
        damlab::SubproblemParams p;
        p.k = k;
        p.small_count = small_count;
        p.large_count = small_count;
        p.w = width;
        p.seed = seed;
        *out = new damlab_instance{damlab::gen_subproblem(sk, p)};
    });
}

int damlab_read_file(const char* path, damlab_instance** out) {
    return wrap([&] {
        std::ifstream is(path);
        if (!is) throw damlab::IoError(std::string("cannot open ") + path);
        *out = new damlab_instance{damlab::read_instance(is)};
    });
}

int damlab_write_file(const damlab_instance* inst, const char* path) {
    return wrap([&] {
        std::ofstream os(path);
        if (!os) throw damlab::IoError(std::string("cannot open ") + path);
        damlab::write_instance(inst->inst, os);
        if (!os) throw damlab::IoError(std::string("write failed: ") + path);
    });
}

void damlab_instance_free(damlab_instance* inst) { delete inst; }

int damlab_instance_small_count(const damlab_instance* inst, size_t* out) {
    return wrap([&] { *out = inst->inst.small_count(); });
}
int damlab_instance_large_count(const damlab_instance* inst, size_t* out) {
    return wrap([&] { *out = inst->inst.large_count(); });
}
int damlab_instance_width(const damlab_instance* inst, uint32_t* out) {
    return wrap([&] { *out = inst->inst.w; });
}
int damlab_instance_stripes(const damlab_instance* inst, size_t* out) {
    return wrap([&] { *out = inst->inst.k; });
}

const char* damlab_csv_header(void) { return kCsvHeader; }

int damlab_run_csv(const damlab_instance* inst, const char* algo, size_t B,
                   size_t M, double price_a, double price_b, double price_c,
                   double j_param, int trace, char** out_row, char** out_trace) {
    return wrap([&] {
        std::string trace_text;
        const std::string row =
            run_algo(inst->inst, algo ? algo : "", B, M, price_a, price_b,
                     price_c, j_param, trace != 0, &trace_text);
        *out_row = dup_string(row);
        if (out_trace) *out_trace = dup_string(trace_text);
    });
}

int damlab_bound_report(double S, double L, double w, double k, double B,
                        double M, char** out_lines, char** out_csv) {
    return wrap([&] {
        const auto report = damlab::bounds::bound_report(S, L, w, k, B, M);
        if (out_lines) *out_lines = dup_string(report.as_lines());
        if (out_csv) *out_csv = dup_string(report.as_csv());
    });
}

}  // extern "C"
