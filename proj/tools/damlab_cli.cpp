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
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "damlab.h"

namespace {

int fail(int code) {
    std::fprintf(stderr, "error: %s\n", damlab_last_error());
    return code;
}

struct GenFlags {
    std::size_t small = 0;
    std::size_t large_count = 0;
    std::uint32_t width = 1;
    std::size_t stripes = 1;
    std::vector<std::size_t> sizes;
    std::uint64_t seed = 0;
    std::string sub;  // empty, or sk / kkt / kk
};

int make_instance(const GenFlags& g, damlab_instance** out) {
    if (!g.sub.empty())
        return damlab_gen_sub(g.sub.c_str(), g.stripes, g.small, g.width, g.seed,
                              out);
    return damlab_gen(g.small, g.large_count, g.width, g.stripes,
                      g.sizes.empty() ? nullptr : g.sizes.data(), g.seed, out);
}

int cmd_gen(const GenFlags& g, const std::string& out_path) {
    damlab_instance* inst = nullptr;
    int rc = make_instance(g, &inst);
    if (rc != DAMLAB_OK) return fail(rc);
    rc = damlab_write_file(inst, out_path.c_str());
    damlab_instance_free(inst);
    if (rc != DAMLAB_OK) return fail(rc);
    return 0;
}

struct RunFlags {
    std::string algo;
    std::size_t B = 8;
    std::size_t M = 64;
    std::string in;
    std::vector<double> prices{1.0, 1.0, 1.0};
    double j_param = 0.0;
    bool trace = false;
};

int run_one(damlab_instance* inst, const RunFlags& r, bool print_header) {
    char* row = nullptr;
    char* trace_text = nullptr;
    const int rc = damlab_run_csv(inst, r.algo.c_str(), r.B, r.M, r.prices[0],
                                  r.prices[1], r.prices[2], r.j_param,
                                  r.trace ? 1 : 0, &row, &trace_text);
    if (rc != DAMLAB_OK) return fail(rc);
    if (print_header) std::printf("%s\n", damlab_csv_header());
    std::printf("%s\n", row);
    if (r.trace && trace_text && trace_text[0])
        std::fprintf(stderr, "%s\n", trace_text);
    damlab_string_free(row);
    damlab_string_free(trace_text);
    return 0;
}

int cmd_run(const RunFlags& r) {
    damlab_instance* inst = nullptr;
    int rc = damlab_read_file(r.in.c_str(), &inst);
    if (rc != DAMLAB_OK) return fail(rc);
    rc = run_one(inst, r, /*print_header=*/true);
    damlab_instance_free(inst);
    return rc;
}

// sweep spec: `name=v1,v2,...` pairs joined by `;`, names in {w,k,S,B,M}
bool parse_sweep(const std::string& spec,
                 std::vector<std::pair<std::string, std::vector<std::size_t>>>& out) {
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t semi = spec.find(';', pos);
        if (semi == std::string::npos) semi = spec.size();
        const std::string part = spec.substr(pos, semi - pos);
        pos = semi + 1;
        const std::size_t eq = part.find('=');
        if (eq == std::string::npos) return false;
        const std::string name = part.substr(0, eq);
        if (name != "w" && name != "k" && name != "S" && name != "B" && name != "M")
            return false;
        std::vector<std::size_t> values;
        std::size_t vpos = eq + 1;
        while (vpos < part.size()) {
            std::size_t comma = part.find(',', vpos);
            if (comma == std::string::npos) comma = part.size();
            const std::string tok = part.substr(vpos, comma - vpos);
            vpos = comma + 1;
            if (tok.empty()) continue;
            values.push_back(std::stoull(tok));
        }
        out.emplace_back(name, values);
    }
    return true;
}

int cmd_bench(const GenFlags& g, const RunFlags& r, const std::string& sweep) {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> axes;
    if (!parse_sweep(sweep, axes)) {
        std::fprintf(stderr, "error: bad --sweep spec\n");
        return DAMLAB_ERR_PARAM;
    }
    std::printf("%s\n", damlab_csv_header());

    std::vector<std::size_t> idx(axes.size(), 0);
    for (const auto& [name, values] : axes)
        if (values.empty()) return 0;  // empty axis: header-only table

    while (true) {
        GenFlags gg = g;
        RunFlags rr = r;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const std::size_t v = axes[a].second[idx[a]];
            const std::string& name = axes[a].first;
            if (name == "w") gg.width = static_cast<std::uint32_t>(v);
            else if (name == "k") gg.stripes = v;
            else if (name == "S") gg.small = v;
            else if (name == "B") rr.B = v;
            else if (name == "M") rr.M = v;
        }
        damlab_instance* inst = nullptr;
        int rc = make_instance(gg, &inst);
        if (rc != DAMLAB_OK) return fail(rc);
        rc = run_one(inst, rr, /*print_header=*/false);
        damlab_instance_free(inst);
        if (rc != 0) return rc;

        std::size_t a = 0;
        for (; a < axes.size(); ++a) {
            idx[a] += 1;
            if (idx[a] < axes[a].second.size()) break;
            idx[a] = 0;
        }
        if (a == axes.size()) break;
        if (axes.empty()) break;
    }
    return 0;
}

int cmd_bounds(double S, double L, double w, double k, double B, double M) {
    char* lines = nullptr;
    char* csv = nullptr;
    const int rc = damlab_bound_report(S, L, w, k, B, M, &lines, &csv);
    if (rc != DAMLAB_OK) return fail(rc);
    std::printf("%s%s\n", lines, csv);
    damlab_string_free(lines);
    damlab_string_free(csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-sized sorting and batched predecessor lab"};
    app.require_subcommand(1);

    GenFlags g;
    RunFlags r;
    std::string out_path, sweep;
    double bS = 0, bL = 0, bw = 1, bk = 1, bB = 8, bM = 64;

    auto add_gen_flags = [&](CLI::App* c) {
        c->add_option("--small", g.small, "number of unit records");
        c->add_option("--large-count", g.large_count, "number of wide records");
        c->add_option("--width", g.width, "wide record volume w");
        c->add_option("--stripes", g.stripes, "interleaving parameter k");
        c->add_option("--sizes", g.sizes, "explicit stripe sizes")->delimiter(',');
        c->add_option("--seed", g.seed, "generator seed");
        c->add_option("--sub", g.sub, "subproblem shape: sk, kkt, or kk");
    };
    auto add_run_flags = [&](CLI::App* c) {
        c->add_option("--algo", r.algo,
                      "ram|sort-dam|ple-dfs|ple-bfs|ple-auto|sampled|2btree")
            ->required();
        c->add_option("--B", r.B, "block size");
        c->add_option("--M", r.M, "memory volume");
        c->add_option("--prices", r.prices, "comparison prices a,b,c")
            ->delimiter(',')
            ->expected(3);
        c->add_option("--jparam", r.j_param, "batch parameter override (2btree)");
        c->add_flag("--trace", r.trace, "dump the ledger trace to stderr");
    };

    auto* gen = app.add_subcommand("gen", "generate an instance file");
    add_gen_flags(gen);
    gen->add_option("--out", out_path, "output path")->required();

    auto* run = app.add_subcommand("run", "run one algorithm and print a CSV row");
    add_run_flags(run);
    run->add_option("--in", r.in, "instance file")->required();

    auto* bench = app.add_subcommand("bench", "sweep a parameter grid");
    add_gen_flags(bench);
    add_run_flags(bench);
    bench->add_option("--sweep", sweep, "axes, e.g. w=8,16;k=1,2")->required();

    auto* bounds = app.add_subcommand("bounds", "evaluate the closed-form bounds");
    bounds->add_option("--S", bS)->required();
    bounds->add_option("--L", bL)->required();
    bounds->add_option("--w", bw);
    bounds->add_option("--k", bk);
    bounds->add_option("--B", bB);
    bounds->add_option("--M", bM);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return DAMLAB_ERR_PARAM;
    }

    if (gen->parsed()) return cmd_gen(g, out_path);
    if (run->parsed()) return cmd_run(r);
    if (bench->parsed()) return cmd_bench(g, r, sweep);
    if (bounds->parsed()) return cmd_bounds(bS, bL, bw, bk, bB, bM);
    return DAMLAB_ERR_PARAM;
}
