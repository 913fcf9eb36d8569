// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, each with its time limit.
// Exits non-zero if any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tsmerge/bench.hpp"
#include "tsmerge/causal.hpp"
#include "tsmerge/merge.hpp"
#include "tsmerge/models.hpp"
#include "tsmerge/signals.hpp"
#include "tsmerge/tokenize.hpp"

using namespace tsmerge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

LayerSchedule fixed(std::size_t r, std::size_t k = 1, std::size_t q = 1) {
    LayerSchedule s;
    s.r = r;
    s.k = k;
    s.q = q;
    return s;
}

TokenMatrix random_tokens(std::size_t t, std::size_t d, std::mt19937_64& gen) {
    return TokenMatrix::from_rows(oracle::random_rows(t, d, gen));
}

double l2(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    }
    return std::sqrt(s);
}

// 1 -------------------------------------------------------------------------
Outcome complexity_law() {
    std::size_t cases = 0;
    std::size_t bad = 0;
    for (std::size_t tp = 2; tp <= 128; tp += 2) {
        const TokenMatrix x(Matrix(tp, 4, 1.0));
        const Partition p = partition(tp);
        for (std::size_t k = 1; k <= tp / 2; ++k) {
            const std::size_t measured = similarity_banded(x, p, k, Metric::cosine).evaluations;
            const std::size_t formula = tp / 2 + (k - 1) * (tp - k);
            ++cases;
            if (measured != formula || measured != oracle::band_pairs(tp / 2, k)) {
                ++bad;
            }
        }
    }
    return {bad == 0, fmt("%zu (t', k) cases, %zu mismatches", cases, bad)};
}

// 2 -------------------------------------------------------------------------
Outcome band_endpoints() {
    std::size_t bad = 0;
    for (std::size_t tp = 2; tp <= 128; tp += 2) {
        const TokenMatrix x(Matrix(tp, 4, 1.0));
        const Partition p = partition(tp);
        const std::size_t h = tp / 2;
        bad += similarity_banded(x, p, 1, Metric::cosine).evaluations != h;
        bad += similarity_banded(x, p, h, Metric::cosine).evaluations != h * h;
    }
    return {bad == 0, fmt("k=1 -> t'/2 and k=t'/2 -> (t'/2)^2 for t' in 2..128, %zu mismatches", bad)};
}

// 3 -------------------------------------------------------------------------
Outcome speedup_bound_check() {
    double worst_rel = 0.0;
    bool below = true;
    std::string full;
    for (int L = 1; L <= 8; ++L) {
        const auto t = oracle::halving(256, static_cast<std::size_t>(L));
        ModelConfig c;
        c.layers = static_cast<std::size_t>(L);
        c.d = 8;
        c.h = 16;
        std::mt19937_64 gen(static_cast<std::uint64_t>(L));
        const TokenMatrix x = random_tokens(256, c.d, gen);

        c.schedule.clear();
        for (int l = 0; l < L; ++l) {
            c.schedule.push_back(fixed(t[l] / 2, 1));
        }
        const double bound = speedup_bound(L);
        const double ideal = TransformerEncoder(c).forward(x).ledger.attention_speedup();
        worst_rel = std::max(worst_rel, std::abs(ideal - bound) / bound);

        c.schedule.clear();
        for (int l = 0; l < L; ++l) {
            c.schedule.push_back(fixed(t[l] / 2, t[l] / 2));
        }
        const double measured = TransformerEncoder(c).forward(x).ledger.speedup();
        below = below && measured < bound;
        full += fmt("%s%.3f<%.3f", L == 1 ? "" : " ", measured, bound);
    }
    return {worst_rel <= 1e-12 && below,
            fmt("attention-only max rel err %.1e; full (t=256, global band) %s", worst_rel, full.c_str())};
}

// 4 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
    std::mt19937_64 gen(2026);
    std::size_t bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t t = 2 + gen() % 31;
        const std::size_t d = 1 + gen() % 8;
        const std::size_t r = gen() % (t / 2 + 1);
        const auto rows = oracle::random_rows(t, d, gen);
        const TokenMatrix x = TokenMatrix::from_rows(rows);
        const MergePlan plan = select_top_r(similarity_banded(x, partition(t), t / 2, Metric::cosine), r, 1, t);
        const TokenMatrix y = merge_apply(x, plan);
        const auto edges = oracle::global_top_r(rows, std::min(r, t - 1));
        const oracle::Merged want = oracle::apply(rows, std::vector<double>(t, 1.0), edges);
        bool same = y.length() == want.values.size() && plan.edges.size() == edges.size();
        for (std::size_t e = 0; same && e < edges.size(); ++e) {
            same = plan.edges[e].a == edges[e].a && plan.edges[e].b == edges[e].b;
        }
        for (std::size_t i = 0; same && i < y.length(); ++i) {
            same = static_cast<double>(y.size(i)) == want.sizes[i];
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = std::abs(y.token(i)[c] - want.values[i][c]);
                worst = std::max(worst, diff);
                same = same && diff <= 1e-12;
            }
        }
        bad += same ? 0 : 1;
    }
    return {bad == 0, fmt("500 instances, %zu mismatches, max |diff| %.1e", bad, worst)};
}

// 5 -------------------------------------------------------------------------
Outcome causality() {
    constexpr std::size_t t = 32;
    ModelConfig c;
    c.p = t;
    c.n = 2;
    std::string detail;
    bool ok = true;
    for (std::size_t r : {std::size_t{0}, t / 8, t / 4}) {
        c.decoder_schedule = {fixed(r)};
        std::size_t clean = 0;
        for (std::uint64_t trial = 0; trial < 200; ++trial) {
            c.seed = trial;
            const TransformerDecoder model(c);
            std::mt19937_64 gen(trial);
            const TokenMatrix enc = random_tokens(48, c.d, gen);
            const TokenMatrix dec = random_tokens(t, c.d, gen);
            Matrix zeroed = dec.values();
            for (std::size_t i = t / 2; i < t; ++i) {
                for (std::size_t j = 0; j < c.d; ++j) {
                    zeroed(i, j) = 0.0;
                }
            }
            const Matrix a = model.forward(dec, enc).forecast;
            const Matrix b = model.forward(TokenMatrix(zeroed), enc).forecast;
            bool same = true;
            for (std::size_t i = 0; i < t / 4; ++i) {
                for (std::size_t v = 0; v < c.n; ++v) {
                    same = same && a(i, v) == b(i, v);
                }
            }
            clean += same ? 1 : 0;
        }
        ok = ok && clean == 200;
        detail += fmt("%sr=%zu: %zu/200", detail.empty() ? "" : ", ", r, clean);
    }
    return {ok, detail + " inputs with unchanged first-quarter outputs"};
}

// 6 -------------------------------------------------------------------------
Outcome unmerge_conservation() {
    std::mt19937_64 gen(6);
    std::size_t runs = 0;
    std::size_t bad = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t t0 = 1 + gen() % 96;
        const bool constant = trial % 2 == 0;
        Matrix m(t0, 4);
        const auto base = oracle::random_rows(t0, 4, gen);
        for (std::size_t i = 0; i < t0; ++i) {
            for (std::size_t c = 0; c < 4; ++c) {
                m(i, c) = constant ? base[0][c] : base[i][c];
            }
        }
        const TokenMatrix x(m);
        TokenMatrix y = x;
        for (int layer = 0; layer < 4 && y.length() >= 2; ++layer) {
            LayerSchedule s = fixed(gen() % y.length(), 1 + gen() % (y.length() / 2), 1 + gen() % 4);
            if (gen() % 3 == 0) {
                s.mode = ScheduleMode::dynamic;
                s.tau = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
            }
            y = trial % 4 < 2 ? causal_merge(y, s.r, s.q, Metric::cosine).first : merge_apply(y, plan_layer(y, s));
        }
        const TokenMatrix back = unmerge(y);
        ++runs;
        bool ok = back.length() == t0;
        if (constant) {
            ok = ok && back == x;
        }
        bad += ok ? 0 : 1;
    }
    return {bad == 0, fmt("%zu schedules (half constant inputs), %zu violations", runs, bad)};
}

// 7 -------------------------------------------------------------------------
TokenMatrix with_passing(std::size_t passing, std::size_t h) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < h; ++i) {
        std::vector<double> a(2 * h, 0.0);
        std::vector<double> b(2 * h, 0.0);
        a[i] = 1.0;
        b[i < passing ? i : i + h] = 1.0;
        rows.push_back(a);
        rows.push_back(b);
    }
    return TokenMatrix::from_rows(rows);
}

Outcome dynamic_limits() {
    std::mt19937_64 gen(7);
    std::size_t bad = 0;
    std::size_t cases = 0;
    for (std::size_t t = 2; t <= 64; ++t) {
        const std::vector<TokenMatrix> batch{random_tokens(t, 4, gen), random_tokens(t, 4, gen)};
        for (std::size_t q = 1; q <= t; ++q) {
            ++cases;
            bad += dynamic_r(batch, 1.0 + 1e-12, 1, q, Metric::cosine) != 0;
            bad += dynamic_r(batch, 1.5, t / 2, q, Metric::cosine) != 0;
            // Every proposal passes at tau = -1; clipping leaves t - q whenever the
            // floor binds (q >= ceil(t/2)), otherwise all floor(t/2) proposals.
            const std::size_t expected = q >= (t + 1) / 2 ? t - q : t / 2;
            bad += dynamic_r(batch, -1.0, 1, q, Metric::cosine) != expected;
        }
    }
    const struct {
        std::vector<std::size_t> counts;
        std::size_t want;
    } rounding[] = {{{2, 3}, 2}, {{3, 4}, 4}, {{1, 2}, 2}, {{0, 1}, 0}, {{1, 1, 2}, 1}, {{2, 2, 3, 3}, 2}};
    for (const auto& c : rounding) {
        std::vector<TokenMatrix> batch;
        for (std::size_t n : c.counts) {
            batch.push_back(with_passing(n, 4));
        }
        ++cases;
        bad += dynamic_r(batch, 0.5, 1, 1, Metric::cosine) != c.want;
    }
    return {bad == 0, fmt("%zu cases (tau>1, tau=-1 clipped to t-q, half-even batch means), %zu wrong", cases, bad)};
}

// 8 -------------------------------------------------------------------------
Outcome prune_vs_merge() {
    constexpr std::size_t t = 64;
    std::size_t wins = 0;
    double merge_sum = 0.0;
    double prune_sum = 0.0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        std::mt19937_64 gen(trial);
        ModelConfig c;
        c.layers = 2;
        c.seed = trial;
        const auto motif = oracle::random_rows(4, c.d, gen);
        std::normal_distribution<double> noise(0.0, 0.1);
        Matrix m(t, c.d);
        for (std::size_t i = 0; i < t; ++i) {
            for (std::size_t j = 0; j < c.d; ++j) {
                m(i, j) = motif[(i / 2) % motif.size()][j] + noise(gen);
            }
        }
        const TokenMatrix x(m);
        c.schedule = {fixed(12)};
        const TransformerEncoder merging(c);
        c.schedule.front().reduction = Reduction::prune;
        const TransformerEncoder pruning(c);
        const Matrix ref = merging.forward_reference(x).tokens.values();
        const double e_merge = l2(unmerge(merging.forward(x).tokens).values(), ref);
        const double e_prune = l2(unmerge(pruning.forward(x).tokens).values(), ref);
        merge_sum += e_merge;
        prune_sum += e_prune;
        wins += e_prune >= e_merge ? 1 : 0;
    }
    return {wins >= 190, fmt("pruning error >= merging error in %zu/200 trials (mean %.3f vs %.3f)", wins,
                             prune_sum / 200.0, merge_sum / 200.0)};
}

// 9 -------------------------------------------------------------------------
std::vector<double> tone(std::size_t m, std::size_t bin, double amplitude) {
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = amplitude * std::sin(kTwoPi * static_cast<double>(bin * i) / static_cast<double>(m));
    }
    return out;
}

double thd_at_peak(const std::vector<double>& x) {
    const std::size_t f = dominant_bin(x);
    return thd(x, f, std::min<std::size_t>(5, x.size() / 2 / f));
}

Outcome spectral_ordering() {
    constexpr std::size_t m = 1024;
    const std::vector<double> clean = tone(m, 8, 1.0);
    const double clean_entropy = spectral_entropy(clean);
    const double clean_thd = thd_at_peak(clean);
    std::size_t ordered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> normal;
        std::vector<double> noisy = tone(m, 8, 1.0);
        const std::vector<double> second = tone(m, 21, 0.5);
        for (std::size_t i = 0; i < m; ++i) {
            noisy[i] += second[i] + normal(gen);
        }
        ordered += spectral_entropy(noisy) > clean_entropy && thd_at_peak(noisy) > clean_thd ? 1 : 0;
    }
    std::vector<double> square(m);
    for (std::size_t i = 0; i < m; ++i) {
        square[i] = i % 64 < 32 ? 1.0 : -1.0;
    }
    const double square_thd = thd(square, 16);
    const double sine_thd = thd(clean, 8);
    return {ordered == 100 && std::abs(square_thd - 38.87) <= 0.5 && sine_thd == 0.0,
            fmt("noisy composite above clean tone in %zu/100 seeds; square THD %.3f%%; sine THD %g%%", ordered,
                square_thd, sine_thd)};
}

// 10 ------------------------------------------------------------------------
Outcome redundancy_length() {
    const auto generator = [](std::size_t t) {
        std::vector<double> s(t);
        for (std::size_t i = 0; i < t; ++i) {
            const double phase = kTwoPi * static_cast<double>(i) / 16.0;
            s[i] = std::sin(phase) + 0.3 * std::sin(3.0 * phase);
        }
        return s;
    };
    const AnalyzeOptions opts;
    const auto a = analyze_series(generator(256), opts).redundancy_curve;
    const auto b = analyze_series(generator(512), opts).redundancy_curve;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i].fraction - b[i].fraction));
    }
    return {a.size() == b.size() && worst <= 0.05,
            fmt("%zu thresholds, max |difference| %.4f", a.size(), worst)};
}

// 11 ------------------------------------------------------------------------
Outcome flop_monotonicity() {
    constexpr std::size_t t0 = 64;
    constexpr std::size_t q = 1;
    std::size_t bad = 0;
    std::size_t points = 0;
    std::mt19937_64 gen(11);
    for (MergeHook hook : {MergeHook::after_attention, MergeHook::after_operator}) {
        ModelConfig c;
        c.layers = 3;
        c.d = 16;
        c.h = 64;
        c.merge_hook = hook;
        const TokenMatrix x = random_tokens(t0, c.d, gen);
        std::uint64_t previous = UINT64_MAX;
        for (std::size_t r = 0; r <= t0 - q; ++r) {
            c.schedule = {fixed(r, 1, q)};
            const EncoderResult res = hook == MergeHook::after_attention ? encoder_forward(x, c) : ssm_forward(x, c);
            ++points;
            bad += res.ledger.total() > previous;
            previous = res.ledger.total();
            std::size_t t = t0;
            for (std::size_t l = 0; l < c.layers; ++l) {
                const LayerFlops& lf = res.ledger.layers[l];
                const std::size_t r_l = res.trace.layers[l].r();
                bad += lf.tokens_in != t || lf.tokens_out != t - r_l || lf.tokens_out < std::min(t, q);
                t = lf.tokens_out;
            }
            bad += res.tokens.length() != t;
        }
    }
    return {bad == 0, fmt("%zu sweep points (encoder and gated convolution, r = 0..t-q), %zu violations", points,
                          bad)};
}

// 12 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / ("tsmerge_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "config.json");
        cfg << R"({"L": 3, "d": 16, "h": 32, "heads": 2, "m": 128, "n": 2, "seed": 12345,
                   "schedule": {"k": 2}})";
        std::ofstream csv(dir / "data.csv");
        csv << "t,a,b\n";
        std::mt19937_64 gen(1);
        std::normal_distribution<double> normal;
        csv.precision(17);
        for (std::size_t i = 0; i < 128; ++i) {
            csv << i << ',' << std::sin(0.3 * static_cast<double>(i)) + 0.1 * normal(gen) << ','
                << std::cos(0.05 * static_cast<double>(i)) << '\n';
        }
    }
    BenchOptions o;
    o.config_path = dir / "config.json";
    o.data_path = dir / "data.csv";
    o.r_sweep = SweepRange::parse("0:40:4");
    o.out_path = dir / "a" / "bench.json";
    bench_run(o);
    o.out_path = dir / "b" / "bench.json";
    bench_run(o);
    bool same = slurp(dir / "a" / "bench.json") == slurp(dir / "b" / "bench.json");
    std::size_t traces = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a" / "bench_traces")) {
        same = same && slurp(entry.path()) == slurp(dir / "b" / "bench_traces" / entry.path().filename());
        ++traces;
    }
    const auto bytes = fs::file_size(dir / "a" / "bench.json");
    fs::remove_all(dir);
    return {same && traces == 11, fmt("two runs: report (%zu bytes) and %zu traces byte-identical: %s",
                                      static_cast<std::size_t>(bytes), traces, same ? "yes" : "no")};
}

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "complexity law", 5.0, complexity_law},
        {2, "band endpoints", 1.0, band_endpoints},
        {3, "speed-up bound", 10.0, speedup_bound_check},
        {4, "oracle equivalence", 30.0, oracle_equivalence},
        {5, "decoder causality", 60.0, causality},
        {6, "unmerge conservation", 10.0, unmerge_conservation},
        {7, "dynamic merging limits", 5.0, dynamic_limits},
        {8, "pruning loses more than merging", 60.0, prune_vs_merge},
        {9, "spectral ordering", 10.0, spectral_ordering},
        {10, "redundancy length invariance", 10.0, redundancy_length},
        {11, "FLOP monotonicity and shape law", 10.0, flop_monotonicity},
        {12, "determinism", 30.0, determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.limit_s;
        const bool pass = out.ok && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s %2d %-32s %7.3fs (limit %gs%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                    c.limit_s, in_time ? "" : ", exceeded", out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
