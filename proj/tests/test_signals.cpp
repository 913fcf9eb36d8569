// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tsmerge/signals.hpp"
#include "tsmerge/tokenize.hpp"

using namespace tsmerge;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> tone(std::size_t m, std::size_t bin, double amplitude = 1.0, double phase = 0.0) {
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = amplitude * std::sin(kTwoPi * static_cast<double>(bin * i) / static_cast<double>(m) + phase);
    }
    return out;
}

std::vector<double> operator+(std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += b[i];
    }
    return a;
}

std::vector<double> white_noise(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<double> out(m);
    for (double& v : out) {
        v = normal(gen);
    }
    return out;
}

double variance(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
        acc += (x - mean) * (x - mean);
    }
    return acc / static_cast<double>(v.size());
}

TokenMatrix periodic_tokens(std::size_t t) {
    Series s(t, 1);
    for (std::size_t i = 0; i < t; ++i) {
        const double phase = kTwoPi * static_cast<double>(i) / 16.0;
        s(i, 0) = std::sin(phase) + 0.3 * std::sin(3.0 * phase);
    }
    return tokenize_timestep(s, 8, 3);
}

}  // namespace

TEST_CASE("spectral entropy examples") {
    CHECK(spectral_entropy(tone(256, 8)) == 0.0);
    CHECK(spectral_entropy(tone(255, 9, 3.0, 0.4)) == 0.0);
    CHECK(std::abs(spectral_entropy(tone(256, 5) + tone(256, 40)) - std::log(2.0)) < 1e-12);
    CHECK(std::abs(spectral_entropy(tone(512, 3) + tone(512, 9) + tone(512, 100)) - std::log(3.0)) < 1e-12);
    CHECK(spectral_entropy(std::vector<double>(64, 2.5)) == 0.0);
    CHECK(code_of([] { spectral_entropy(std::vector<double>{1.0}); }) == ErrorCode::parameter);
}

TEST_CASE("white noise has higher entropy than a pure tone") {
    const double sine = spectral_entropy(tone(512, 12));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        CHECK(spectral_entropy(white_noise(512, seed)) > sine);
    }
}

TEST_CASE("total harmonic distortion examples") {
    CHECK(thd(tone(1024, 16), 16) == 0.0);
    CHECK(std::abs(thd(tone(1024, 16) + tone(1024, 32, 0.5), 16) - 50.0) < 1e-9);

    const double expected_square = 100.0 * std::sqrt(1.0 / 9.0 + 1.0 / 25.0);
    const auto square_series = tone(1024, 16) + tone(1024, 48, 1.0 / 3.0) + tone(1024, 80, 1.0 / 5.0);
    CHECK(std::abs(thd(square_series, 16) - expected_square) < 1e-9);
    CHECK(std::abs(expected_square - 38.87) < 0.005);

    std::vector<double> square(1024);
    for (std::size_t i = 0; i < square.size(); ++i) {
        square[i] = i % 64 < 32 ? 1.0 : -1.0;
    }
    CHECK(std::abs(thd(square, 16) - 38.87) < 0.5);
    CHECK(dominant_bin(square) == 16);
}

TEST_CASE("total harmonic distortion errors") {
    CHECK(code_of([] { thd(tone(64, 2), 0); }) == ErrorCode::parameter);
    CHECK(code_of([] { thd(tone(64, 8), 8); }) == ErrorCode::parameter);
    CHECK(code_of([] { thd(tone(64, 3), 2); }) == ErrorCode::undefined_thd);
    CHECK(code_of([] { thd(std::vector<double>(64, 0.0), 2); }) == ErrorCode::undefined_thd);
}

TEST_CASE("gaussian kernel and low-pass filter") {
    for (double sigma : {0.3, 1.0, 2.0, 2.5, 7.0}) {
        const auto k = gaussian_kernel(sigma);
        CHECK(k.size() == 2 * static_cast<std::size_t>(std::ceil(4.0 * sigma)) + 1);
        CHECK(std::abs(std::accumulate(k.begin(), k.end(), 0.0) - 1.0) < 1e-12);
        for (std::size_t i = 0; i < k.size(); ++i) {
            CHECK(k[i] == k[k.size() - 1 - i]);
        }
        const auto flat = gaussian_lowpass(std::vector<double>(50, -1.75), sigma);
        for (double v : flat) {
            CHECK(std::abs(v + 1.75) < 1e-12);
        }
    }
    CHECK(code_of([] { gaussian_kernel(0.0); }) == ErrorCode::parameter);
    CHECK(code_of([] { gaussian_lowpass(std::vector<double>(4, 1.0), -1.0); }) == ErrorCode::parameter);
}

TEST_CASE("low-pass filtering contracts white-noise variance") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto noise = white_noise(400, seed);
        CHECK(variance(gaussian_lowpass(noise, 2.0)) < variance(noise));
    }
}

TEST_CASE("low-pass filtering commutes with an offset") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = white_noise(128, seed);
        const double c = 3.0 + static_cast<double>(seed);
        std::vector<double> shifted = x;
        for (double& v : shifted) {
            v += c;
        }
        const auto a = gaussian_lowpass(shifted, 1.5);
        const auto b = gaussian_lowpass(x, 1.5);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(std::abs(a[i] - (b[i] + c)) < 1e-9);
        }
    }
}

TEST_CASE("low-pass filter reflects at the edges") {
    // kernel radius 4, series of length 3: every tap lands on a reflected sample
    const std::vector<double> x{1.0, 2.0, 4.0};
    const auto k = gaussian_kernel(1.0);
    const auto reflect = [](long i) {
        const long n = 3;
        i = ((i % (2 * n)) + 2 * n) % (2 * n);
        return i < n ? i : 2 * n - 1 - i;
    };
    const auto y = gaussian_lowpass(x, 1.0);
    for (long i = 0; i < 3; ++i) {
        double want = 0.0;
        for (long o = -4; o <= 4; ++o) {
            want += k[static_cast<std::size_t>(o + 4)] * x[static_cast<std::size_t>(reflect(i + o))];
        }
        CHECK(std::abs(y[static_cast<std::size_t>(i)] - want) < 1e-15);
    }
}

TEST_CASE("redundancy profile") {
    const std::vector<double> taus{-1.0, 0.0, 0.5, 0.9, 1.0, 1.0 + 1e-9};
    SUBCASE("identical tokens are fully redundant up to tau = 1") {
        const TokenMatrix x(Matrix(20, 3, 0.7));
        const auto curve = redundancy_profile(x, taus, 1, Metric::cosine);
        for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
            CHECK(curve[i].fraction == 1.0);
        }
        CHECK(curve.back().fraction == 0.0);
    }
    SUBCASE("fractions are in [0, 1] and non-increasing") {
        std::mt19937_64 gen(3);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t t = 2 + gen() % 60;
            const TokenMatrix x = TokenMatrix::from_rows(oracle::random_rows(t, 4, gen));
            const auto curve = redundancy_profile(x, AnalyzeOptions::default_thresholds(), 1 + gen() % (t / 2),
                                                  Metric::cosine);
            for (std::size_t i = 0; i < curve.size(); ++i) {
                CHECK(curve[i].fraction >= 0.0);
                CHECK(curve[i].fraction <= 1.0);
                if (i > 0) {
                    CHECK(curve[i].fraction <= curve[i - 1].fraction);
                }
            }
        }
    }
    SUBCASE("unsorted thresholds") {
        const std::vector<double> bad{0.5, 0.1};
        CHECK(code_of([&] { redundancy_profile(TokenMatrix(Matrix(4, 1, 1.0)), bad, 1, Metric::cosine); }) ==
              ErrorCode::parameter);
    }
}

TEST_CASE("redundancy with a global band ignores order within each subset") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t t = 2 * (2 + gen() % 20);
        const auto rows = oracle::random_rows(t, 3, gen);
        std::vector<std::size_t> a_order(t / 2);
        std::vector<std::size_t> b_order(t / 2);
        std::iota(a_order.begin(), a_order.end(), 0);
        std::iota(b_order.begin(), b_order.end(), 0);
        std::shuffle(a_order.begin(), a_order.end(), gen);
        std::shuffle(b_order.begin(), b_order.end(), gen);
        std::vector<std::vector<double>> permuted(t);
        for (std::size_t i = 0; i < t / 2; ++i) {
            permuted[2 * i] = rows[2 * a_order[i]];
            permuted[2 * i + 1] = rows[2 * b_order[i] + 1];
        }
        const auto thresholds = AnalyzeOptions::default_thresholds();
        const auto a = redundancy_profile(TokenMatrix::from_rows(rows), thresholds, t / 2, Metric::cosine);
        const auto b = redundancy_profile(TokenMatrix::from_rows(permuted), thresholds, t / 2, Metric::cosine);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].fraction == b[i].fraction);
        }
    }
}

TEST_CASE("redundancy does not depend on sequence length for a periodic signal") {
    const auto thresholds = AnalyzeOptions::default_thresholds();
    const auto a = redundancy_profile(periodic_tokens(256), thresholds, 1, Metric::cosine);
    const auto b = redundancy_profile(periodic_tokens(512), thresholds, 1, Metric::cosine);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a[i].fraction - b[i].fraction) <= 0.05);
    }
}

TEST_CASE("analysis of a single series") {
    AnalyzeOptions opts;
    const SignalReport pure = analyze_series(tone(512, 8), opts);
    CHECK(pure.spectral_entropy == 0.0);
    REQUIRE(pure.thd.has_value());
    CHECK(*pure.thd == 0.0);
    CHECK(pure.fundamental_bin == 8);
    CHECK(pure.harmonic_order == 5);
    CHECK(pure.gaussian_sigma == 2.0);
    CHECK(pure.redundancy_curve.size() == 21);

    const auto noise = white_noise(512, 1);
    std::vector<double> noisy = tone(512, 8);
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        noisy[i] += 0.3 * noise[i];
    }
    const SignalReport rough = analyze_series(noisy, opts);
    CHECK(rough.spectral_entropy > pure.spectral_entropy);
    CHECK(rough.filtered_spectral_entropy < rough.spectral_entropy);

    // Fundamental too close to Nyquist for any harmonic.
    const SignalReport high = analyze_series(tone(64, 20), opts);
    CHECK(high.fundamental_bin == 20);
    CHECK_FALSE(high.thd.has_value());
}
