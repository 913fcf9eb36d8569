// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/signals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsmerge/error.hpp"
#include "tsmerge/fft_conv.hpp"
#include "tsmerge/merge.hpp"
#include "tsmerge/tokenize.hpp"

namespace tsmerge {

namespace {

/// Positive-frequency power (index f = 1 .. m/2 kept at position f), floored.
std::vector<double> floored_power(std::span<const double> series) {
    std::vector<double> power = power_spectrum(series);
    power[0] = 0.0;
    const double peak = *std::max_element(power.begin(), power.end());
    for (double& p : power) {
        if (p < peak * kSpectralFloor) {
            p = 0.0;
        }
    }
    return power;
}

}  // namespace

double spectral_entropy(std::span<const double> series) {
    if (series.size() < 2) {
        throw Error(ErrorCode::parameter, "spectral entropy needs at least 2 samples");
    }
    const std::vector<double> power = floored_power(series);
    double total = 0.0;
    for (std::size_t f = 1; f < power.size(); ++f) {
        total += power[f];
    }
    if (total == 0.0) {
        return 0.0;
    }
    double entropy = 0.0;
    for (std::size_t f = 1; f < power.size(); ++f) {
        if (power[f] > 0.0) {
            const double p = power[f] / total;
            entropy -= p * std::log(p);
        }
    }
    return std::max(entropy, 0.0);
}

double thd(std::span<const double> series, std::size_t fundamental_bin, std::size_t order) {
    const std::size_t nyquist = series.size() / 2;
    if (fundamental_bin < 1) {
        throw Error(ErrorCode::parameter, "fundamental bin must be at least 1");
    }
    if (order < 2 || order * fundamental_bin > nyquist) {
        throw Error(ErrorCode::parameter,
                    "harmonic " + std::to_string(order) + " of bin " + std::to_string(fundamental_bin) +
                        " exceeds Nyquist bin " + std::to_string(nyquist));
    }
    const std::vector<double> power = floored_power(series);
    const double fundamental = power[fundamental_bin];
    if (fundamental == 0.0) {
        throw Error(ErrorCode::undefined_thd, "no power at fundamental bin " + std::to_string(fundamental_bin));
    }
    double harmonics = 0.0;
    for (std::size_t h = 2; h <= order; ++h) {
        harmonics += power[h * fundamental_bin];
    }
    return 100.0 * std::sqrt(harmonics) / std::sqrt(fundamental);
}

std::size_t dominant_bin(std::span<const double> series) {
    if (series.size() < 2) {
        return 0;
    }
    const std::vector<double> power = floored_power(series);
    std::size_t best = 0;
    for (std::size_t f = 1; f < power.size(); ++f) {
        if (power[f] > power[best]) {
            best = f;
        }
    }
    return best;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorCode::parameter, "sigma must be positive");
    }
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        const double x = static_cast<double>(i);
        const double w = std::exp(-x * x / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        total += w;
    }
    for (double& w : kernel) {
        w /= total;
    }
    return kernel;
}

std::vector<double> gaussian_lowpass(std::span<const double> series, double sigma) {
    const std::vector<double> kernel = gaussian_kernel(sigma);
    const auto m = static_cast<std::ptrdiff_t>(series.size());
    if (m == 0) {
        return {};
    }
    const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    const auto reflect = [m](std::ptrdiff_t idx) {
        const std::ptrdiff_t period = 2 * m;
        idx %= period;
        if (idx < 0) {
            idx += period;
        }
        return idx < m ? idx : period - 1 - idx;
    };
    std::vector<double> out(series.size());
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
            acc += kernel[static_cast<std::size_t>(o + radius)] * series[static_cast<std::size_t>(reflect(i + o))];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

std::vector<RedundancyPoint> redundancy_profile(const TokenMatrix& x,
                                                std::span<const double> thresholds,
                                                std::size_t k,
                                                Metric metric) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw Error(ErrorCode::parameter, "redundancy thresholds must be ascending");
    }
    std::vector<RedundancyPoint> curve;
    const std::size_t half = x.length() / 2;
    std::vector<double> best;
    if (half > 0) {
        const BandSimilarity s = similarity_banded(x, partition(x), k, metric);
        for (const MergeEdge& e : best_per_a(s)) {
            best.push_back(e.similarity);
        }
    }
    for (double tau : thresholds) {
        std::size_t count = 0;
        for (double v : best) {
            if (v >= tau) {
                ++count;
            }
        }
        curve.push_back({tau, half == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(half)});
    }
    return curve;
}

std::vector<double> AnalyzeOptions::default_thresholds() {
    std::vector<double> out;
    for (int i = 0; i <= 20; ++i) {
        out.push_back(i / 20.0);
    }
    return out;
}

SignalReport analyze_series(std::span<const double> series, const AnalyzeOptions& options) {
    SignalReport report;
    report.spectral_entropy = spectral_entropy(series);
    report.fundamental_bin = dominant_bin(series);
    if (report.fundamental_bin > 0) {
        const std::size_t nyquist = series.size() / 2;
        report.harmonic_order = std::min<std::size_t>(5, nyquist / report.fundamental_bin);
        if (report.harmonic_order >= 2) {
            report.thd = thd(series, report.fundamental_bin, report.harmonic_order);
        }
    }

    Series z(series.size(), 1);
    double mean = 0.0;
    for (double v : series) {
        mean += v;
    }
    mean /= static_cast<double>(series.size());
    double var = 0.0;
    for (double v : series) {
        var += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(var / static_cast<double>(series.size()));
    for (std::size_t i = 0; i < series.size(); ++i) {
        z(i, 0) = sd > 0.0 ? (series[i] - mean) / sd : 0.0;
    }
    const TokenMatrix tokens = tokenize_timestep(z, options.token_dim, options.seed);
    const std::size_t k = std::min(options.k, std::max<std::size_t>(1, tokens.length() / 2));
    report.redundancy_curve = redundancy_profile(tokens, options.thresholds, k, options.metric);

    report.gaussian_sigma = options.sigma;
    report.filtered_spectral_entropy = spectral_entropy(gaussian_lowpass(series, options.sigma));
    return report;
}

}  // namespace tsmerge
