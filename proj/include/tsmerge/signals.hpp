// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tsmerge/seqcore.hpp"

namespace tsmerge {

/// Spectral bins whose power is below this fraction of the strongest
/// positive-frequency bin are treated as empty (FFT round-off, not signal).
inline constexpr double kSpectralFloor = 1e-20;

/// Shannon entropy (nats) of the normalised power spectrum over positive
/// frequencies 1 .. m/2, DC excluded. A series without AC power scores 0.
double spectral_entropy(std::span<const double> series);

/// Total harmonic distortion in percent:
/// 100 * sqrt(sum_{h=2..order} P(h f)) / sqrt(P(f)), amplitudes at exact bins.
/// Throws ErrorCode::parameter if order * f exceeds Nyquist and
/// ErrorCode::undefined_thd if the fundamental carries no power.
double thd(std::span<const double> series, std::size_t fundamental_bin, std::size_t order = 5);

/// Strongest positive-frequency bin (lowest on ties); 0 when there is no AC power.
std::size_t dominant_bin(std::span<const double> series);

/// Truncated Gaussian (radius ceil(4 sigma)), normalised to unit sum.
std::vector<double> gaussian_kernel(double sigma);

/// Convolution with gaussian_kernel(sigma) using half-sample symmetric
/// reflection at the boundaries. Throws ErrorCode::parameter for sigma <= 0.
std::vector<double> gaussian_lowpass(std::span<const double> series, double sigma);

struct RedundancyPoint {
    double threshold = 0.0;
    double fraction = 0.0;
};

/// For each threshold, the share of A tokens whose best in-band partner has
/// similarity >= threshold. Thresholds must be ascending.
std::vector<RedundancyPoint> redundancy_profile(const TokenMatrix& x,
                                                std::span<const double> thresholds,
                                                std::size_t k,
                                                Metric metric);

struct SignalReport {
    double spectral_entropy = 0.0;
    std::optional<double> thd;  // percent; empty if no harmonic fits below Nyquist
    std::size_t fundamental_bin = 0;
    std::size_t harmonic_order = 0;
    std::vector<RedundancyPoint> redundancy_curve;
    double gaussian_sigma = 0.0;
    double filtered_spectral_entropy = 0.0;
};

struct AnalyzeOptions {
    double sigma = 2.0;
    std::vector<double> thresholds = default_thresholds();
    std::size_t token_dim = 16;
    std::size_t k = 1;
    Metric metric = Metric::cosine;
    std::uint64_t seed = 0;

    static std::vector<double> default_thresholds();
};

/// Entropy, THD at the dominant bin, the redundancy curve of the z-scored
/// series under the timestep tokenizer, and the entropy after low-pass filtering.
SignalReport analyze_series(std::span<const double> series, const AnalyzeOptions& options);

}  // namespace tsmerge
