// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tsmerge {

/// Causal linear convolution y[i] = sum_{j<=i} filter[i-j] * signal[j] for
/// i < signal.size(), computed with zero-padded real FFTs.
std::vector<double> causal_fft_convolve(std::span<const double> signal, std::span<const double> filter);

/// Transform length used for a signal of length t: the smallest power of two >= 2t.
std::size_t fft_length(std::size_t t);

/// |X_f|^2 of the real DFT for f = 0 .. m/2.
std::vector<double> power_spectrum(std::span<const double> series);

}  // namespace tsmerge
