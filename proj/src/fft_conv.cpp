// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/fft_conv.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>

namespace tsmerge {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const {
        fftw_free(p);
    }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> allocate(std::size_t n) {
    return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

class Plan {
public:
    explicit Plan(fftw_plan plan) : m_plan(plan) {}
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(m_plan);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    void execute() const {
        fftw_execute(m_plan);
    }

private:
    fftw_plan m_plan;
};

std::unique_ptr<Plan> forward_plan(int n, double* in, fftw_complex* out) {
    std::lock_guard lock(planner_mutex());
    return std::make_unique<Plan>(fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE));
}

std::unique_ptr<Plan> backward_plan(int n, fftw_complex* in, double* out) {
    std::lock_guard lock(planner_mutex());
    return std::make_unique<Plan>(fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE));
}

}  // namespace

std::size_t fft_length(std::size_t t) {
    std::size_t n = 1;
    while (n < 2 * t) {
        n <<= 1;
    }
    return n;
}

std::vector<double> causal_fft_convolve(std::span<const double> signal, std::span<const double> filter) {
    const std::size_t t = signal.size();
    if (t == 0) {
        return {};
    }
    const std::size_t n = fft_length(t);
    const std::size_t bins = n / 2 + 1;
    auto real = allocate<double>(n);
    auto spec_signal = allocate<fftw_complex>(bins);
    auto spec_filter = allocate<fftw_complex>(bins);
    const auto fwd_signal = forward_plan(static_cast<int>(n), real.get(), spec_signal.get());
    const auto fwd_filter = forward_plan(static_cast<int>(n), real.get(), spec_filter.get());
    const auto inverse = backward_plan(static_cast<int>(n), spec_signal.get(), real.get());

    std::fill(real.get(), real.get() + n, 0.0);
    std::copy(signal.begin(), signal.end(), real.get());
    fwd_signal->execute();

    std::fill(real.get(), real.get() + n, 0.0);
    std::copy_n(filter.begin(), std::min(filter.size(), t), real.get());
    fwd_filter->execute();

    for (std::size_t f = 0; f < bins; ++f) {
        const std::complex<double> a(spec_signal[f][0], spec_signal[f][1]);
        const std::complex<double> b(spec_filter[f][0], spec_filter[f][1]);
        const std::complex<double> c = a * b;
        spec_signal[f][0] = c.real();
        spec_signal[f][1] = c.imag();
    }
    inverse->execute();

    std::vector<double> out(t);
    const double norm = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < t; ++i) {
        out[i] = real[i] * norm;
    }
    return out;
}

std::vector<double> power_spectrum(std::span<const double> series) {
    const std::size_t m = series.size();
    if (m == 0) {
        return {};
    }
    const std::size_t bins = m / 2 + 1;
    auto real = allocate<double>(m);
    auto spectrum = allocate<fftw_complex>(bins);
    const auto plan = forward_plan(static_cast<int>(m), real.get(), spectrum.get());
    std::copy(series.begin(), series.end(), real.get());
    plan->execute();
    std::vector<double> power(bins);
    for (std::size_t f = 0; f < bins; ++f) {
        power[f] = spectrum[f][0] * spectrum[f][0] + spectrum[f][1] * spectrum[f][1];
    }
    return power;
}

}  // namespace tsmerge
