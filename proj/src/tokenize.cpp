// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/tokenize.hpp"

#include <cmath>
#include <string>

#include "tsmerge/error.hpp"
#include "tsmerge/nn.hpp"

namespace tsmerge {

namespace {

constexpr std::uint64_t kTokenizerStream = 0x7a;

}  // namespace

Matrix positional_embedding(std::size_t t, std::size_t d) {
    Matrix pe(t, d);
    for (std::size_t pos = 0; pos < t; ++pos) {
        for (std::size_t c = 0; c < d; ++c) {
            const double exponent = static_cast<double>(2 * (c / 2)) / static_cast<double>(d);
            const double angle = static_cast<double>(pos) / std::pow(10000.0, exponent);
            pe(pos, c) = c % 2 == 0 ? std::sin(angle) : std::cos(angle);
        }
    }
    return pe;
}

TokenMatrix tokenize_patch(const Series& u, std::size_t patch_len, std::size_t d, std::uint64_t seed) {
    if (u.m == 0 || u.n == 0) {
        throw Error(ErrorCode::shape, "series must have at least one time stamp and one variate");
    }
    if (d == 0) {
        throw Error(ErrorCode::shape, "token dimension must be positive");
    }
    if (patch_len == 0 || u.m % patch_len != 0) {
        throw Error(ErrorCode::shape,
                    "patch length " + std::to_string(patch_len) + " does not divide m=" + std::to_string(u.m));
    }
    const std::size_t t = u.m / patch_len;
    const std::size_t width = patch_len * u.n;
    Rng rng(Rng::derive(seed, kTokenizerStream + patch_len));
    const Matrix projection = random_matrix(width, d, 1.0 / std::sqrt(static_cast<double>(width)), rng);
    Matrix patches(t, width);
    for (std::size_t p = 0; p < t; ++p) {
        for (std::size_t s = 0; s < patch_len; ++s) {
            for (std::size_t c = 0; c < u.n; ++c) {
                patches(p, s * u.n + c) = u(p * patch_len + s, c);
            }
        }
    }
    return TokenMatrix(add(matmul(patches, projection), positional_embedding(t, d)));
}

TokenMatrix tokenize_timestep(const Series& u, std::size_t d, std::uint64_t seed) {
    return tokenize_patch(u, 1, d, seed);
}

}  // namespace tsmerge
