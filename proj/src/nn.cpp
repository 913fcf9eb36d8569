// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tsmerge/error.hpp"

namespace tsmerge {

double Rng::uniform() {
    return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (m_has_spare) {
        m_has_spare = false;
        return m_spare;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    m_spare = radius * std::sin(angle);
    m_has_spare = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over the combined words
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, double scale, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data()) {
        v = scale * rng.normal();
    }
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw Error(ErrorCode::shape,
                    "matmul " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " by " +
                        std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double av = a(i, p);
            const auto src = b.row(p);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                dst[j] += av * src[j];
            }
        }
    }
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::shape, "add: shape mismatch");
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] += b.data()[i];
    }
    return out;
}

Matrix layer_norm(const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    const double n = static_cast<double>(x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        double mean = 0.0;
        for (double v : row) {
            mean += v;
        }
        mean /= n;
        double var = 0.0;
        for (double v : row) {
            var += (v - mean) * (v - mean);
        }
        var /= n;
        const double inv = 1.0 / std::sqrt(var + 1e-5);
        auto dst = out.row(i);
        for (std::size_t c = 0; c < row.size(); ++c) {
            dst[c] = (row[c] - mean) * inv;
        }
    }
    return out;
}

void softmax_rows(Matrix& logits) {
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto row = logits.row(i);
        const double peak = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (double& v : row) {
            v = v == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(v - peak);
            total += v;
        }
        for (double& v : row) {
            v /= total;
        }
    }
}

double gelu(double v) {
    return 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2));
}

Matrix columns(const Matrix& x, std::size_t first, std::size_t count) {
    Matrix out(x.rows(), count);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto src = x.row(i);
        std::copy(src.begin() + static_cast<std::ptrdiff_t>(first),
                  src.begin() + static_cast<std::ptrdiff_t>(first + count), out.row(i).begin());
    }
    return out;
}

Matrix attention_weights(const Matrix& q,
                         const Matrix& k,
                         std::span<const double> key_bias,
                         std::span<const std::uint8_t> allowed) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    Matrix logits(q.rows(), k.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        const auto qi = q.row(i);
        for (std::size_t j = 0; j < k.rows(); ++j) {
            if (!allowed.empty() && allowed[i * k.rows() + j] == 0) {
                logits(i, j) = -std::numeric_limits<double>::infinity();
                continue;
            }
            const auto kj = k.row(j);
            double dot = 0.0;
            for (std::size_t c = 0; c < qi.size(); ++c) {
                dot += qi[c] * kj[c];
            }
            logits(i, j) = dot * scale + (key_bias.empty() ? 0.0 : key_bias[j]);
        }
    }
    softmax_rows(logits);
    return logits;
}

AttentionParams random_attention(std::size_t d, Rng& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    AttentionParams p;
    p.wq = random_matrix(d, d, scale, rng);
    p.wk = random_matrix(d, d, scale, rng);
    p.wv = random_matrix(d, d, scale, rng);
    p.wo = random_matrix(d, d, scale, rng);
    return p;
}

Matrix multi_head_attention(const Matrix& queries,
                            const Matrix& keys,
                            const AttentionParams& params,
                            std::size_t heads,
                            std::span<const double> key_bias,
                            std::span<const std::uint8_t> allowed) {
    const std::size_t d = queries.cols();
    if (heads == 0 || d % heads != 0) {
        throw Error(ErrorCode::shape, "model dimension not divisible by head count");
    }
    const std::size_t dh = d / heads;
    const Matrix q = matmul(queries, params.wq);
    const Matrix k = matmul(keys, params.wk);
    const Matrix v = matmul(keys, params.wv);
    Matrix merged(queries.rows(), d);
    for (std::size_t h = 0; h < heads; ++h) {
        const Matrix weights =
            attention_weights(columns(q, h * dh, dh), columns(k, h * dh, dh), key_bias, allowed);
        const Matrix head = matmul(weights, columns(v, h * dh, dh));
        for (std::size_t i = 0; i < head.rows(); ++i) {
            std::copy(head.row(i).begin(), head.row(i).end(),
                      merged.row(i).begin() + static_cast<std::ptrdiff_t>(h * dh));
        }
    }
    return matmul(merged, params.wo);
}

MlpParams random_mlp(std::size_t d, std::size_t h, Rng& rng) {
    MlpParams p;
    p.w1 = random_matrix(d, h, 1.0 / std::sqrt(static_cast<double>(d)), rng);
    p.w2 = random_matrix(h, d, 1.0 / std::sqrt(static_cast<double>(h)), rng);
    return p;
}

Matrix mlp(const Matrix& x, const MlpParams& params) {
    Matrix hidden = matmul(x, params.w1);
    for (double& v : hidden.data()) {
        v = gelu(v);
    }
    return matmul(hidden, params.w2);
}

}  // namespace tsmerge
