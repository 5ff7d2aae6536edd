#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "qconc/linalg.hpp"
#include "qconc/matrix.hpp"

namespace qconc {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Derives the seed of an independent child stream from (seed, stream index).
/// Every sampling routine in the library takes its randomness through this,
/// so batch results are identical no matter how trials are scheduled.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    return detail::splitmix64(seed ^ detail::splitmix64(stream + 1));
}

/// Deterministic random source. Gaussians come from an explicit Box-Muller
/// transform over raw mt19937_64 words rather than std::normal_distribution,
/// whose output is implementation-defined; fixed seeds therefore reproduce
/// bit-identical streams everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    Complex gaussian_complex() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    /// Samples an index with probability proportional to weights[i].
    std::size_t sample_discrete(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) throw InvalidInputError("sample_discrete: nonpositive total weight");
        double x = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            x -= weights[i];
            if (x < 0.0) return i;
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Matrix with iid standard complex Gaussian entries.
inline ComplexMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    ComplexMatrix g(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.gaussian_complex();
    return g;
}

/// Haar-distributed unitary: Gaussian matrix followed by modified
/// Gram-Schmidt QR. Gram-Schmidt leaves the R diagonal real positive, which
/// is exactly the phase convention that makes Q Haar.
inline ComplexMatrix random_haar_unitary(std::size_t n, Rng& rng) {
    if (n == 0) throw InvalidInputError("random_haar_unitary: dimension must be positive");
    ComplexMatrix q = random_gaussian_matrix(n, n, rng);
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex dot{};
                for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, k)) * q(i, j);
                for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
            }
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += std::norm(q(i, j));
        while (norm2 < 1e-24) { // resample a degenerate column (measure zero)
            for (std::size_t i = 0; i < n; ++i) q(i, j) = rng.gaussian_complex();
            for (std::size_t k = 0; k < j; ++k) {
                Complex dot{};
                for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, k)) * q(i, j);
                for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
            }
            norm2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm2 += std::norm(q(i, j));
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < n; ++i) q(i, j) *= inv;
    }
    return q;
}

inline ComplexMatrix random_haar_unitary(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return random_haar_unitary(n, rng);
}

} // namespace qconc
