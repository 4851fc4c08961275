#pragma once

#include <cstdint>
#include <random>

#include "ltiflow/linalg.hpp"

namespace ltiflow {

/// Deterministic sampler. Avoids std::uniform_int_distribution, whose output
/// is implementation-defined; reports must be byte-identical across builds.
class Sampler {
   public:
    explicit Sampler(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    /// Uniform integer in [lo, hi]; modulo bias is negligible for desk-scale
    /// ranges against a 64-bit generator.
    long uniform_int(long lo, long hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long>(eng_() % span);
    }

    bool coin() { return (eng_() & 1u) != 0; }

    template <class F>
    F scalar(long bound) {
        return FieldOps<F>::from_int(uniform_int(-bound, bound));
    }

    /// Constant matrix with integer entries in [-bound, bound].
    template <class F>
    RatMatrix<F> int_matrix(std::size_t rows, std::size_t cols, long bound) {
        RatMatrix<F> m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = RatFn<F>(scalar<F>(bound));
        return m;
    }

    /// Constant matrix with entries j * scale for integer j in [-bound, bound].
    template <class F>
    RatMatrix<F> scaled_int_matrix(std::size_t rows, std::size_t cols, long bound,
                                   const F& scale) {
        RatMatrix<F> m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = RatFn<F>(scalar<F>(bound) * scale);
        return m;
    }

   private:
    std::mt19937_64 eng_;
};

/// Sampling parameters for randomized rank computation: integers are drawn
/// from [-sample_bound, sample_bound], `rounds` independent substitutions are
/// tried, and the seed is explicit for reproducibility.
struct RankConfig {
    long sample_bound = 1000000;
    unsigned rounds = 3;
    std::uint64_t seed = 0;

    void require_bound_at_least(std::size_t dim) const {
        if (sample_bound < static_cast<long>(dim))
            throw InvalidConfig("sample bound must be at least the matrix dimension");
    }
};

}  // namespace ltiflow
