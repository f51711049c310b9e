#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "saddleflow/core.hpp"

namespace saddleflow {

/// Seeded generator whose output is identical across standard libraries:
/// std::mt19937_64 is fully specified, and the uniform/normal transforms
/// below are written out rather than taken from <random> distributions.
class Rng {
public:
    static constexpr const char* kName = "mt19937_64+box_muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1), 53 random bits.
    double uniform() {
        std::uint64_t bits = engine_() >> 11;
        while (bits == 0) bits = engine_() >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Uniform integer in [0, n) by rejection, n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    Matrix normal_matrix(Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) m(i, j) = normal();
        return m;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace saddleflow
