#pragma once

#include <cstdint>
#include <random>

namespace esir {

/// Seedable 64-bit stream. Each Monte Carlo replicate owns one, seeded with
/// base_seed + replicate_index, so serial and parallel runs draw identically.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return std::normal_distribution<double>{}(engine_); }
    double uniform() { return std::uniform_real_distribution<double>{}(engine_); }
    double chi_squared(double dof) { return std::chi_squared_distribution<double>{dof}(engine_); }
    double gamma(double shape) { return std::gamma_distribution<double>{shape, 1.0}(engine_); }
    double exponential() { return std::exponential_distribution<double>{1.0}(engine_); }
    double cauchy() { return std::cauchy_distribution<double>{}(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace esir
