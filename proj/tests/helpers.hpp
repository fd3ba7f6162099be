#pragma once

// Shared test utilities: deterministic RNG helpers and random system builders.

#include <random>

#include "fse/kernels.hpp"

namespace fsetest {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline fse::Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
    return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

inline fse::Strength random_strength(std::mt19937_64& rng, fse::KernelKind kind) {
    fse::Strength s;
    s.arity = fse::strength_arity(kind);
    for (int k = 0; k < s.arity; ++k) s.c[k] = uniform(rng, -1.0, 1.0);
    return s;
}

inline fse::SourceSystem random_system(std::mt19937_64& rng, fse::KernelKind kind,
                                       std::size_t N, double L) {
    fse::SourceSystem sys;
    sys.box_side = L;
    for (std::size_t n = 0; n < N; ++n) {
        sys.positions.push_back(random_vec(rng, 0.0, L));
        sys.strengths.push_back(random_strength(rng, kind));
    }
    return sys;
}

constexpr fse::KernelKind kAllKinds[3] = {fse::KernelKind::Stokeslet,
                                          fse::KernelKind::Stresslet,
                                          fse::KernelKind::Rotlet};

}  // namespace fsetest
