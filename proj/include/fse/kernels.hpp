#pragma once

// Free-space Stokes kernels (stokeslet, stresslet, rotlet), direct O(N^2)
// summation, and the Ewald self-interaction correction.
//
// Strengths are the bare source coefficients f: any 8*pi*mu physical
// prefactor is the caller's responsibility.

#include <cstddef>
#include <vector>

#include "fse/vec3.hpp"

namespace fse {

enum class KernelKind { Stokeslet, Stresslet, Rotlet };

// Number of strength components: 3 for stokeslet/rotlet, 9 for the stresslet.
constexpr int strength_arity(KernelKind kind) {
    return kind == KernelKind::Stresslet ? 9 : 3;
}

// Either a 3-vector force (stokeslet, rotlet) or a 3x3 tensor f_{lm}
// (stresslet). Stored as a flat 9-slot array; unused slots stay zero.
struct Strength {
    std::array<double, 9> c{};
    int arity = 3;

    Strength() = default;

    static Strength vec(const Vec3& f) {
        Strength s;
        s.arity = 3;
        s.c[0] = f.x; s.c[1] = f.y; s.c[2] = f.z;
        return s;
    }

    // f_{lm} = n_l q_m, the double-layer form T_{jlm} n_l q_m.
    static Strength pair(const Vec3& q, const Vec3& n) {
        Strength s;
        s.arity = 9;
        for (int l = 0; l < 3; ++l)
            for (int m = 0; m < 3; ++m) s.c[3 * l + m] = n[l] * q[m];
        return s;
    }

    static Strength tensor(const std::array<double, 9>& f) {
        Strength s;
        s.arity = 9;
        s.c = f;
        return s;
    }

    double& operator()(int l, int m) { return c[3 * l + m]; }
    double operator()(int l, int m) const { return c[3 * l + m]; }
};

// N point sources with per-kernel strengths inside the cube [0,L]^3.
struct SourceSystem {
    std::vector<Vec3> positions;
    std::vector<Strength> strengths;
    double box_side = 1.0;

    std::size_t size() const { return positions.size(); }
    void validate(KernelKind kind) const;  // throws std::invalid_argument
};

using Velocities = std::vector<Vec3>;

// G(r) . f for the requested kernel. Throws std::domain_error at r = 0.
Vec3 eval_kernel(KernelKind kind, const Vec3& r, const Strength& f);

// Exact O(N * targets) sum. With exclude_self, targets must be the source
// positions and the n = m term is skipped. Coincident distinct points throw.
Velocities direct_sum(const SourceSystem& system, KernelKind kind,
                      const std::vector<Vec3>& targets, bool exclude_self);

// lim_{r->0} (G^R - G): -(4 xi / sqrt(pi)) f for the stokeslet, zero otherwise.
Vec3 self_interaction(double xi, const Strength& f, KernelKind kind);

// RMS of |u - u_ref|; divided by RMS of |u_ref| when relative.
double rms_error(const Velocities& u, const Velocities& u_ref, bool relative);

// Sum of squared strength components (Q in the truncation estimates).
double strength_quadratic_sum(const SourceSystem& system);

}  // namespace fse
