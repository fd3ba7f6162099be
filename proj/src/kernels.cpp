#include "fse/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace fse {

void SourceSystem::validate(KernelKind kind) const {
    if (positions.empty()) throw std::invalid_argument("SourceSystem: N must be >= 1");
    if (positions.size() != strengths.size())
        throw std::invalid_argument("SourceSystem: positions/strengths length mismatch");
    if (!(box_side > 0)) throw std::invalid_argument("SourceSystem: box side must be positive");
    const int arity = strength_arity(kind);
    for (std::size_t n = 0; n < positions.size(); ++n) {
        const Vec3& p = positions[n];
        for (int d = 0; d < 3; ++d)
            if (!(p[d] >= 0 && p[d] <= box_side))
                throw std::invalid_argument("SourceSystem: position outside [0,L]^3");
        if (strengths[n].arity != arity)
            throw std::invalid_argument("SourceSystem: strength arity does not match kernel");
        for (int i = 0; i < 9; ++i)
            if (!std::isfinite(strengths[n].c[i]))
                throw std::invalid_argument("SourceSystem: non-finite strength");
    }
}

Vec3 eval_kernel(KernelKind kind, const Vec3& r, const Strength& f) {
    const double r2 = norm2(r);
    if (r2 == 0) throw std::domain_error("eval_kernel: zero separation");
    const double rn = std::sqrt(r2);

    switch (kind) {
        case KernelKind::Stokeslet: {
            // S_jl = delta_jl / r + r_j r_l / r^3
            const Vec3 fv{f.c[0], f.c[1], f.c[2]};
            const double rf = dot(r, fv);
            return (1.0 / rn) * fv + (rf / (r2 * rn)) * r;
        }
        case KernelKind::Stresslet: {
            // T_jlm = -6 r_j r_l r_m / r^5, contracted with f_lm
            double rfr = 0;
            for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 3; ++m) rfr += r[l] * f(l, m) * r[m];
            const double c = -6.0 * rfr / (r2 * r2 * rn);
            return c * r;
        }
        case KernelKind::Rotlet: {
            // Omega_jl = eps_jlm r_m / r^3 => u = f x r / r^3
            const Vec3 fv{f.c[0], f.c[1], f.c[2]};
            const double inv_r3 = 1.0 / (r2 * rn);
            return Vec3{fv.y * r.z - fv.z * r.y,
                        fv.z * r.x - fv.x * r.z,
                        fv.x * r.y - fv.y * r.x} * inv_r3;
        }
    }
    return {};
}

Velocities direct_sum(const SourceSystem& system, KernelKind kind,
                      const std::vector<Vec3>& targets, bool exclude_self) {
    const std::size_t nt = targets.size();
    const std::size_t ns = system.size();
    Velocities u(nt);
    bool coincident = false;  // exceptions must not escape the parallel region
#pragma omp parallel for schedule(static) reduction(|| : coincident)
    for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(nt); ++m) {
        Vec3 acc{};
        for (std::size_t n = 0; n < ns; ++n) {
            if (exclude_self && static_cast<std::size_t>(m) == n) continue;
            const Vec3 r = targets[m] - system.positions[n];
            if (r.x == 0 && r.y == 0 && r.z == 0) {
                coincident = true;
                continue;
            }
            acc += eval_kernel(kind, r, system.strengths[n]);
        }
        u[m] = acc;
    }
    if (coincident)
        throw std::domain_error("direct_sum: coincident target/source point");
    return u;
}

Vec3 self_interaction(double xi, const Strength& f, KernelKind kind) {
    if (!(xi > 0)) throw std::invalid_argument("self_interaction: xi must be positive");
    if (kind != KernelKind::Stokeslet) return {};
    const double c = -4.0 * xi / std::sqrt(M_PI);
    return c * Vec3{f.c[0], f.c[1], f.c[2]};
}

double rms_error(const Velocities& u, const Velocities& u_ref, bool relative) {
    if (u.size() != u_ref.size()) throw std::invalid_argument("rms_error: length mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num += norm2(u[i] - u_ref[i]);
        den += norm2(u_ref[i]);
    }
    const double n = static_cast<double>(u.size());
    const double abs_rms = std::sqrt(num / n);
    if (!relative) return abs_rms;
    if (den == 0) throw std::domain_error("rms_error: relative error of zero reference");
    return abs_rms / std::sqrt(den / n);
}

double strength_quadratic_sum(const SourceSystem& system) {
    double q = 0;
    for (const Strength& s : system.strengths)
        for (int i = 0; i < 9; ++i) q += s.c[i] * s.c[i];
    return q;
}

}  // namespace fse
