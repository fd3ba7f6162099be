#include "fse/ewald.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fse/fft.hpp"
#include "fse/realspace.hpp"

namespace fse {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Per-source support window and tensorized Gaussian weights.
struct SupportWeights {
    int i0[3];                      // first grid index per axis
    std::vector<double> w;          // 3 * P axis weights, [axis * P + p]
};

// exp(-alpha (x_node - x)^2) factorized per axis: two exponentials per axis
// plus a shared exp(-alpha (p h)^2) table (fast Gaussian gridding).
void axis_weights(const EwaldConfig& cfg, const Vec3& origin, const Vec3& x,
                  double alpha, const std::vector<double>& quad_table,
                  SupportWeights& out) {
    const int P = cfg.P;
    for (int axis = 0; axis < 3; ++axis) {
        const double s = (x[axis] - origin[axis]) / cfg.h;
        const int i0 = static_cast<int>(std::ceil(s - 0.5 * P));
        out.i0[axis] = i0;
        const double x0 = (i0 - s) * cfg.h;  // offset of first node
        const double e0 = std::exp(-alpha * x0 * x0);
        const double ratio = std::exp(-2.0 * alpha * x0 * cfg.h);
        double r = 1.0;
        double* w = &out.w[axis * P];
        for (int p = 0; p < P; ++p) {
            w[p] = e0 * r * quad_table[p];
            r *= ratio;
        }
    }
}

void axis_weights_naive(const EwaldConfig& cfg, const Vec3& origin, const Vec3& x,
                        double alpha, SupportWeights& out) {
    const int P = cfg.P;
    for (int axis = 0; axis < 3; ++axis) {
        const double s = (x[axis] - origin[axis]) / cfg.h;
        const int i0 = static_cast<int>(std::ceil(s - 0.5 * P));
        out.i0[axis] = i0;
        double* w = &out.w[axis * P];
        for (int p = 0; p < P; ++p) {
            const double dx = (i0 + p - s) * cfg.h;
            w[p] = std::exp(-alpha * dx * dx);
        }
    }
}

// Points sorted by support-sized blocks so consecutive iterations touch
// nearby grid memory; matters once the grids outgrow the cache.
std::vector<std::size_t> spatial_order(const std::vector<Vec3>& pts,
                                       double block, double L) {
    const int nb = std::max(1, static_cast<int>(L / block));
    const double inv = nb / L;
    auto key = [&](const Vec3& p) {
        const int i = std::clamp(static_cast<int>(p.x * inv), 0, nb - 1);
        const int j = std::clamp(static_cast<int>(p.y * inv), 0, nb - 1);
        const int k = std::clamp(static_cast<int>(p.z * inv), 0, nb - 1);
        return (static_cast<std::size_t>(i) * nb + j) * nb + k;
    };
    std::vector<std::size_t> order(pts.size());
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return key(pts[a]) < key(pts[b]); });
    return order;
}

void check_support(const SupportWeights& sw, int P, int Mt) {
    for (int axis = 0; axis < 3; ++axis)
        if (sw.i0[axis] < 0 || sw.i0[axis] + P > Mt)
            throw std::invalid_argument("spread/quadrature: point support exceeds grid");
}

void check_green(const EwaldConfig& cfg, KernelKind kind, const MollifiedGreen& green) {
    if (green.kind != green_kind_for(kind))
        throw std::invalid_argument("fourier_sum: green kind does not match kernel");
    if (green.Mtilde != cfg.Mtilde ||
        std::abs(green.Ltilde - cfg.Ltilde) > 1e-12 * cfg.Ltilde)
        throw std::invalid_argument("fourier_sum: green grid does not match config");
}

}  // namespace

EwaldConfig make_config(double L, double xi, double rc, int M, int P, double sf) {
    if (!(L > 0) || !(xi > 0) || !(rc > 0) || M < 1 || P < 2)
        throw std::invalid_argument("make_config: all parameters must be positive");
    if (P % 2 != 0) throw std::invalid_argument("make_config: P must be even");

    EwaldConfig cfg;
    cfg.L = L;
    cfg.xi = xi;
    cfg.rc = rc;
    cfg.M = M;
    cfg.P = P;
    cfg.h = L / M;
    cfg.d = cfg.h * P;
    cfg.m = 0.976 * std::sqrt(M_PI * P);
    cfg.eta = (xi * cfg.d / cfg.m) * (xi * cfg.d / cfg.m);

    double raw = cfg.d;
    if (cfg.eta < 1.0)
        raw = std::max(cfg.d, std::sqrt(2.0 * (1.0 - cfg.eta)) * cfg.m / xi);
    const int pad = static_cast<int>(std::ceil(raw / cfg.h - 1e-12));
    cfg.deltaL = pad * cfg.h;
    cfg.Mtilde = M + pad;
    cfg.Ltilde = cfg.Mtilde * cfg.h;
    cfg.kinf = M_PI * cfg.Mtilde / cfg.Ltilde;
    cfg.R = std::sqrt(3.0) * cfg.Ltilde;
    cfg.sf = sf > 0 ? sf : 1.0 + std::sqrt(3.0);
    if (cfg.sf < 1.0 + std::sqrt(3.0) - 1e-12)
        throw std::invalid_argument("make_config: sf below 1 + sqrt(3)");
    if (P > cfg.Mtilde)
        throw std::invalid_argument("make_config: Gaussian support exceeds grid");
    return cfg;
}

GriddedSources spread(const SourceSystem& system, const EwaldConfig& cfg,
                      KernelKind kind, bool use_fgg) {
    if (std::abs(system.box_side - cfg.L) > 1e-12 * cfg.L)
        throw std::invalid_argument("spread: config box does not match system");
    const int Mt = cfg.Mtilde;
    const int P = cfg.P;
    const int arity = strength_arity(kind);

    GriddedSources grid;
    grid.extents[0] = grid.extents[1] = grid.extents[2] = Mt;
    grid.h = cfg.h;
    grid.origin = Vec3{-cfg.deltaL / 2, -cfg.deltaL / 2, -cfg.deltaL / 2};
    grid.arity = arity;
    grid.components.assign(arity, std::vector<double>(
        static_cast<std::size_t>(Mt) * Mt * Mt, 0.0));

    const double alpha = 2.0 * cfg.xi * cfg.xi / cfg.eta;
    const double prefac = std::pow(2.0 * cfg.xi * cfg.xi / (M_PI * cfg.eta), 1.5);
    std::vector<double> quad_table(P);
    for (int p = 0; p < P; ++p)
        quad_table[p] = std::exp(-alpha * (p * cfg.h) * (p * cfg.h));

    const std::vector<std::size_t> order =
        spatial_order(system.positions, cfg.d, cfg.L);

    int nthreads = 1;
#ifdef _OPENMP
    nthreads = cfg.deterministic ? 1 : omp_get_max_threads();
#endif

#pragma omp parallel num_threads(nthreads)
    {
        // Private partial grids merged by summation: no atomics, the merge
        // order is the documented 1e-13-level nondeterminism source.
        std::vector<std::vector<double>> local;
        std::vector<std::vector<double>>* dst = &grid.components;
#ifdef _OPENMP
        if (nthreads > 1) {
            local.assign(arity, std::vector<double>(grid.components[0].size(), 0.0));
            dst = &local;
        }
#endif
        SupportWeights sw;
        sw.w.resize(3 * static_cast<std::size_t>(P));
#pragma omp for schedule(static)
        for (std::ptrdiff_t ns = 0; ns < static_cast<std::ptrdiff_t>(system.size()); ++ns) {
            const std::size_t n = order[ns];
            if (use_fgg)
                axis_weights(cfg, grid.origin, system.positions[n], alpha, quad_table, sw);
            else
                axis_weights_naive(cfg, grid.origin, system.positions[n], alpha, sw);
            check_support(sw, P, Mt);
            const Strength& f = system.strengths[n];
            for (int i = 0; i < P; ++i) {
                const double wx = sw.w[i];
                for (int j = 0; j < P; ++j) {
                    const double wxy = wx * sw.w[P + j];
                    const std::size_t base =
                        (static_cast<std::size_t>(sw.i0[0] + i) * Mt + (sw.i0[1] + j)) * Mt +
                        sw.i0[2];
                    for (int k = 0; k < P; ++k) {
                        const double w = prefac * wxy * sw.w[2 * P + k];
                        for (int c = 0; c < arity; ++c)
                            (*dst)[c][base + k] += w * f.c[c];
                    }
                }
            }
        }
#ifdef _OPENMP
        if (nthreads > 1) {
#pragma omp critical
            for (int c = 0; c < arity; ++c)
                for (std::size_t q = 0; q < local[c].size(); ++q)
                    grid.components[c][q] += local[c][q];
        }
#endif
    }
    return grid;
}

std::vector<std::vector<std::complex<double>>> kspace_scale(
    const std::vector<std::vector<std::complex<double>>>& ghat,
    const EwaldConfig& cfg, KernelKind kind, const MollifiedGreen& green) {
    check_green(cfg, kind, green);
    const int arity = strength_arity(kind);
    if (static_cast<int>(ghat.size()) != arity)
        throw std::invalid_argument("kspace_scale: component count does not match kernel");
    const int D = green.doubled();
    const std::size_t total = static_cast<std::size_t>(D) * D * D;
    for (const auto& plane : ghat)
        if (plane.size() != total)
            throw std::invalid_argument("kspace_scale: plane size does not match grid");

    std::vector<std::vector<std::complex<double>>> out(
        3, std::vector<std::complex<double>>(total));

    const double dk = M_PI / cfg.Ltilde;  // doubled-grid wavenumber spacing
    const double inv4xi2 = 1.0 / (4.0 * cfg.xi * cfg.xi);
    std::vector<double> kax(D);
    for (int a = 0; a < D; ++a) kax[a] = dk * (a < D / 2 ? a : a - D);

#pragma omp parallel for schedule(static)
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            const std::size_t row = (static_cast<std::size_t>(i) * D + j) * D;
            const Vec3 kij{kax[i], kax[j], 0};
            for (int l = 0; l < D; ++l) {
                const std::size_t idx = row + l;
                const Vec3 k{kij.x, kij.y, kax[l]};
                const double k2 = norm2(k);
                const double remainder = std::exp(-(1.0 - cfg.eta) * k2 * inv4xi2);
                const double gval = green.fourier[idx];
                switch (kind) {
                    case KernelKind::Stokeslet: {
                        // -(k^2 I - k k)(1 + k^2/4xi^2) Bhat
                        const double b = -gval * (1.0 + k2 * inv4xi2) * remainder;
                        const std::complex<double> g0 = ghat[0][idx], g1 = ghat[1][idx],
                                                   g2 = ghat[2][idx];
                        const std::complex<double> kg = k.x * g0 + k.y * g1 + k.z * g2;
                        out[0][idx] = b * (k2 * g0 - k.x * kg);
                        out[1][idx] = b * (k2 * g1 - k.y * kg);
                        out[2][idx] = b * (k2 * g2 - k.z * kg);
                        break;
                    }
                    case KernelKind::Stresslet: {
                        const double b = gval * (1.0 + k2 * inv4xi2) * remainder;
                        std::complex<double> a[3] = {};  // ghat_jm k_m
                        std::complex<double> bt[3] = {}; // k_l ghat_lj
                        std::complex<double> tr = 0, kgk = 0;
                        for (int p = 0; p < 3; ++p) {
                            tr += ghat[3 * p + p][idx];
                            for (int q = 0; q < 3; ++q) {
                                a[p] += ghat[3 * p + q][idx] * k[q];
                                bt[q] += k[p] * ghat[3 * p + q][idx];
                            }
                        }
                        for (int p = 0; p < 3; ++p) kgk += k[p] * a[p];
                        const std::complex<double> ib(0.0, -b);
                        for (int p = 0; p < 3; ++p)
                            out[p][idx] =
                                ib * (k2 * (a[p] + bt[p] + k[p] * tr) - 2.0 * k[p] * kgk);
                        break;
                    }
                    case KernelKind::Rotlet: {
                        // -i eps_jlm k_m Hhat ghat_l = -i Hhat (ghat x k)_j
                        const std::complex<double> c(0.0, -gval * remainder);
                        const std::complex<double> g0 = ghat[0][idx], g1 = ghat[1][idx],
                                                   g2 = ghat[2][idx];
                        out[0][idx] = c * (g1 * k.z - g2 * k.y);
                        out[1][idx] = c * (g2 * k.x - g0 * k.z);
                        out[2][idx] = c * (g0 * k.y - g1 * k.x);
                        break;
                    }
                }
            }
        }
    return out;
}

Velocities fourier_sum(const SourceSystem& system, const EwaldConfig& cfg,
                       KernelKind kind, const std::vector<Vec3>& targets,
                       const MollifiedGreen& green, StageTimings* timings) {
    check_green(cfg, kind, green);
    for (const Vec3& t : targets)
        for (int d = 0; d < 3; ++d)
            if (!(t[d] >= 0 && t[d] <= cfg.L))
                throw std::invalid_argument("fourier_sum: target outside [0,L]^3");

    const int Mt = cfg.Mtilde;
    const int D = 2 * Mt;
    const std::size_t totalD = static_cast<std::size_t>(D) * D * D;
    const int arity = strength_arity(kind);

    auto t0 = Clock::now();
    GriddedSources grid = spread(system, cfg, kind);
    if (timings) timings->spread += seconds_since(t0);

    // Zero-pad each component to the doubled grid and transform.
    t0 = Clock::now();
    std::vector<std::vector<std::complex<double>>> ghat(arity);
    for (int c = 0; c < arity; ++c) {
        ghat[c].assign(totalD, {});
        for (int i = 0; i < Mt; ++i)
            for (int j = 0; j < Mt; ++j) {
                const std::size_t src = (static_cast<std::size_t>(i) * Mt + j) * Mt;
                const std::size_t dst = (static_cast<std::size_t>(i) * D + j) * D;
                for (int l = 0; l < Mt; ++l) ghat[c][dst + l] = grid.components[c][src + l];
            }
        fft3d_forward(ghat[c].data(), D, D, D);
    }
    grid.components.clear();
    if (timings) timings->fft += seconds_since(t0);

    t0 = Clock::now();
    auto what = kspace_scale(ghat, cfg, kind, green);
    ghat.clear();
    if (timings) timings->scale += seconds_since(t0);

    t0 = Clock::now();
    std::vector<std::vector<double>> w(3, std::vector<double>(
        static_cast<std::size_t>(Mt) * Mt * Mt));
    for (int c = 0; c < 3; ++c) {
        fft3d_inverse(what[c].data(), D, D, D);
        for (int i = 0; i < Mt; ++i)
            for (int j = 0; j < Mt; ++j) {
                const std::size_t src = (static_cast<std::size_t>(i) * D + j) * D;
                const std::size_t dst = (static_cast<std::size_t>(i) * Mt + j) * Mt;
                for (int l = 0; l < Mt; ++l) w[c][dst + l] = what[c][src + l].real();
            }
    }
    what.clear();
    if (timings) timings->fft += seconds_since(t0);

    // Trapezoidal quadrature with the same truncated Gaussians.
    t0 = Clock::now();
    const double alpha = 2.0 * cfg.xi * cfg.xi / cfg.eta;
    const double prefac = std::pow(2.0 * cfg.xi * cfg.xi / (M_PI * cfg.eta), 1.5);
    const double h3 = cfg.h * cfg.h * cfg.h;
    const Vec3 origin{-cfg.deltaL / 2, -cfg.deltaL / 2, -cfg.deltaL / 2};
    std::vector<double> quad_table(cfg.P);
    for (int p = 0; p < cfg.P; ++p)
        quad_table[p] = std::exp(-alpha * (p * cfg.h) * (p * cfg.h));

    const std::vector<std::size_t> order = spatial_order(targets, cfg.d, cfg.L);
    Velocities u(targets.size());
#pragma omp parallel
    {
        SupportWeights sw;
        sw.w.resize(3 * static_cast<std::size_t>(cfg.P));
#pragma omp for schedule(static)
        for (std::ptrdiff_t ms = 0; ms < static_cast<std::ptrdiff_t>(targets.size());
             ++ms) {
            const std::size_t mth = order[ms];
            axis_weights(cfg, origin, targets[mth], alpha, quad_table, sw);
            check_support(sw, cfg.P, Mt);
            Vec3 acc{};
            for (int i = 0; i < cfg.P; ++i) {
                const double wx = sw.w[i];
                for (int j = 0; j < cfg.P; ++j) {
                    const double wxy = wx * sw.w[cfg.P + j];
                    const std::size_t base =
                        (static_cast<std::size_t>(sw.i0[0] + i) * Mt + (sw.i0[1] + j)) * Mt +
                        sw.i0[2];
                    for (int l = 0; l < cfg.P; ++l) {
                        const double wt = wxy * sw.w[2 * cfg.P + l];
                        acc.x += wt * w[0][base + l];
                        acc.y += wt * w[1][base + l];
                        acc.z += wt * w[2][base + l];
                    }
                }
            }
            u[mth] = h3 * prefac * acc;
        }
    }
    if (timings) timings->quadrature += seconds_since(t0);
    return u;
}

Velocities total_sum(const SourceSystem& system, KernelKind kind,
                     const EwaldConfig& cfg, const std::vector<Vec3>& targets,
                     const MollifiedGreen& green, StageTimings* timings) {
    auto t_all = Clock::now();
    Velocities u = fourier_sum(system, cfg, kind, targets, green, timings);

    auto t0 = Clock::now();
    Velocities ur = real_space_sum(system, kind, cfg.xi, cfg.rc, targets);
    if (timings) timings->realspace += seconds_since(t0);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += ur[i];

    const bool targets_are_sources =
        targets.size() == system.size() &&
        std::equal(targets.begin(), targets.end(), system.positions.begin());
    if (targets_are_sources && kind == KernelKind::Stokeslet)
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] += self_interaction(cfg.xi, system.strengths[i], kind);

    if (timings) timings->total += std::chrono::duration<double>(
        Clock::now() - t_all).count();
    return u;
}

}  // namespace fse
