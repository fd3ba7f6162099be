#include "fse/realspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fse {

namespace {
constexpr double kInvSqrtPi = 0.5641895835477562869;  // 1/sqrt(pi)
}

Vec3 eval_real_kernel(KernelKind kind, const Vec3& r, double xi, const Strength& f) {
    const double r2 = norm2(r);
    if (r2 == 0) throw std::domain_error("eval_real_kernel: zero separation");
    if (!(xi > 0)) throw std::invalid_argument("eval_real_kernel: xi must be positive");
    const double rn = std::sqrt(r2);
    const double xr = xi * rn;
    const double gauss = std::exp(-xr * xr);
    const double erfc_xr = std::erfc(xr);
    const Vec3 rh = (1.0 / rn) * r;

    switch (kind) {
        case KernelKind::Stokeslet: {
            // 2(xi e^{-xi^2 r^2}/sqrt(pi) + erfc(xi r)/(2r))(I + rh rh)
            //   - (4 xi / sqrt(pi)) e^{-xi^2 r^2} I
            const Vec3 fv{f.c[0], f.c[1], f.c[2]};
            const double a = 2.0 * (xi * gauss * kInvSqrtPi + erfc_xr / (2.0 * rn));
            const double b = 4.0 * xi * kInvSqrtPi * gauss;
            return (a - b) * fv + (a * dot(rh, fv)) * rh;
        }
        case KernelKind::Stresslet: {
            const double c1 = -(2.0 / rn) *
                (3.0 * erfc_xr / rn + 2.0 * xi * kInvSqrtPi * (3.0 + 2.0 * xr * xr) * gauss);
            const double c2 = 4.0 * xi * xi * xi * kInvSqrtPi * gauss * rn;
            double rfr = 0;     // rh_l f_lm rh_m
            Vec3 f_r{}, r_f{};  // f_jm rh_m and rh_l f_lj
            for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 3; ++m) {
                    rfr += rh[l] * f(l, m) * rh[m];
                    f_r[l] += f(l, m) * rh[m];
                    r_f[m] += rh[l] * f(l, m);
                }
            double trf = f(0, 0) + f(1, 1) + f(2, 2);
            // c1 rh_j rh_l rh_m f_lm + c2 (d_jl rh_m + d_lm rh_j + d_mj rh_l) f_lm
            return (c1 * rfr + c2 * trf) * rh + c2 * (f_r + r_f);
        }
        case KernelKind::Rotlet: {
            // eps_jlm rh_m (erfc(xi r)/r^2 + (2 xi/sqrt(pi)) e^{-xi^2 r^2}/r) f_l
            const Vec3 fv{f.c[0], f.c[1], f.c[2]};
            const double c = erfc_xr / r2 + 2.0 * xi * kInvSqrtPi * gauss / rn;
            return c * Vec3{fv.y * rh.z - fv.z * rh.y,
                            fv.z * rh.x - fv.x * rh.z,
                            fv.x * rh.y - fv.y * rh.x};
        }
    }
    return {};
}

int CellList::cell_of(double coord, int axis) const {
    int c = static_cast<int>(std::floor((coord - origin) / cell_side));
    return std::clamp(c, 0, dims[axis] - 1);
}

CellList build_cell_list(const SourceSystem& system, double rc, double domain_pad) {
    if (!(rc > 0)) throw std::invalid_argument("build_cell_list: rc must be positive");
    CellList cl;
    cl.origin = -domain_pad;
    const double extent = system.box_side + 2.0 * domain_pad;
    // floor keeps every cell side >= rc, so one neighbor layer suffices; the
    // cap keeps the bucket count O(N) when rc is far below the point spacing
    const int cap = 1 + static_cast<int>(
        std::cbrt(8.0 * static_cast<double>(std::max<std::size_t>(system.size(), 1))));
    const int want = std::max(1, static_cast<int>(std::floor(extent / rc)));
    for (int d = 0; d < 3; ++d) cl.dims[d] = std::min(want, cap);
    cl.cell_side = extent / cl.dims[0];
    cl.buckets.assign(static_cast<std::size_t>(cl.dims[0]) * cl.dims[1] * cl.dims[2], {});
    for (std::size_t n = 0; n < system.size(); ++n) {
        const Vec3& p = system.positions[n];
        cl.buckets[cl.bucket_index(cl.cell_of(p.x, 0), cl.cell_of(p.y, 1), cl.cell_of(p.z, 2))]
            .push_back(n);
    }
    return cl;
}

Velocities real_space_sum(const SourceSystem& system, KernelKind kind,
                          double xi, double rc, const std::vector<Vec3>& targets) {
    if (!(xi > 0) || !(rc > 0))
        throw std::invalid_argument("real_space_sum: xi and rc must be positive");
    const CellList cl = build_cell_list(system, rc);
    const double rc2 = rc * rc;

    // Bucket-contiguous copies of the sources and a bucket-sorted target
    // order keep the traversal cache-friendly at large N.
    std::vector<std::size_t> bstart(cl.buckets.size() + 1, 0);
    std::vector<Vec3> spos(system.size());
    std::vector<Strength> sstr(system.size());
    {
        std::size_t at = 0;
        for (std::size_t b = 0; b < cl.buckets.size(); ++b) {
            bstart[b] = at;
            for (std::size_t n : cl.buckets[b]) {
                spos[at] = system.positions[n];
                sstr[at] = system.strengths[n];
                ++at;
            }
        }
        bstart[cl.buckets.size()] = at;
    }
    std::vector<std::size_t> order(targets.size());
    for (std::size_t m = 0; m < order.size(); ++m) order[m] = m;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Vec3 &pa = targets[a], &pb = targets[b];
        return cl.bucket_index(cl.cell_of(pa.x, 0), cl.cell_of(pa.y, 1),
                               cl.cell_of(pa.z, 2)) <
               cl.bucket_index(cl.cell_of(pb.x, 0), cl.cell_of(pb.y, 1),
                               cl.cell_of(pb.z, 2));
    });

    Velocities u(targets.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ms = 0; ms < static_cast<std::ptrdiff_t>(targets.size()); ++ms) {
        const std::size_t m = order[ms];
        const Vec3& x = targets[m];
        const int ci = cl.cell_of(x.x, 0), cj = cl.cell_of(x.y, 1), ck = cl.cell_of(x.z, 2);
        Vec3 acc{};
        for (int di = -1; di <= 1; ++di) {
            const int i = ci + di;
            if (i < 0 || i >= cl.dims[0]) continue;
            for (int dj = -1; dj <= 1; ++dj) {
                const int j = cj + dj;
                if (j < 0 || j >= cl.dims[1]) continue;
                for (int dk = -1; dk <= 1; ++dk) {
                    const int k = ck + dk;
                    if (k < 0 || k >= cl.dims[2]) continue;
                    const std::size_t b = cl.bucket_index(i, j, k);
                    for (std::size_t n = bstart[b]; n < bstart[b + 1]; ++n) {
                        const Vec3 r = x - spos[n];
                        const double d2 = norm2(r);
                        if (d2 == 0 || d2 > rc2) continue;  // self term skipped
                        acc += eval_real_kernel(kind, r, xi, sstr[n]);
                    }
                }
            }
        }
        u[m] = acc;
    }
    return u;
}

}  // namespace fse
