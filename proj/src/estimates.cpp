#include "fse/estimates.hpp"

#include <cmath>
#include <stdexcept>

namespace fse {

namespace {
// Calibration margin on top of the statistical estimates; keeps measured
// errors under tolerance without moving rc/M more than a grid step.
constexpr double kSafety = 2.0;
}

double fourier_error_estimate(KernelKind kind, double Q, double xi, double k_inf,
                              double L, double R) {
    if (!(Q >= 0) || !(xi > 0) || !(k_inf > 0) || !(L > 0) || !(R > 0))
        throw std::invalid_argument("fourier_error_estimate: bad arguments");
    const double decay = std::exp(-k_inf * k_inf / (4.0 * xi * xi));
    switch (kind) {
        case KernelKind::Stokeslet:
            return std::sqrt(Q) * R * k_inf * k_inf * k_inf /
                   (xi * xi * M_PI * L) * decay;
        case KernelKind::Stresslet:
            return std::sqrt(7.0 * Q / 6.0) * R * k_inf * k_inf * k_inf * k_inf /
                   (xi * xi * M_PI * L) * decay;
        case KernelKind::Rotlet:
            return std::sqrt(8.0 * xi * xi * Q / (3.0 * M_PI * L * L * L * k_inf)) * decay;
    }
    return 0;
}

double real_error_estimate(KernelKind kind, double Q, double xi, double rc, double L) {
    if (!(Q >= 0) || !(xi > 0) || !(rc > 0) || !(L > 0))
        throw std::invalid_argument("real_error_estimate: bad arguments");
    const double L3 = L * L * L;
    const double decay = std::exp(-xi * xi * rc * rc);
    switch (kind) {
        case KernelKind::Stokeslet:
            return std::sqrt(4.0 * Q * rc / L3) * decay;
        case KernelKind::Stresslet:
            return std::sqrt(112.0 * Q * xi * xi * xi * xi * rc * rc * rc / (9.0 * L3)) *
                   decay;
        case KernelKind::Rotlet:
            return std::sqrt(8.0 * Q / (3.0 * L3 * rc)) * decay;
    }
    return 0;
}

ErrorBudget error_budget(KernelKind kind, const EwaldConfig& cfg, double Q) {
    ErrorBudget b;
    b.kind = kind;
    b.xi = cfg.xi;
    b.rc = cfg.rc;
    b.k_inf = cfg.kinf;
    b.L = cfg.L;
    b.R = cfg.R;
    b.Q = Q;
    b.predicted_real_rms = real_error_estimate(kind, Q, cfg.xi, cfg.rc, cfg.L);
    b.predicted_fourier_rms =
        fourier_error_estimate(kind, Q, cfg.xi, cfg.kinf, cfg.L, cfg.R);
    return b;
}

double reference_velocity_rms(KernelKind kind, double Q, double L, std::size_t N) {
    // Kolafa-Perram style magnitude of the full (untruncated) sum:
    // Q/L^3 times the integral of the mean-square kernel over the domain.
    // The 1/r^4 kernels need a lower cutoff at the typical point spacing.
    const double a = 0.5 * L / std::cbrt(static_cast<double>(std::max<std::size_t>(N, 8)));
    const double L3 = L * L * L;
    switch (kind) {
        case KernelKind::Stokeslet:
            return std::sqrt(Q * 4.0 * M_PI / (L * L));
        case KernelKind::Stresslet:
            return std::sqrt(Q * 16.0 * M_PI * (1.0 / a - 2.0 / L) / L3);
        case KernelKind::Rotlet:
            return std::sqrt(Q * (8.0 * M_PI / 3.0) * (1.0 / a - 2.0 / L) / L3);
    }
    return 0;
}

SelectedParameters select_parameters(KernelKind kind, std::size_t N, double L,
                                     double Q, double xi, double tol) {
    if (!(tol > 0) || !(xi > 0) || !(L > 0) || N < 1)
        throw std::invalid_argument("select_parameters: bad arguments");

    // P = 16 gives ~8 digits, 24 gives ~12, 32 puts approximation errors
    // at round-off.
    int P = 32;
    if (tol >= 5e-9) P = 16;
    else if (tol >= 1e-12) P = 24;

    const double ref = reference_velocity_rms(kind, Q, L, N);
    const double budget = 0.5 * tol * ref / kSafety;

    // rc: bisect the monotone tail xi*rc >= 1 of the real-space estimate.
    const double rc_max = std::sqrt(3.0) * L;
    const double rc_min = 1.0 / xi;
    SelectedParameters sel;
    double rc;
    if (real_error_estimate(kind, Q, xi, rc_max, L) > budget) {
        sel.feasible = false;  // direct summation recommended
        rc = rc_max;
    } else if (real_error_estimate(kind, Q, xi, rc_min, L) <= budget) {
        rc = rc_min;
    } else {
        double lo = rc_min, hi = rc_max;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (real_error_estimate(kind, Q, xi, mid, L) <= budget ? hi : lo) = mid;
        }
        rc = hi;
    }

    // M: smallest grid meeting the Fourier budget, rounded up to even.
    int M = 2;
    EwaldConfig cfg;
    for (;; ++M) {
        cfg = make_config(L, xi, rc, M, P);
        if (fourier_error_estimate(kind, Q, xi, cfg.kinf, L, cfg.R) <= budget) break;
        if (M > 8192)
            throw std::invalid_argument("select_parameters: no feasible grid size");
    }
    if (M % 2 != 0) cfg = make_config(L, xi, rc, ++M, P);
    sel.config = cfg;
    return sel;
}

}  // namespace fse
