#pragma once

// Fourier-space Ewald component: truncated-Gaussian spreading, zero-padded
// FFTs, k-space scaling with the mollified Green's function, and trapezoidal
// quadrature back to the targets. total_sum glues real + Fourier + self parts.

#include <vector>

#include "fse/greens.hpp"
#include "fse/kernels.hpp"

namespace fse {

// Full parameter set: user inputs (xi, rc, M, P) plus everything derived.
// Invariants: h*M = L, h*Mtilde = Ltilde, deltaL a multiple of h, P <= Mtilde.
struct EwaldConfig {
    double L = 0;
    double xi = 0;
    double rc = 0;
    int M = 0;      // grid points across the original box
    int P = 0;      // Gaussian support in grid points (even)

    double h = 0;       // L / M
    double d = 0;       // Gaussian support width, h * P
    double m = 0;       // Gaussian shape, 0.976 sqrt(pi P)
    double eta = 0;     // (xi d / m)^2
    double deltaL = 0;  // domain extension, rounded up to a multiple of h
    double Ltilde = 0;  // L + deltaL
    int Mtilde = 0;     // Ltilde / h
    double kinf = 0;    // pi Mtilde / Ltilde
    double R = 0;       // sqrt(3) Ltilde
    double sf = 0;      // precompute oversampling, >= 1 + sqrt(3)

    bool deterministic = false;  // force sequential reductions
};

EwaldConfig make_config(double L, double xi, double rc, int M, int P, double sf = 0);

// Source strengths spread to the extended grid with truncated Gaussians
// (3 planes for stokeslet/rotlet, 9 for the stresslet).
using GriddedSources = VectorGrid;

// use_fgg = false evaluates one exponential per grid node; the factorized
// path is the default and must agree to round-off.
GriddedSources spread(const SourceSystem& system, const EwaldConfig& cfg,
                      KernelKind kind, bool use_fgg = true);

// Pointwise k-space application of A^{G,R}(k) e^{-(1-eta)k^2/4xi^2} over the
// doubled grid. ghat holds arity planes of (2 Mtilde)^3 complex values;
// returns 3 planes.
std::vector<std::vector<std::complex<double>>> kspace_scale(
    const std::vector<std::vector<std::complex<double>>>& ghat,
    const EwaldConfig& cfg, KernelKind kind, const MollifiedGreen& green);

// Wall-clock seconds per pipeline stage, filled when requested.
struct StageTimings {
    double precompute = 0;
    double spread = 0;
    double fft = 0;
    double scale = 0;
    double quadrature = 0;
    double realspace = 0;
    double total = 0;
};

// The full Fourier-space pipeline u^F at the target points. green must hold
// the biharmonic (stokeslet/stresslet) or harmonic (rotlet) kernel for this
// config's Ltilde and Mtilde. Targets outside [0,L]^3 are rejected.
Velocities fourier_sum(const SourceSystem& system, const EwaldConfig& cfg,
                       KernelKind kind, const std::vector<Vec3>& targets,
                       const MollifiedGreen& green, StageTimings* timings = nullptr);

// u = u^R + u^F + u^self. The self term applies when the targets are
// identically the source positions (stokeslet only).
Velocities total_sum(const SourceSystem& system, KernelKind kind,
                     const EwaldConfig& cfg, const std::vector<Vec3>& targets,
                     const MollifiedGreen& green, StageTimings* timings = nullptr);

// Which scalar kernel a given Stokes kernel needs.
constexpr GreenKind green_kind_for(KernelKind kind) {
    return kind == KernelKind::Rotlet ? GreenKind::Harmonic : GreenKind::Biharmonic;
}

}  // namespace fse
