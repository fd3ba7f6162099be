#pragma once

// Truncated harmonic/biharmonic Green's functions, precomputation of the
// mollified Green's function on an oversampled grid, and the free-space
// FFT solver built on aperiodic convolution.

#include <complex>
#include <string>
#include <vector>

#include "fse/vec3.hpp"

namespace fse {

enum class GreenKind : unsigned char { Harmonic = 0, Biharmonic = 1 };

// Fourier transform of (1/r) truncated at radius R: 8 pi (sin(Rk/2)/k)^2,
// with limit 2 pi R^2 at k = 0.
double hhat_R(double k, double R);

// Fourier transform of r truncated at radius R:
// 4 pi [(2 - R^2 k^2) cos(Rk) + 2 Rk sin(Rk) - 2] / k^4, limit pi R^4.
// The small-Rk branch switches to a series to avoid cancellation.
double bhat_R(double k, double R);

// Uniform 3D grid of scalar values, extents[0] x extents[1] x extents[2],
// row-major, node i at origin + i*h per axis.
struct ScalarGrid {
    int extents[3] = {0, 0, 0};
    double h = 0;
    Vec3 origin{};
    std::vector<double> values;

    std::size_t size() const {
        return static_cast<std::size_t>(extents[0]) * extents[1] * extents[2];
    }
    double& at(int i, int j, int k) {
        return values[(static_cast<std::size_t>(i) * extents[1] + j) * extents[2] + k];
    }
    double at(int i, int j, int k) const {
        return values[(static_cast<std::size_t>(i) * extents[1] + j) * extents[2] + k];
    }
};

// Same layout with 3 (or 9) components per node, stored as separate planes.
struct VectorGrid {
    int extents[3] = {0, 0, 0};
    double h = 0;
    Vec3 origin{};
    int arity = 3;
    std::vector<std::vector<double>> components;  // arity planes of extents^3
};

// Fourier-space data of the effective (mollified) Green's function on the
// doubled grid: real values, one per (2M)^3 wavenumber, ready for pointwise
// multiplication in aperiodic convolutions.
struct MollifiedGreen {
    GreenKind kind = GreenKind::Harmonic;
    double Ltilde = 0;   // domain side the solve operates on
    double h = 0;        // grid spacing, Ltilde / Mtilde
    double R = 0;        // truncation radius used (sqrt(3) * Ltilde)
    int Mtilde = 0;      // solution grid is Mtilde^3; stored data (2 Mtilde)^3
    std::vector<double> fourier;  // size (2 Mtilde)^3, standard FFT layout

    int doubled() const { return 2 * Mtilde; }
};

// Builds Hhat^R or Bhat^R on the oversampled wavenumber grid, inverse
// transforms, truncates the effective Green's function to (2M)^3 physical
// values, and forward transforms once. sf must be >= 1 + sqrt(3).
MollifiedGreen precompute_mollified_green(GreenKind kind, double Ltilde, int Mtilde,
                                          double sf);

// Discrete free-space convolution: phi = G * rhs on the Mtilde^3 grid
// (G = 1/r for Harmonic, r for Biharmonic). rhs extents must be Mtilde^3.
ScalarGrid freespace_solve(const MollifiedGreen& green, const ScalarGrid& rhs);

// Binary cache: magic "FSEG", version u32, kind u8, Ltilde/h/R f64,
// extents u64 triple, then raw little-endian f64 payload.
void save_mollified_green(const MollifiedGreen& green, const std::string& path);
MollifiedGreen load_mollified_green(const std::string& path);

}  // namespace fse
