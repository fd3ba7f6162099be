#pragma once

// Truncated real-space Ewald sums. The stokeslet and stresslet use the
// Hasimoto split, the rotlet the Ewald split; all decay like exp(-xi^2 r^2).

#include <vector>

#include "fse/kernels.hpp"

namespace fse {

// Spatial buckets over a snapshot of source positions. Cells are sized so
// that all points within rc of a target lie in its 3x3x3 cell neighborhood.
struct CellList {
    double cell_side = 0;
    double origin = 0;       // lowest coordinate covered, all axes
    int dims[3] = {1, 1, 1};
    std::vector<std::vector<std::size_t>> buckets;  // dims[0]*dims[1]*dims[2]

    int cell_of(double coord, int axis) const;
    std::size_t bucket_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k;
    }
};

// G^R(r, xi) . f. Throws std::domain_error at r = 0.
Vec3 eval_real_kernel(KernelKind kind, const Vec3& r, double xi, const Strength& f);

// domain_pad extends the covered interval below 0 and above L, so targets
// slightly outside the box still land in a valid cell.
CellList build_cell_list(const SourceSystem& system, double rc, double domain_pad = 0);

// Sum of G^R over neighbors with 0 < |x_m - x_n| <= rc (closed ball).
// Zero-distance pairs with distinct source index are skipped (self term).
Velocities real_space_sum(const SourceSystem& system, KernelKind kind,
                          double xi, double rc, const std::vector<Vec3>& targets);

}  // namespace fse
