#pragma once

// Benchmark harness: random system generation, timed runs with an O(N^2)
// oracle, xi sweeps, Green's-function caching, and CSV/JSON reports.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fse/estimates.hpp"
#include "fse/ewald.hpp"
#include "fse/kernels.hpp"

namespace fse {

struct RunSpec {
    KernelKind kind = KernelKind::Stokeslet;
    std::size_t N = 0;
    double L = 0;
    std::uint64_t seed = 0;
    double xi = 0;

    // Exactly one of tol > 0 (automatic selection) or explicit (rc, M, P).
    double tol = 0;
    double rc = 0;
    int M = 0;
    int P = 0;

    std::size_t oracle_cap = 50000;
    bool deterministic = false;
    int threads = 0;            // 0 = library default
    std::string cache_dir;      // empty disables MollifiedGreen caching
    int timing_reps = 3;        // median of this many, after one warm-up
};

struct RunRecord {
    KernelKind kind = KernelKind::Stokeslet;
    std::size_t N = 0;
    double L = 0, xi = 0, rc = 0;
    int M = 0, P = 0, Mtilde = 0;
    double tol = 0;  // 0 when parameters were explicit

    bool oracle = false;  // errors measured vs direct_sum (else predicted only)
    double rel_rms_error = 0;
    double abs_rms_error = 0;
    double predicted_real_rms = 0;
    double predicted_fourier_rms = 0;

    StageTimings times;               // total excludes precompute
    double total_with_precompute = 0;
};

struct RunReport {
    std::vector<RunRecord> records;
};

// Uniform random system: positions in [0,L]^3, strength components in [-1,1].
// PRNG is std::mt19937_64 with a fixed 53-bit double mapping, so the result
// is bit-identical for a given seed on any platform.
SourceSystem generate_system(KernelKind kind, std::size_t N, double L,
                             std::uint64_t seed);

// Resolve spec parameters to a concrete config (throws std::invalid_argument
// if neither tol nor explicit parameters, or both, are given).
EwaldConfig config_for(const RunSpec& spec, double Q);

// Precompute the mollified Green's function for cfg, loading from / saving to
// spec-style cache_dir when non-empty (keyed on kind, Ltilde, Mtilde, sf).
std::shared_ptr<const MollifiedGreen> cached_green(KernelKind kind,
                                                   const EwaldConfig& cfg,
                                                   const std::string& cache_dir,
                                                   double* precompute_seconds = nullptr);

// One full timed evaluation at the source points.
RunReport run(const RunSpec& spec);

// Rerun with rc and M rescaled to hold xi*rc and M/xi constant relative to
// the baseline spec (which must carry explicit parameters tuned at
// xi_values[0]).
RunReport sweep_xi(const RunSpec& spec, const std::vector<double>& xi_values);

// Stable, versioned report serialization (schema "fse-report-v1").
void write_csv(const RunReport& report, const std::string& path);
void write_json(const RunReport& report, const std::string& path);

const char* kernel_name(KernelKind kind);

}  // namespace fse
