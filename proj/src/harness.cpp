#include "fse/harness.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fse/realspace.hpp"

namespace fse {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Fixed 53-bit mapping keeps the stream identical across standard libraries
// (uniform_real_distribution is not guaranteed reproducible).
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

const char* kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::Stokeslet: return "stokeslet";
        case KernelKind::Stresslet: return "stresslet";
        case KernelKind::Rotlet: return "rotlet";
    }
    return "?";
}

SourceSystem generate_system(KernelKind kind, std::size_t N, double L,
                             std::uint64_t seed) {
    if (N < 1 || !(L > 0))
        throw std::invalid_argument("generate_system: need N >= 1, L > 0");
    std::mt19937_64 rng(seed);
    SourceSystem sys;
    sys.box_side = L;
    sys.positions.resize(N);
    for (std::size_t n = 0; n < N; ++n)
        for (int c = 0; c < 3; ++c) sys.positions[n][c] = L * unit_double(rng);
    const int arity = strength_arity(kind);
    sys.strengths.reserve(N);
    for (std::size_t n = 0; n < N; ++n) {
        Strength s;
        s.arity = arity;
        for (int k = 0; k < arity; ++k) s.c[k] = 2.0 * unit_double(rng) - 1.0;
        sys.strengths.push_back(s);
    }
    return sys;
}

EwaldConfig config_for(const RunSpec& spec, double Q) {
    const bool has_tol = spec.tol > 0;
    const bool has_explicit = spec.rc > 0 && spec.M > 0 && spec.P > 0;
    if (has_tol == has_explicit)
        throw std::invalid_argument(
            "config_for: give exactly one of tol or explicit (rc, M, P)");
    EwaldConfig cfg;
    if (has_tol) {
        auto sel = select_parameters(spec.kind, spec.N, spec.L, Q, spec.xi, spec.tol);
        if (!sel.feasible)
            throw std::invalid_argument(
                "config_for: tolerance infeasible for this box, use direct summation");
        cfg = sel.config;
    } else {
        cfg = make_config(spec.L, spec.xi, spec.rc, spec.M, spec.P);
    }
    cfg.deterministic = spec.deterministic;
    return cfg;
}

std::shared_ptr<const MollifiedGreen> cached_green(KernelKind kind,
                                                   const EwaldConfig& cfg,
                                                   const std::string& cache_dir,
                                                   double* precompute_seconds) {
    const GreenKind gk = green_kind_for(kind);
    std::string path;
    if (!cache_dir.empty()) {
        std::ostringstream name;
        name.precision(17);
        name << "fseg_" << (gk == GreenKind::Harmonic ? "harm" : "biharm") << "_Mt"
             << cfg.Mtilde << "_Lt" << cfg.Ltilde << "_sf" << cfg.sf << ".bin";
        std::filesystem::create_directories(cache_dir);
        path = (std::filesystem::path(cache_dir) / name.str()).string();
        if (std::filesystem::exists(path)) {
            auto green = std::make_shared<MollifiedGreen>(load_mollified_green(path));
            if (green->kind == gk && green->Mtilde == cfg.Mtilde &&
                std::abs(green->Ltilde - cfg.Ltilde) < 1e-12 * cfg.Ltilde) {
                if (precompute_seconds) *precompute_seconds = 0;
                return green;
            }
        }
    }
    const double t0 = now_seconds();
    auto green = std::make_shared<MollifiedGreen>(
        precompute_mollified_green(gk, cfg.Ltilde, cfg.Mtilde, cfg.sf));
    if (precompute_seconds) *precompute_seconds = now_seconds() - t0;
    if (!path.empty()) save_mollified_green(*green, path);
    return green;
}

RunReport run(const RunSpec& spec) {
#ifdef _OPENMP
    if (spec.threads > 0) omp_set_num_threads(spec.threads);
#endif
    SourceSystem sys = generate_system(spec.kind, spec.N, spec.L, spec.seed);
    const double Q = strength_quadratic_sum(sys);
    EwaldConfig cfg = config_for(spec, Q);

    RunRecord rec;
    rec.kind = spec.kind;
    rec.N = spec.N;
    rec.L = spec.L;
    rec.xi = cfg.xi;
    rec.rc = cfg.rc;
    rec.M = cfg.M;
    rec.P = cfg.P;
    rec.Mtilde = cfg.Mtilde;
    rec.tol = spec.tol;

    double precompute = 0;
    auto green = cached_green(spec.kind, cfg, spec.cache_dir, &precompute);

    // Warm-up run (FFT plan caching), then median-of-reps on total time.
    Velocities u;
    StageTimings warm;
    u = total_sum(sys, spec.kind, cfg, sys.positions, *green, &warm);
    std::vector<StageTimings> samples;
    const int reps = std::max(1, spec.timing_reps);
    for (int r = 0; r < reps; ++r) {
        StageTimings t;
        u = total_sum(sys, spec.kind, cfg, sys.positions, *green, &t);
        samples.push_back(t);
    }
    std::sort(samples.begin(), samples.end(),
              [](const StageTimings& a, const StageTimings& b) { return a.total < b.total; });
    rec.times = samples[samples.size() / 2];
    rec.times.precompute = precompute;
    rec.total_with_precompute = rec.times.total + precompute;

    const ErrorBudget budget = error_budget(spec.kind, cfg, Q);
    rec.predicted_real_rms = budget.predicted_real_rms;
    rec.predicted_fourier_rms = budget.predicted_fourier_rms;

    if (spec.N <= spec.oracle_cap) {
        const Velocities ref = direct_sum(sys, spec.kind, sys.positions, true);
        rec.oracle = true;
        rec.rel_rms_error = rms_error(u, ref, true);
        rec.abs_rms_error = rms_error(u, ref, false);
    }

    RunReport report;
    report.records.push_back(rec);
    return report;
}

RunReport sweep_xi(const RunSpec& spec, const std::vector<double>& xi_values) {
    if (xi_values.empty())
        throw std::invalid_argument("sweep_xi: need at least one xi");
    if (!(spec.rc > 0 && spec.M > 0 && spec.P > 0))
        throw std::invalid_argument("sweep_xi: baseline needs explicit (rc, M, P)");
    const double xi0 = xi_values.front();
    RunReport report;
    for (double xi : xi_values) {
        RunSpec s = spec;
        s.xi = xi;
        s.rc = spec.rc * xi0 / xi;                      // xi * rc held constant
        s.M = std::max(2, static_cast<int>(std::lround(spec.M * xi / xi0)));
        RunReport one = run(s);
        report.records.push_back(one.records.front());
    }
    return report;
}

namespace {
constexpr const char* kSchema = "fse-report-v1";
}

void write_csv(const RunReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    os << "# " << kSchema << "\n";
    os << "kernel,N,L,xi,rc,M,P,Mtilde,tol,oracle,rel_rms_error,abs_rms_error,"
          "predicted_real_rms,predicted_fourier_rms,t_precompute,t_spread,t_fft,"
          "t_scale,t_quadrature,t_realspace,t_total,t_total_with_precompute\n";
    os.precision(17);
    for (const RunRecord& r : report.records) {
        os << kernel_name(r.kind) << ',' << r.N << ',' << r.L << ',' << r.xi << ','
           << r.rc << ',' << r.M << ',' << r.P << ',' << r.Mtilde << ',' << r.tol
           << ',' << (r.oracle ? 1 : 0) << ',' << r.rel_rms_error << ','
           << r.abs_rms_error << ',' << r.predicted_real_rms << ','
           << r.predicted_fourier_rms << ',' << r.times.precompute << ','
           << r.times.spread << ',' << r.times.fft << ',' << r.times.scale << ','
           << r.times.quadrature << ',' << r.times.realspace << ','
           << r.times.total << ',' << r.total_with_precompute << '\n';
    }
    if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

void write_json(const RunReport& report, const std::string& path) {
    nlohmann::json j;
    j["schema"] = kSchema;
    j["records"] = nlohmann::json::array();
    for (const RunRecord& r : report.records) {
        nlohmann::json rec{
            {"kernel", kernel_name(r.kind)},
            {"N", r.N},
            {"L", r.L},
            {"xi", r.xi},
            {"rc", r.rc},
            {"M", r.M},
            {"P", r.P},
            {"Mtilde", r.Mtilde},
            {"tol", r.tol},
            {"oracle", r.oracle},
            {"rel_rms_error", r.rel_rms_error},
            {"abs_rms_error", r.abs_rms_error},
            {"predicted_real_rms", r.predicted_real_rms},
            {"predicted_fourier_rms", r.predicted_fourier_rms},
            {"times",
             {{"precompute", r.times.precompute},
              {"spread", r.times.spread},
              {"fft", r.times.fft},
              {"scale", r.times.scale},
              {"quadrature", r.times.quadrature},
              {"realspace", r.times.realspace},
              {"total", r.times.total},
              {"total_with_precompute", r.total_with_precompute}}}};
        j["records"].push_back(std::move(rec));
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_json: cannot open " + path);
    os << j.dump(2) << '\n';
    if (!os) throw std::runtime_error("write_json: write failed for " + path);
}

}  // namespace fse
