#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fse/estimates.hpp"
#include "fse/greens.hpp"
#include "helpers.hpp"

using namespace fse;
using fsetest::kAllKinds;
using fsetest::random_system;
using fsetest::uniform;

TEST_CASE("fourier_error_estimate formula shape") {
    const double Q = 3.7, xi = 2.0, L = 1.5, R = 2.0;
    // stokeslet ratio estimate(k=2xi)/estimate(k=4xi) = e^3 / 8
    const double r = fourier_error_estimate(KernelKind::Stokeslet, Q, xi, 2 * xi, L, R) /
                     fourier_error_estimate(KernelKind::Stokeslet, Q, xi, 4 * xi, L, R);
    CHECK(r == doctest::Approx(std::exp(3.0) / 8.0).epsilon(1e-12));

    // doubling every strength (Q -> 4Q) doubles any estimate
    for (KernelKind kind : kAllKinds) {
        const double a = fourier_error_estimate(kind, Q, xi, 5.0, L, R);
        const double b = fourier_error_estimate(kind, 4 * Q, xi, 5.0, L, R);
        CHECK(b == doctest::Approx(2 * a).epsilon(1e-13));
        CHECK(a >= 0.0);
    }
    CHECK_THROWS_AS(fourier_error_estimate(KernelKind::Stokeslet, Q, -1.0, 5.0, L, R),
                    std::invalid_argument);
}

TEST_CASE("real_error_estimate formula shape") {
    const double Q = 2.2, xi = 3.0, L = 2.0;
    // stokeslet: estimate * e^{xi^2 rc^2} / sqrt(rc) is constant
    const double c1 = real_error_estimate(KernelKind::Stokeslet, Q, xi, 0.4, L) *
                      std::exp(xi * xi * 0.16) / std::sqrt(0.4);
    const double c2 = real_error_estimate(KernelKind::Stokeslet, Q, xi, 0.9, L) *
                      std::exp(xi * xi * 0.81) / std::sqrt(0.9);
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-12));

    // doubling L at fixed Q, rc, xi shrinks every estimate by sqrt(8)
    for (KernelKind kind : kAllKinds) {
        const double a = real_error_estimate(kind, Q, xi, 0.5, L);
        const double b = real_error_estimate(kind, Q, xi, 0.5, 2 * L);
        CHECK(a / b == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    }
}

TEST_CASE("estimates strictly decrease over the asymptotic regime") {
    const double Q = 5.0, L = 2.0, R = 4.0;
    for (KernelKind kind : kAllKinds) {
        for (double xi : {2.0, 6.0}) {
            double prev = 1e300;
            for (double rc = 1.0 / xi; rc < 2.0; rc += 0.05) {
                const double e = real_error_estimate(kind, Q, xi, rc, L);
                CHECK(e < prev);
                prev = e;
            }
            prev = 1e300;
            for (double k = 3 * xi; k < 20 * xi; k *= 1.15) {
                const double e = fourier_error_estimate(kind, Q, xi, k, L, R);
                CHECK(e < prev);
                prev = e;
            }
        }
    }
}

TEST_CASE("error_budget mirrors the two estimators") {
    EwaldConfig cfg = make_config(2.0, 7.0, 0.63, 48, 16);
    ErrorBudget b = error_budget(KernelKind::Stokeslet, cfg, 10.0);
    CHECK(b.predicted_real_rms ==
          doctest::Approx(real_error_estimate(KernelKind::Stokeslet, 10.0, 7.0, 0.63, 2.0))
              .epsilon(1e-14));
    CHECK(b.predicted_fourier_rms ==
          doctest::Approx(fourier_error_estimate(KernelKind::Stokeslet, 10.0, 7.0,
                                                 cfg.kinf, 2.0, cfg.R))
              .epsilon(1e-14));
    CHECK(b.predicted_real_rms >= 0.0);
    CHECK(b.predicted_fourier_rms >= 0.0);
}

TEST_CASE("select_parameters reproduces the reference workload") {
    // N=20000 uniform strengths in [-1,1]^3: E[Q] = N * 3 * (1/3) = N
    const std::size_t N = 20000;
    const double Q = static_cast<double>(N);
    auto sel = select_parameters(KernelKind::Stokeslet, N, 2.0, Q, 7.0, 0.5e-8);
    REQUIRE(sel.feasible);
    CHECK(sel.config.P == 16);
    CHECK(std::abs(sel.config.rc - 0.63) <= 0.063);
    CHECK(std::abs(sel.config.M - 48) <= 2);
}

TEST_CASE("select_parameters degenerate and infeasible branches") {
    // loose tolerance: tiny rc is fine, config still valid
    auto loose = select_parameters(KernelKind::Stokeslet, 100, 1.0, 100.0, 8.0, 0.5);
    CHECK(loose.feasible);
    CHECK(loose.config.rc > 0.0);
    CHECK(loose.config.Mtilde >= loose.config.M);

    // absurdly tight tolerance at tiny xi: real budget unreachable
    auto hard = select_parameters(KernelKind::Stokeslet, 100, 1.0, 100.0, 0.05, 1e-300);
    CHECK_FALSE(hard.feasible);

    CHECK_THROWS_AS(select_parameters(KernelKind::Stokeslet, 100, 1.0, 100.0, 8.0, -1.0),
                    std::invalid_argument);
}

TEST_CASE("select_parameters self-consistency: 1000 random cases") {
    std::mt19937_64 rng(777);
    for (int it = 0; it < 1000; ++it) {
        const KernelKind kind = kAllKinds[it % 3];
        const std::size_t N = 10 + rng() % 5000;
        const double L = uniform(rng, 0.5, 5.0);
        const double xi = uniform(rng, 3.0, 10.0) / L;
        const double Q = uniform(rng, 0.1, 3.0) * N;
        const double tol = std::pow(10.0, -uniform(rng, 3.0, 11.0));
        auto sel = select_parameters(kind, N, L, Q, xi, tol);
        if (!sel.feasible) {
            CHECK(real_error_estimate(kind, Q, xi, std::sqrt(3.0) * L, L) >
                  0.25 * tol * reference_velocity_rms(kind, Q, L, N));
            continue;
        }
        const EwaldConfig& c = sel.config;
        CHECK(c.M % 2 == 0);
        CHECK((c.P == 16 || c.P == 24 || c.P == 32));
        if (tol >= 5e-9) CHECK(c.P == 16);
        else if (tol >= 1e-12) CHECK(c.P == 24);
        else CHECK(c.P == 32);
        CHECK(c.rc <= std::sqrt(3.0) * L * (1 + 1e-12));
        CHECK(c.h * c.M == doctest::Approx(L).epsilon(1e-13));
        CHECK(c.h * c.Mtilde == doctest::Approx(c.Ltilde).epsilon(1e-13));
        // the chosen truncation parameters satisfy the budgets they were
        // selected against
        const double budget = 0.25 * tol * reference_velocity_rms(kind, Q, L, N);
        CHECK(real_error_estimate(kind, Q, xi, c.rc, L) <= budget * (1 + 1e-9));
        CHECK(fourier_error_estimate(kind, Q, xi, c.kinf, L, c.R) <= budget * (1 + 1e-9));
    }
}

TEST_CASE("select_parameters output meets its tolerance end to end") {
    std::mt19937_64 rng(31415);
    struct Case {
        KernelKind kind;
        double tol;
    } cases[] = {{KernelKind::Stokeslet, 1e-4}, {KernelKind::Stokeslet, 1e-8},
                 {KernelKind::Stresslet, 1e-6}, {KernelKind::Rotlet, 1e-6}};
    for (const Case& cs : cases) {
        SourceSystem sys = random_system(rng, cs.kind, 300, 1.0);
        const double Q = strength_quadratic_sum(sys);
        auto sel = select_parameters(cs.kind, sys.size(), 1.0, Q, 6.0, cs.tol);
        REQUIRE(sel.feasible);
        MollifiedGreen green = precompute_mollified_green(
            green_kind_for(cs.kind), sel.config.Ltilde, sel.config.Mtilde, sel.config.sf);
        Velocities u = total_sum(sys, cs.kind, sel.config, sys.positions, green);
        Velocities ref = direct_sum(sys, cs.kind, sys.positions, true);
        CHECK(rms_error(u, ref, true) <= cs.tol);
    }
}
