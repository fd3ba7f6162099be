#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fse/kernels.hpp"
#include "helpers.hpp"

using namespace fse;
using fsetest::kAllKinds;
using fsetest::random_strength;
using fsetest::random_system;
using fsetest::random_vec;
using fsetest::uniform;

namespace {

// G(r) as a full matrix acting on a basis strength, for symmetry checks.
double kernel_entry(KernelKind kind, const Vec3& r, int j, int l) {
    Strength f;
    f.arity = 3;
    f.c[l] = 1.0;
    return eval_kernel(kind, r, f)[j];
}

double stresslet_entry(const Vec3& r, int j, int l, int m) {
    Strength f;
    f.arity = 9;
    f.c[3 * l + m] = 1.0;
    return eval_kernel(KernelKind::Stresslet, r, f)[j];
}

}  // namespace

TEST_CASE("eval_kernel pinned values") {
    Strength fx = Strength::vec({1, 0, 0});
    Vec3 u = eval_kernel(KernelKind::Stokeslet, {1, 0, 0}, fx);
    CHECK(u.x == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(u.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(u.z == doctest::Approx(0.0).epsilon(1e-15));

    Strength f11;
    f11.arity = 9;
    f11.c[0] = 1.0;  // f_{lm} = delta_{l1} delta_{m1}
    u = eval_kernel(KernelKind::Stresslet, {1, 0, 0}, f11);
    CHECK(u.x == doctest::Approx(-6.0).epsilon(1e-15));
    CHECK(u.y == 0.0);
    CHECK(u.z == 0.0);

    u = eval_kernel(KernelKind::Rotlet, {0, 0, 1}, Strength::vec({0, 1, 0}));
    CHECK(u.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(u.y == 0.0);
    CHECK(u.z == 0.0);
}

TEST_CASE("eval_kernel throws at zero separation") {
    CHECK_THROWS_AS(eval_kernel(KernelKind::Stokeslet, {0, 0, 0}, Strength::vec({1, 0, 0})),
                    std::domain_error);
}

TEST_CASE("pair constructor is n_l q_m") {
    Strength s = Strength::pair({1, 2, 3}, {4, 5, 6});  // q, n
    CHECK(s(0, 0) == 4.0 * 1.0);
    CHECK(s(1, 2) == 5.0 * 3.0);
    CHECK(s(2, 1) == 6.0 * 2.0);
}

TEST_CASE("direct_sum two-source pinned example") {
    SourceSystem sys;
    sys.box_side = 2.0;
    sys.positions = {{0, 0, 0}, {1, 0, 0}};
    sys.strengths = {Strength::vec({1, 0, 0}), Strength::vec({1, 0, 0})};
    Velocities u = direct_sum(sys, KernelKind::Stokeslet, sys.positions, true);
    for (int n = 0; n < 2; ++n) {
        CHECK(u[n].x == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(u[n].y == 0.0);
        CHECK(u[n].z == 0.0);
    }
}

TEST_CASE("direct_sum single source is the empty sum") {
    SourceSystem sys;
    sys.positions = {{0.5, 0.5, 0.5}};
    sys.strengths = {Strength::vec({1, 2, 3})};
    sys.box_side = 1.0;
    Velocities u = direct_sum(sys, KernelKind::Stokeslet, sys.positions, true);
    CHECK(u[0] == Vec3{0, 0, 0});
}

TEST_CASE("direct_sum matches term-by-term eval_kernel") {
    std::mt19937_64 rng(101);
    for (KernelKind kind : kAllKinds) {
        SourceSystem sys = random_system(rng, kind, 100, 1.0);
        Velocities u = direct_sum(sys, kind, sys.positions, true);
        for (std::size_t m = 0; m < sys.size(); m += 17) {
            Vec3 acc{};
            for (std::size_t n = 0; n < sys.size(); ++n) {
                if (n == m) continue;
                acc += eval_kernel(kind, sys.positions[m] - sys.positions[n],
                                   sys.strengths[n]);
            }
            CHECK(norm(u[m] - acc) <= 1e-12 * (1.0 + norm(acc)));
        }
    }
}

TEST_CASE("direct_sum rejects coincident distinct points") {
    SourceSystem sys;
    sys.box_side = 1.0;
    sys.positions = {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}};
    sys.strengths = {Strength::vec({1, 0, 0}), Strength::vec({0, 1, 0})};
    CHECK_THROWS_AS(direct_sum(sys, KernelKind::Stokeslet, sys.positions, true),
                    std::domain_error);
}

TEST_CASE("self_interaction pinned values") {
    const double sqrt_pi = std::sqrt(M_PI);
    Vec3 u = self_interaction(sqrt_pi, Strength::vec({1, 0, 0}), KernelKind::Stokeslet);
    CHECK(u.x == doctest::Approx(-4.0).epsilon(1e-15));

    u = self_interaction(1.0, Strength::vec({0, 1, 0}), KernelKind::Rotlet);
    CHECK(u == Vec3{0, 0, 0});
    Strength t;
    t.arity = 9;
    t.c[4] = 1.0;
    CHECK(self_interaction(3.0, t, KernelKind::Stresslet) == Vec3{0, 0, 0});

    u = self_interaction(2.0, Strength::vec({0, 1, 1}), KernelKind::Stokeslet);
    CHECK(u.y == doctest::Approx(-8.0 / sqrt_pi).epsilon(1e-15));
    CHECK(u.z == doctest::Approx(-8.0 / sqrt_pi).epsilon(1e-15));
    CHECK(u.x == 0.0);
}

TEST_CASE("rms_error basics") {
    Velocities a = {{1, 2, 3}, {4, 5, 6}};
    CHECK(rms_error(a, a, false) == 0.0);
    CHECK(rms_error(a, a, true) == 0.0);

    Velocities b = a;
    for (auto& v : b) v.x += 1.0;
    CHECK(rms_error(b, a, false) == doctest::Approx(1.0).epsilon(1e-15));

    // hand-computed RMS over a 10-point perturbation
    std::mt19937_64 rng(7);
    Velocities u(10), ref(10);
    double acc = 0, accref = 0;
    for (int i = 0; i < 10; ++i) {
        ref[i] = random_vec(rng, -1, 1);
        Vec3 d = random_vec(rng, -1e-3, 1e-3);
        u[i] = ref[i] + d;
        acc += norm2(d);
        accref += norm2(ref[i]);
    }
    CHECK(rms_error(u, ref, false) ==
          doctest::Approx(std::sqrt(acc / 10)).epsilon(1e-14));
    CHECK(rms_error(u, ref, true) ==
          doctest::Approx(std::sqrt(acc / accref)).epsilon(1e-14));

    Velocities zero(2);
    CHECK_THROWS(rms_error(a, zero, true));
}

TEST_CASE("kernel symmetry, antisymmetry, parity, scaling: 1000 random cases") {
    std::mt19937_64 rng(2024);
    for (int it = 0; it < 1000; ++it) {
        Vec3 r = random_vec(rng, -1, 1);
        if (norm(r) < 1e-3) continue;
        const double c = uniform(rng, 0.3, 3.0);

        for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) {
                const double S = kernel_entry(KernelKind::Stokeslet, r, j, l);
                CHECK(S == doctest::Approx(kernel_entry(KernelKind::Stokeslet, r, l, j))
                               .epsilon(1e-13));
                CHECK(S == doctest::Approx(kernel_entry(KernelKind::Stokeslet, -r, j, l))
                               .epsilon(1e-13));
                // S(c r) = S(r)/c
                CHECK(kernel_entry(KernelKind::Stokeslet, c * r, j, l) ==
                      doctest::Approx(S / c).epsilon(1e-12));

                const double W = kernel_entry(KernelKind::Rotlet, r, j, l);
                CHECK(W == doctest::Approx(-kernel_entry(KernelKind::Rotlet, r, l, j))
                               .epsilon(1e-13));
                CHECK(W == doctest::Approx(-kernel_entry(KernelKind::Rotlet, -r, j, l))
                               .epsilon(1e-13));
                CHECK(kernel_entry(KernelKind::Rotlet, c * r, j, l) ==
                      doctest::Approx(W / (c * c)).epsilon(1e-12));
            }

        const int j = static_cast<int>(rng() % 3), l = static_cast<int>(rng() % 3),
                  m = static_cast<int>(rng() % 3);
        const double T = stresslet_entry(r, j, l, m);
        CHECK(T == doctest::Approx(stresslet_entry(r, l, j, m)).epsilon(1e-13));
        CHECK(T == doctest::Approx(stresslet_entry(r, m, l, j)).epsilon(1e-13));
        CHECK(T == doctest::Approx(stresslet_entry(r, j, m, l)).epsilon(1e-13));
        CHECK(stresslet_entry(-r, j, l, m) == doctest::Approx(-T).epsilon(1e-13));
        CHECK(stresslet_entry(c * r, j, l, m) ==
              doctest::Approx(T / (c * c)).epsilon(1e-12));
    }
}

TEST_CASE("direct_sum is linear in strengths") {
    std::mt19937_64 rng(55);
    for (KernelKind kind : kAllKinds) {
        SourceSystem a = random_system(rng, kind, 40, 1.0);
        SourceSystem b = a;
        for (auto& s : b.strengths) s = random_strength(rng, kind);
        SourceSystem ab = a;
        for (std::size_t n = 0; n < ab.size(); ++n)
            for (int k = 0; k < 9; ++k) ab.strengths[n].c[k] += b.strengths[n].c[k];
        Velocities ua = direct_sum(a, kind, a.positions, true);
        Velocities ub = direct_sum(b, kind, a.positions, true);
        Velocities uab = direct_sum(ab, kind, a.positions, true);
        for (std::size_t n = 0; n < ab.size(); ++n)
            CHECK(norm(uab[n] - (ua[n] + ub[n])) <= 1e-11 * (1.0 + norm(uab[n])));
    }
}

TEST_CASE("SourceSystem::validate") {
    SourceSystem sys;
    sys.box_side = 1.0;
    sys.positions = {{0.5, 0.5, 0.5}};
    sys.strengths = {Strength::vec({1, 0, 0})};
    CHECK_NOTHROW(sys.validate(KernelKind::Stokeslet));
    CHECK_THROWS_AS(sys.validate(KernelKind::Stresslet), std::invalid_argument);
    sys.positions[0].x = 1.5;  // outside box
    CHECK_THROWS_AS(sys.validate(KernelKind::Stokeslet), std::invalid_argument);
    sys.positions.clear();
    sys.strengths.clear();
    CHECK_THROWS_AS(sys.validate(KernelKind::Stokeslet), std::invalid_argument);
}

TEST_CASE("strength_quadratic_sum is the component square sum") {
    std::mt19937_64 rng(9);
    SourceSystem sys = random_system(rng, KernelKind::Stresslet, 25, 1.0);
    double q = 0;
    for (const auto& s : sys.strengths)
        for (int k = 0; k < 9; ++k) q += s.c[k] * s.c[k];
    CHECK(strength_quadratic_sum(sys) == doctest::Approx(q).epsilon(1e-14));
}
