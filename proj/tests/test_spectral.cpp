#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "feq/lattice.hpp"
#include "feq/spectral.hpp"

using namespace feq;

namespace {

// J as a closed-form double sum: the squared count integrates to a sum of
// pairwise interval overlaps, (tau/2) sum_{i,j} max(0, 2/tau - |e_i - e_j|).
double jm_pairwise(const std::vector<double>& lv, double tau) {
    double s = 0.0;
    for (double a : lv)
        for (double b : lv) s += std::max(0.0, 2.0 / tau - std::abs(a - b));
    return 0.5 * tau * s;
}

}  // namespace

TEST_CASE("level multiset has exactly one entry per momentum") {
    LatticeConfig cfg = derive_config(2, 7, 7, 0.5, 0.5);
    LevelSet ls = levels(Coord{1, 2}, cfg);
    CHECK(static_cast<long>(ls.values.size()) == cfg.V);
    CHECK(std::is_sorted(ls.values.begin(), ls.values.end()));
    CHECK_THROWS(levels(Coord{0, 0}, cfg));
}

TEST_CASE("pair energies factor through a single sine") {
    // E_b - E_{b+m} = 4 sin(pi m / L) sin(2 pi (b + m/2) / L)
    const long L = 11;
    for (long m : {1L, 3L, 5L}) {
        auto v = levels_1d(m, L);
        const long half = (L - 1) / 2;
        for (long b = -half; b <= half; ++b) {
            double expect = abs_c_m(m, L) *
                            std::sin(2.0 * std::numbers::pi *
                                     (static_cast<double>(b) + 0.5 * static_cast<double>(m)) /
                                     static_cast<double>(L));
            CHECK(v[b + half] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("profile matches direct counting at random probes") {
    LatticeConfig cfg = derive_config(1, 101, 35, 0.5, 0.5);
    const double tau = 40.0;
    Coord m{3};
    LevelSet ls = levels(m, cfg);
    SpectralProfile p = profile(ls, tau);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-4.5, 4.5);
    for (int k = 0; k < 1000; ++k) {
        double E = u(rng);
        CHECK(profile_count_at(p, E) == omega_count(m, E, tau, cfg));
    }
}

TEST_CASE("level-count integral matches the pairwise overlap formula") {
    LatticeConfig cfg1 = derive_config(1, 31, 31, 0.5, 0.5);
    for (long m : {1L, 4L, 15L}) {
        for (double tau : {0.9, 7.0, 130.0}) {
            auto v = levels_1d(m, 31);
            std::sort(v.begin(), v.end());
            CHECK(jm_from_sorted_levels(v, tau).value ==
                  doctest::Approx(jm_pairwise(v, tau)).epsilon(1e-10));
        }
    }
    LatticeConfig cfg2 = derive_config(2, 7, 7, 0.5, 0.5);
    JmValue j = jm_exact(Coord{1, 3}, 5.0, cfg2);
    LevelSet ls = levels(Coord{1, 3}, cfg2);
    CHECK(j.value == doctest::Approx(jm_pairwise(ls.values, 5.0)).epsilon(1e-10));
}

TEST_CASE("absolute-count sum rule equals the level count exactly") {
    // (tau/2) int |Omega| dE = (number of levels), since each level
    // contributes a window of width 2/tau; checked through the profile
    LatticeConfig cfg = derive_config(1, 1001, 335, 0.5, 0.5);
    const double tau = 2500.0;
    LevelSet ls = levels(Coord{5}, cfg);
    SpectralProfile p = profile(ls, tau);
    double integral = 0.0;
    for (std::size_t i = 0; i < p.counts.size(); ++i)
        integral += static_cast<double>(p.counts[i]) * (p.breakpoints[i + 1] - p.breakpoints[i]);
    CHECK(0.5 * tau * integral == doctest::Approx(1001.0).epsilon(1e-9));
    CHECK(jm_exact(Coord{5}, tau, cfg).abs_integral == doctest::Approx(1001.0));
}

TEST_CASE("rescaled window count obeys the density bound") {
    const long L = 101;
    for (long m : {1L, 2L, 33L}) {
        auto sines = sorted_sines_1d(m, L);
        for (double delta : {1.0 / 25.0, 1e-3}) {
            for (int k = 0; k < 500; ++k) {
                double x = -1.05 + 2.1 * static_cast<double>(k) / 499.0;
                CHECK(static_cast<double>(omega_brute_1d(sines, x, delta)) <=
                      window_count_bound(x, delta, L) + 1e-12);
            }
        }
    }
}

TEST_CASE("log bound dominates the exact integral in the asymptotic regime") {
    const long L = 10001;
    const double tau = 2.5 * static_cast<double>(L);
    CHECK(asymptotic_regime(L, tau));
    CHECK_FALSE(asymptotic_regime(101, tau));
    CHECK_FALSE(asymptotic_regime(L, 1.5 * static_cast<double>(L)));
    for (long m : {1L, 7L, 250L}) {
        CHECK(jm_exact_1d(m, tau, L).value <= jm_log_bound(m, tau, L));
    }
}

TEST_CASE("dimensional reduction dominates the exact integral") {
    LatticeConfig cfg = derive_config(2, 11, 11, 0.5, 0.5);
    const double tau = 27.5;
    for (Coord m : {Coord{1, 0}, Coord{2, 3}, Coord{5, 5}}) {
        CHECK(jm_exact(m, tau, cfg).value <= jm_reduction_bound(m, tau, cfg) + 1e-9);
    }
    CHECK(inf_norm(Coord{-4, 2}) == 4);
}

TEST_CASE("J is symmetric under momentum reflection") {
    const long L = 31;
    for (long m : {1L, 6L}) {
        CHECK(jm_exact_1d(m, 9.0, L).value == doctest::Approx(jm_exact_1d(L - m, 9.0, L).value));
    }
}
