#include <cmath>

#include "doctest.h"
#include "feq/bounds.hpp"
#include "feq/observables.hpp"
#include "feq/spectral.hpp"

using namespace feq;

TEST_CASE("chain constant matches a direct momentum sum") {
    LatticeConfig cfg = derive_config(1, 31, 11, 0.5, 0.5);
    const double tau = 40.0;
    double direct = 0.0;
    for (long m = -15; m <= 15; ++m) {
        if (m == 0) continue;
        direct += std::abs(w1(m, cfg)) * std::sqrt(jm_exact_1d(m, tau, cfg.L).value);
    }
    direct /= static_cast<double>(cfg.V);
    ChainEvaluation ev = chain_evaluate(cfg, tau);
    CHECK(ev.S == doctest::Approx(direct).epsilon(1e-10));
    CHECK(ev.S_squared == doctest::Approx(direct * direct).epsilon(1e-10));
    CHECK(ev.tau_in_range);
    CHECK(ev.ratio == doctest::Approx(ev.S / (3.0 * ev.delta_half)).epsilon(1e-12));
}

TEST_CASE("reduced route never undercuts the exact chain constant") {
    LatticeConfig cfg = derive_config(2, 11, 11, 0.5, 0.5);
    const double tau = 30.0;
    ChainEvaluation exact = chain_evaluate(cfg, tau);
    ChainEvaluation reduced = chain_evaluate(cfg, tau, 0, true);
    CHECK(reduced.reduced_route);
    CHECK(exact.S <= reduced.S + 1e-12);
}

TEST_CASE("kernel-averaged variance stays below the chain constant squared") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    SlaterState s = concentrated_state(cfg);
    FockState psi = fock_from_sites(cfg, concentrated_sites(cfg));
    for (const auto& c : cfg.centers) {
        BoundReport rs = variance_average_check(s, c, 30.0);
        BoundReport rf = variance_average_check(psi, c, 30.0);
        CHECK(rs.holds());
        CHECK(rf.holds());
        CHECK(rs.lhs == doctest::Approx(rf.lhs).epsilon(1e-9));
        CHECK(rs.margin() >= 0.0);
    }
}

TEST_CASE("fraction bound report holds on both engines") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    FockState psi = fock_from_sites(cfg, concentrated_sites(cfg));
    BoundReport rf = fraction_bound_report(psi, 30.0, 0.03);
    CHECK(rf.hypothesis_ok);
    CHECK(rf.holds());
    CHECK(rf.params.at("surrogate") == 0.0);

    BoundReport rs = fraction_bound_report(concentrated_state(cfg), 30.0, 0.03);
    CHECK(rs.holds());
    CHECK(rs.params.at("surrogate") == 1.0);

    CHECK_THROWS(fraction_bound_report(psi, 5.0, 0.005));  // needs tau > L
}

TEST_CASE("window estimates hold at the hypothesis scale") {
    LatticeConfig cfg = derive_config(1, 10001, 3335, 0.5, 0.5);
    auto reports = window_estimate_reports(cfg, 2.5 * 10001.0);
    CHECK(reports.size() >= 5);
    for (const auto& r : reports) {
        INFO(r.name);
        CHECK(r.hypothesis_ok);
        CHECK(r.holds());
    }
}

TEST_CASE("front reaches a distant box after a time growing with L") {
    LatticeConfig cfg = derive_config(1, 101, 35, 1.0 / 3.0, 0.5);
    FrontReport fr = front_persistence(cfg);
    CHECK(fr.t_star > 0.0);
    CHECK(fr.t_star < 10.0 * 101.0);
    CHECK(fr.c_fitted == doctest::Approx(fr.t_star / 101.0));
    CHECK(fr.center[0] == 33);
}

TEST_CASE("report margins and holds are consistent") {
    BoundReport r;
    r.lhs = 1.0;
    r.rhs = 3.0;
    CHECK(r.margin() == doctest::Approx(2.0));
    CHECK(r.holds());
    r.lhs = 4.0;
    CHECK_FALSE(r.holds());
}
