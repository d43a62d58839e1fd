#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "feq/observables.hpp"
#include "feq/states.hpp"
#include "feq/timeavg.hpp"

using namespace feq;

namespace {

constexpr double kPi = std::numbers::pi;

// X(t) = |sum_k c_k e^{-i w_k t}|^2, whose exact kernel average is
// sum_{k,l} c_k conj(c_l) tent(w_k - w_l).
struct TrigSignal {
    std::vector<Complex> c;
    std::vector<double> w;

    double operator()(double t) const {
        Complex s = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            s += c[k] * Complex(std::cos(w[k] * t), -std::sin(w[k] * t));
        return std::norm(s);
    }
    double exact_average(double tau) const {
        double out = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            for (std::size_t l = 0; l < c.size(); ++l)
                out += (c[k] * std::conj(c[l])).real() * tent(w[k] - w[l], tau);
        return out;
    }
    double sup_bound() const {
        double s = 0.0;
        for (const Complex& x : c) s += std::abs(x);
        return s * s;
    }
};

TrigSignal random_signal(std::uint64_t seed, int terms) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    TrigSignal sig;
    for (int k = 0; k < terms; ++k) {
        sig.c.push_back(Complex(g(rng), g(rng)) * 0.5);
        sig.w.push_back(u(rng));
    }
    return sig;
}

}  // namespace

TEST_CASE("kernel shape: peak value, positivity, zeros") {
    CHECK(kernel_f_tau(0.0, 2.0) == doctest::Approx(1.0 / (2.0 * kPi)));
    CHECK(kernel_f_tau(2.0 * kPi, 1.0) == doctest::Approx(0.0));
    for (double t : {-7.3, -0.1, 0.4, 11.0}) CHECK(kernel_f_tau(t, 3.0) >= 0.0);
}

TEST_CASE("kernel normalizes to one") {
    for (double tau : {1.0, 10.0}) {
        CHECK(std::abs(phase_average_quadrature(0.0, tau) - Complex(1.0, 0.0)) < 1e-6);
    }
}

TEST_CASE("phase average equals the tent kernel") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (double tau : {1.0, 10.0}) {
        for (int k = 0; k < 8; ++k) {
            double omega = u(rng) - u(rng);
            CHECK(std::abs(phase_average_quadrature(omega, tau) - Complex(tent(omega, tau), 0.0)) <
                  1e-5);
        }
    }
}

TEST_CASE("interval-average floor constant exceeds one third") {
    // min over |t| <= tau of 2 tau f_tau(t) is 2 sin(1)^2 / pi
    double c = 2.0 * std::pow(std::sin(1.0), 2.0) / kPi;
    CHECK(c == doctest::Approx(0.45065).epsilon(1e-4));
    CHECK(c > 1.0 / 3.0);
    double floor = 1e300;
    for (int k = 0; k <= 2000; ++k) {
        double t = -5.0 + 10.0 * static_cast<double>(k) / 2000.0;
        floor = std::min(floor, 2.0 * 5.0 * kernel_f_tau(t, 5.0));
    }
    CHECK(floor == doctest::Approx(c).epsilon(1e-5));
}

TEST_CASE("threshold function decreases in tau and obeys the companion bound") {
    const double L = 10001.0;
    double prev = 1e300;
    for (double r : {2.5, 5.0, 10.0, 40.0}) {
        double d = delta_a(0.5, r * L, L, 1);
        CHECK(d < prev);
        prev = d;
        CHECK(d * d <= 2.0 * delta_a(1.0, r * L, L, 1) + 1e-15);
    }
    CHECK_THROWS(delta_a(0.5, 0.5 * L, L, 1));
}

TEST_CASE("quadrature average matches the exact trig answer within its error bar") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        TrigSignal sig = random_signal(seed, 4);
        const double tau = 6.0;
        const double t_cut = 60.0 * tau;
        auto q = time_average_quadrature([&](double t) { return sig(t); }, tau, t_cut,
                                         sig.sup_bound());
        CHECK(std::abs(q.value - sig.exact_average(tau)) <= q.truncation_bound + 1e-4);
        CHECK(q.truncation_bound <= sig.sup_bound() * 2.0 * tau / (kPi * t_cut) + 1e-15);
    }
}

TEST_CASE("nonnegative signals spend limited time above 3x their average") {
    // time-fraction bound: |{t in [-tau,tau] : X > delta}| / 2tau <= 3 [X]_tau / delta
    for (std::uint64_t seed : {5u, 8u, 13u}) {
        TrigSignal sig = random_signal(seed, 5);
        const double tau = 9.0;
        const double avg = sig.exact_average(tau);
        for (double delta : {4.0 * avg, 10.0 * avg}) {
            long above = 0;
            const long n = 40000;
            for (long k = 0; k < n; ++k) {
                double t = -tau + (static_cast<double>(k) + 0.5) * 2.0 * tau / static_cast<double>(n);
                if (sig(t) > delta) ++above;
            }
            double fraction = static_cast<double>(above) / static_cast<double>(n);
            CHECK(fraction <= 3.0 * avg / delta + 1e-3);
        }
    }
}

TEST_CASE("spectral average agrees with brute-force quadrature on both engines") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    SlaterState s = concentrated_state(cfg);
    FockState psi = fock_from_sites(cfg, concentrated_sites(cfg));
    SlaterDynamics dyn(s);
    const double tau = 7.0;
    const Coord c = cfg.centers[1];

    SpectralAverageResult slater = time_average_spectral(s, c, tau);
    SpectralAverageResult fock = time_average_spectral(psi, c, tau);
    CHECK(slater.value == doctest::Approx(fock.value).epsilon(1e-9));
    CHECK(slater.truncation_bound == doctest::Approx(0.0));  // no cutoff at this size

    const double t_cut = 400.0 * tau;
    auto q = time_average_quadrature([&](double t) { return dyn.delta_rho_sq(c, t); }, tau, t_cut,
                                     1.0);
    CHECK(std::abs(q.value - slater.value) <= q.truncation_bound + 1e-4);
}

TEST_CASE("spectral average of a stationary state equals its instantaneous variance") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    SlaterState s = momentum_filled_state(cfg);
    for (const auto& c : cfg.centers) {
        double avg = time_average_spectral(s, c, 11.0).value;
        CHECK(avg == doctest::Approx(delta_rho_sq_expectation(s, c)).epsilon(1e-9));
    }
}

TEST_CASE("nonequilibrium fraction: grid validation, determinism, surrogate dominance") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    FockState psi = fock_from_sites(cfg, concentrated_sites(cfg));
    SlaterDynamics dyn(concentrated_state(cfg));
    const double tau = 12.0;
    const double delta = 0.9;
    CHECK_THROWS(noneq_fraction(psi, tau, delta, tau / 10.0));

    TimeFractionReport exact = noneq_fraction(psi, tau, delta, tau / 1000.0);
    TimeFractionReport again = noneq_fraction(psi, tau, delta, tau / 1000.0);
    TimeFractionReport surr = noneq_fraction(dyn, tau, delta, tau / 1000.0);
    CHECK(exact.fraction == again.fraction);
    CHECK_FALSE(exact.surrogate);
    CHECK(surr.surrogate);
    // pointwise surrogate >= exact projector expectation, so the exceedance
    // fraction can only grow
    CHECK(exact.fraction <= surr.fraction + 1e-12);
}

TEST_CASE("default momentum cutoff clamps to the zone") {
    LatticeConfig small = derive_config(1, 9, 3, 0.5, 0.5);
    CHECK(default_m_cut(small) == 4);
    LatticeConfig big = derive_config(1, 10001, 3335, 0.5, 0.5);
    CHECK(default_m_cut(big) == 1501);
}
