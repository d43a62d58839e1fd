#include "feq/timeavg.hpp"

#include <gsl/gsl_sf_expint.h>

#include <bit>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "feq/spectral.hpp"

namespace feq {

namespace {
constexpr double kPi = std::numbers::pi;

Complex unit_phase(double theta) { return {std::cos(theta), std::sin(theta)}; }
}  // namespace

double kernel_f_tau(double t, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
    const double u = t / tau;
    if (u == 0.0) return 1.0 / (kPi * tau);
    const double s = std::sin(u) / u;
    return s * s / (kPi * tau);
}

double tent(double omega, double tau) {
    return std::max(0.0, 1.0 - 0.5 * tau * std::abs(omega));
}

double delta_a(double a, double tau, double L, int d) {
    if (!(tau > L) || !(L > 1.0)) throw std::invalid_argument("delta_a requires tau > L > 1");
    const double r = tau / L;
    const double first = std::log(r) / r;
    const double second = std::pow(std::log(L), 2.0 * d) / L;
    return std::pow(first, a) + std::pow(second, a);
}

namespace {

// composite Simpson of g over [-T, T] with n (even) intervals
template <typename G>
double simpson(const G& g, double T, long n) {
    const double h = 2.0 * T / static_cast<double>(n);
    double sum = g(-T) + g(T);
    for (long k = 1; k < n; ++k) sum += g(-T + h * static_cast<double>(k)) * ((k % 2) ? 4.0 : 2.0);
    return sum * h / 3.0;
}

template <typename G>
double simpson_adaptive(const G& g, double T, long n0, double tol) {
    long n = n0;
    double prev = simpson(g, T, n);
    for (int it = 0; it < 20; ++it) {
        n *= 2;
        double cur = simpson(g, T, n);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
        if (n > (1L << 26)) break;
    }
    return prev;
}

}  // namespace

QuadratureResult time_average_quadrature(const std::function<double(double)>& X, double tau,
                                         double t_cut, double sup_bound, double dt0) {
    if (t_cut < tau) throw std::invalid_argument("t_cut must be at least tau");
    if (sup_bound < 0.0) throw std::invalid_argument("sup_bound must be nonnegative");
    if (dt0 <= 0.0) dt0 = tau / 8.0;
    long n = 2 * std::max<long>(8, static_cast<long>(std::ceil(t_cut / dt0)));
    auto g = [&](double t) { return kernel_f_tau(t, tau) * X(t); };
    double prev = simpson(g, t_cut, n);
    QuadratureResult out;
    for (int it = 0;; ++it) {
        n *= 2;
        double cur = simpson(g, t_cut, n);
        if (std::abs(cur - prev) <= 1e-6 || it >= 16) {
            out.value = cur;
            out.step = 2.0 * t_cut / static_cast<double>(n);
            break;
        }
        prev = cur;
    }
    // f_tau(t) <= tau / (pi t^2) bounds the discarded tails
    out.truncation_bound = sup_bound * 2.0 * tau / (kPi * t_cut);
    return out;
}

std::complex<double> phase_average_quadrature(double omega, double tau, double t_cut) {
    if (t_cut <= 0.0) t_cut = 50.0 * tau;
    const double b = 2.0 / tau;
    // resolve both the kernel scale and the phase oscillation
    const double scale = std::min(tau, 2.0 * kPi / (std::abs(omega) + b));
    long n0 = 2 * std::max<long>(16, static_cast<long>(std::ceil(8.0 * t_cut / scale)));
    double re = simpson_adaptive([&](double t) { return kernel_f_tau(t, tau) * std::cos(omega * t); },
                                 t_cut, n0, 1e-9);
    double im = simpson_adaptive([&](double t) { return -kernel_f_tau(t, tau) * std::sin(omega * t); },
                                 t_cut, n0, 1e-9);

    // exact two-sided tail: f_tau(t) = tau (1 - cos(bt)) / (2 pi t^2), so the
    // tail reduces to integrals of cos(at)/t^2, expressible through Si
    auto I2 = [&](double a) {
        a = std::abs(a);
        if (a == 0.0) return 1.0 / t_cut;
        return std::cos(a * t_cut) / t_cut - a * (0.5 * kPi - gsl_sf_Si(a * t_cut));
    };
    const double w = std::abs(omega);
    re += (tau / kPi) * (I2(w) - 0.5 * I2(w + b) - 0.5 * I2(w - b));
    // the imaginary tail integrand is odd in t and cancels exactly
    return {re, im};
}

long default_m_cut(const LatticeConfig& cfg) {
    long m = static_cast<long>(std::ceil(500.0 * static_cast<double>(cfg.n))) + 1;
    return std::min(m, (cfg.L - 1) / 2);
}

namespace {

struct MomentumTerm {
    Coord m;
    Complex weight;                              // w(m) exp(-2 pi i m.c / L)
    std::vector<std::pair<double, long>> lv;     // (E~_{beta,m}, beta) sorted by E
};

std::vector<MomentumTerm> build_terms(const LatticeConfig& cfg, const Coord& c, long m_cut) {
    std::vector<MomentumTerm> terms;
    std::vector<double> disp(cfg.V);
    for (long a = 0; a < cfg.V; ++a) disp[a] = dispersion_flat(a, cfg);
    for (long mi = 0; mi < cfg.V; ++mi) {
        Coord m = cfg.unflat(mi);
        if (inf_norm(m) == 0 || inf_norm(m) > m_cut) continue;
        double wm = w_tilde(m, cfg);
        long mc = 0;
        for (int mu = 0; mu < cfg.d; ++mu) mc += m[mu] * c[mu];
        MomentumTerm term;
        term.m = m;
        term.weight = wm * unit_phase(-2.0 * kPi * static_cast<double>(mc) / static_cast<double>(cfg.L));
        term.lv.resize(cfg.V);
        for (long beta = 0; beta < cfg.V; ++beta) {
            term.lv[beta] = {disp[beta] - disp[add_momentum(beta, m, cfg)], beta};
        }
        std::sort(term.lv.begin(), term.lv.end());
        terms.push_back(std::move(term));
    }
    return terms;
}

// Schwarz bound on the contribution of all (m, n) pairs outside the cut.
double truncation_tail(const LatticeConfig& cfg, double tau, long m_cut) {
    if (m_cut >= (cfg.L - 1) / 2) return 0.0;
    double s_full = 0.0, s_kept = 0.0;
    for (long mi = 0; mi < cfg.V; ++mi) {
        Coord m = cfg.unflat(mi);
        const long nm = inf_norm(m);
        if (nm == 0) continue;
        double contrib = std::abs(w_tilde(m, cfg)) * std::sqrt(jm_exact(m, tau, cfg).value);
        s_full += contrib;
        if (nm <= m_cut) s_kept += contrib;
    }
    s_full /= static_cast<double>(cfg.V);
    s_kept /= static_cast<double>(cfg.V);
    return s_full * s_full - s_kept * s_kept;
}

// quartic(beta+m, beta, gamma, gamma+n) -> <a+_{b+m} a_b a+_g a_{g+n}>
template <typename Quartic>
SpectralAverageResult spectral_core(const LatticeConfig& cfg, const Coord& c, double tau, long m_cut,
                                    const Quartic& quartic) {
    if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
    if (m_cut == 0) m_cut = default_m_cut(cfg);
    if (m_cut <= 0) throw std::invalid_argument("m_cut must be positive");
    m_cut = std::min(m_cut, (cfg.L - 1) / 2);

    auto terms = build_terms(cfg, c, m_cut);
    const double width = 2.0 / tau;
    Complex total = 0.0;
    for (const auto& tm : terms) {
        for (const auto& tn : terms) {
            const Complex w = tm.weight * std::conj(tn.weight);
            if (std::abs(w) == 0.0) continue;
            if (tm.lv.front().first - tn.lv.back().first >= width) continue;
            if (tn.lv.front().first - tm.lv.back().first >= width) continue;
            std::size_t lo = 0, hi = 0;
            Complex pair_sum = 0.0;
            for (const auto& [eb, beta] : tm.lv) {
                while (lo < tn.lv.size() && tn.lv[lo].first <= eb - width) ++lo;
                if (hi < lo) hi = lo;
                while (hi < tn.lv.size() && tn.lv[hi].first < eb + width) ++hi;
                const long bpm = add_momentum(beta, tm.m, cfg);
                for (std::size_t k = lo; k < hi; ++k) {
                    const auto& [eg, gamma] = tn.lv[k];
                    const double tv = tent(eb - eg, tau);
                    if (tv <= 0.0) continue;
                    pair_sum += tv * quartic(bpm, beta, gamma, add_momentum(gamma, tn.m, cfg));
                }
            }
            total += w * pair_sum;
        }
    }
    SpectralAverageResult out;
    const double V = static_cast<double>(cfg.V);
    out.value = total.real() / (V * V);
    out.m_cut = m_cut;
    out.truncation_bound = truncation_tail(cfg, tau, m_cut);
    return out;
}

}  // namespace

SpectralAverageResult time_average_spectral(const SlaterState& s, const Coord& c, double tau, long m_cut) {
    const LatticeConfig& cfg = *s.cfg;
    MatrixXc A = momentum_transform(cfg).adjoint() * s.orbitals;
    // Q(a, b) = <a+_a a_b>
    MatrixXc Q = A.conjugate() * A.transpose();
    auto quartic = [&](long bpm, long b, long g, long gpn) -> Complex {
        Complex cross = Q(bpm, gpn) * ((b == g ? 1.0 : 0.0) - Q(g, b));
        return Q(bpm, b) * Q(g, gpn) + cross;
    };
    return spectral_core(cfg, c, tau, m_cut, quartic);
}

SpectralAverageResult time_average_spectral(const FockState& psi, const Coord& c, double tau, long m_cut) {
    const LatticeConfig& cfg = *psi.cfg;
    const FockBasis& basis = fock_basis(cfg);
    FockState phi = to_momentum_basis(psi);

    // hops[p][q] = a+_p a_q |phi> in the momentum occupation basis
    if (cfg.V * cfg.V * basis.dim() > 8'000'000L)
        throw std::invalid_argument("Fock spectral path limited to small systems");
    std::vector<std::vector<VectorXc>> hops(cfg.V, std::vector<VectorXc>(cfg.V));
    for (long p = 0; p < cfg.V; ++p) {
        for (long q = 0; q < cfg.V; ++q) {
            if (p == q) continue;
            VectorXc v = VectorXc::Zero(basis.dim());
            const std::uint64_t bp = std::uint64_t{1} << p;
            const std::uint64_t bq = std::uint64_t{1} << q;
            for (long i = 0; i < basis.dim(); ++i) {
                const std::uint64_t msk = basis.mask(i);
                if (!(msk & bq) || (msk & bp)) continue;
                const std::uint64_t removed = msk & ~bq;
                const int sgn = std::popcount(msk & (bq - 1)) + std::popcount(removed & (bp - 1));
                v[basis.index(removed | bp)] += ((sgn & 1) ? -1.0 : 1.0) * phi.amplitudes[i];
            }
            hops[p][q] = std::move(v);
        }
    }
    auto quartic = [&](long bpm, long b, long g, long gpn) -> Complex {
        // <phi| a+_{bpm} a_b a+_g a_{gpn} |phi> = <a+_b a_{bpm} phi, a+_g a_{gpn} phi>
        return hops[b][bpm].dot(hops[g][gpn]);
    };
    return spectral_core(cfg, c, tau, m_cut, quartic);
}

TimeFractionReport noneq_fraction(const FockState& psi0, double tau, double delta, double dt) {
    if (!(dt > 0.0) || dt > tau / 1000.0) throw std::invalid_argument("need 0 < dt <= tau/1000");
    const long samples = static_cast<long>(std::llround(2.0 * tau / dt));
    long count = 0;
    for (long k = 0; k < samples; ++k) {
        const double t = -tau + (static_cast<double>(k) + 0.5) * 2.0 * tau / static_cast<double>(samples);
        if (p_neq_expectation(evolve_fock(psi0, t)) > delta) ++count;
    }
    return {tau, delta, dt, static_cast<double>(count) / static_cast<double>(samples), false, samples};
}

TimeFractionReport noneq_fraction(const SlaterDynamics& dyn, double tau, double delta, double dt) {
    if (!(dt > 0.0) || dt > tau / 1000.0) throw std::invalid_argument("need 0 < dt <= tau/1000");
    const long samples = static_cast<long>(std::llround(2.0 * tau / dt));
    long count = 0;
    for (long k = 0; k < samples; ++k) {
        const double t = -tau + (static_cast<double>(k) + 0.5) * 2.0 * tau / static_cast<double>(samples);
        if (dyn.neq_surrogate(t) > delta) ++count;
    }
    return {tau, delta, dt, static_cast<double>(count) / static_cast<double>(samples), true, samples};
}

}  // namespace feq
