#include "feq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace feq {

namespace {
constexpr double kPi = std::numbers::pi;

bool is_zero(const Coord& m) {
    for (long v : m)
        if (v != 0) return false;
    return true;
}
}  // namespace

std::vector<double> levels_1d(long m, long L) {
    if (m % L == 0) throw std::invalid_argument("levels require m != 0");
    std::vector<double> v(L);
    const long half = (L - 1) / 2;
    for (long beta = -half; beta <= half; ++beta) {
        double eb = 2.0 * std::cos(2.0 * kPi * static_cast<double>(beta) / static_cast<double>(L));
        double ebm = 2.0 * std::cos(2.0 * kPi * static_cast<double>(beta + m) / static_cast<double>(L));
        v[beta + half] = eb - ebm;
    }
    return v;
}

LevelSet levels(const Coord& m, const LatticeConfig& cfg) {
    if (is_zero(m)) throw std::invalid_argument("levels require m != 0");
    // separable: accumulate coordinate sums dimension by dimension
    std::vector<double> acc{0.0};
    for (int mu = 0; mu < cfg.d; ++mu) {
        std::vector<double> one(cfg.L, 0.0);
        if (m[mu] != 0) one = levels_1d(m[mu], cfg.L);
        std::vector<double> next;
        next.reserve(acc.size() * one.size());
        for (double a : acc)
            for (double b : one) next.push_back(a + b);
        acc = std::move(next);
    }
    std::sort(acc.begin(), acc.end());
    LevelSet ls;
    ls.m = m;
    ls.values = std::move(acc);
    return ls;
}

SpectralProfile profile(const LevelSet& ls, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
    const double h = 1.0 / tau;
    std::vector<std::pair<double, int>> events;
    events.reserve(2 * ls.values.size());
    for (double e : ls.values) {
        events.push_back({e - h, +1});
        events.push_back({e + h, -1});
    }
    std::sort(events.begin(), events.end());
    SpectralProfile p;
    p.breakpoints.reserve(events.size());
    p.counts.reserve(events.size());
    long c = 0;
    std::size_t i = 0;
    while (i < events.size()) {
        const double x = events[i].first;
        while (i < events.size() && events[i].first == x) c += events[i++].second;
        p.breakpoints.push_back(x);
        p.counts.push_back(c);  // valid on (breakpoints[k], breakpoints[k+1])
    }
    p.counts.pop_back();  // count past the last breakpoint is zero
    return p;
}

long profile_count_at(const SpectralProfile& p, double E) {
    auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), E);
    if (it == p.breakpoints.begin() || it == p.breakpoints.end()) return 0;
    return p.counts[static_cast<std::size_t>(it - p.breakpoints.begin()) - 1];
}

long omega_count_sorted(const std::vector<double>& sorted_levels, double E, double one_over_tau) {
    auto lo = std::upper_bound(sorted_levels.begin(), sorted_levels.end(), E - one_over_tau);
    auto hi = std::lower_bound(sorted_levels.begin(), sorted_levels.end(), E + one_over_tau);
    return static_cast<long>(hi - lo);
}

long omega_count(const Coord& m, double E, double tau, const LatticeConfig& cfg) {
    LevelSet ls = levels(m, cfg);
    return omega_count_sorted(ls.values, E, 1.0 / tau);
}

JmValue jm_from_sorted_levels(const std::vector<double>& sorted_levels, double tau) {
    const double h = 1.0 / tau;
    // sweep the +-h interval endpoints; within each segment the count is
    // constant. Both endpoint sequences are already sorted, so a two-way
    // merge visits the events in order without allocating.
    const std::size_t n = sorted_levels.size();
    double sq = 0.0;
    long c = 0;
    std::size_t i = 0, j = 0;
    double prev = n ? sorted_levels[0] - h : 0.0;
    while (j < n) {
        const bool open = i < n && sorted_levels[i] - h <= sorted_levels[j] + h;
        const double x = open ? sorted_levels[i] - h : sorted_levels[j] + h;
        sq += static_cast<double>(c) * static_cast<double>(c) * (x - prev);
        prev = x;
        if (open) {
            ++c;
            ++i;
        } else {
            --c;
            ++j;
        }
    }
    JmValue out;
    out.num_levels = static_cast<long>(sorted_levels.size());
    out.value = 0.5 * tau * sq;
    out.abs_integral = static_cast<double>(out.num_levels);  // (tau/2) * nlev * (2/tau), exact
    return out;
}

JmValue jm_exact(const Coord& m, double tau, const LatticeConfig& cfg) {
    LevelSet ls = levels(m, cfg);
    return jm_from_sorted_levels(ls.values, tau);
}

JmValue jm_exact_1d(long m, double tau, long L) {
    auto v = levels_1d(m, L);
    std::sort(v.begin(), v.end());
    return jm_from_sorted_levels(v, tau);
}

std::vector<double> sorted_sines_1d(long m, long L) {
    std::vector<double> v(L);
    const long half = (L - 1) / 2;
    for (long beta = -half; beta <= half; ++beta) {
        v[beta + half] = std::sin(2.0 * kPi * (static_cast<double>(beta) + 0.5 * static_cast<double>(m)) /
                                  static_cast<double>(L));
    }
    std::sort(v.begin(), v.end());
    return v;
}

long omega_brute_1d(const std::vector<double>& sorted_sines, double x, double delta) {
    auto lo = std::lower_bound(sorted_sines.begin(), sorted_sines.end(), x - delta);
    auto hi = std::upper_bound(sorted_sines.begin(), sorted_sines.end(), x + delta);
    return static_cast<long>(hi - lo);
}

double abs_c_m(long m, long L) {
    return 4.0 * std::abs(std::sin(kPi * static_cast<double>(m) / static_cast<double>(L)));
}

double window_count_bound(double x, double delta, long L) {
    const double ax = std::abs(x);
    if (ax > 1.0 + delta) return 0.0;
    const double u = std::min(ax, 1.0 - delta);
    return static_cast<double>(L) * delta / std::sqrt(1.0 - u * u) + 2.0;
}

double jm_log_bound(long m, double tau, long L) {
    const double ct = abs_c_m(m, L) * tau;
    const double Ld = static_cast<double>(L);
    return Ld * Ld * std::log(ct) / ct + 4.0 * Ld;
}

long inf_norm(const Coord& m) {
    long v = 0;
    for (long c : m) v = std::max(v, std::labs(c));
    return v;
}

double jm_reduction_bound(const Coord& m, double tau, const LatticeConfig& cfg) {
    const double V = static_cast<double>(cfg.V);
    const double L = static_cast<double>(cfg.L);
    return (V * V) / (L * L) * jm_exact_1d(inf_norm(m), tau, cfg.L).value;
}

bool asymptotic_regime(long L, double tau) { return L > 10000 && tau > 2.0 * static_cast<double>(L); }

}  // namespace feq
