#include "feq/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace feq {

long LatticeConfig::wrap(long x) const {
    long r = x % L;
    if (r < 0) r += L;
    if (r > (L - 1) / 2) r -= L;
    return r;
}

long LatticeConfig::flat(const Coord& x) const {
    long idx = 0;
    for (int mu = d - 1; mu >= 0; --mu) {
        long digit = wrap(x[mu]) + (L - 1) / 2;  // in [0, L)
        idx = idx * L + digit;
    }
    return idx;
}

Coord LatticeConfig::unflat(long idx) const {
    Coord x(d);
    for (int mu = 0; mu < d; ++mu) {
        x[mu] = idx % L - (L - 1) / 2;
        idx /= L;
    }
    return x;
}

bool LatticeConfig::in_box(const Coord& x, const Coord& c) const {
    for (int mu = 0; mu < d; ++mu) {
        if (std::labs(wrap(x[mu] - c[mu])) > (l - 1) / 2) return false;
    }
    return true;
}

std::vector<long> LatticeConfig::box_sites(const Coord& c) const {
    std::vector<long> sites;
    long ld = 1;
    for (int mu = 0; mu < d; ++mu) ld *= l;
    sites.reserve(ld);
    Coord x(d);
    // odometer over the box window c + (-(l-1)/2 .. (l-1)/2)^d
    std::vector<long> off(d, -(l - 1) / 2);
    while (true) {
        for (int mu = 0; mu < d; ++mu) x[mu] = wrap(c[mu] + off[mu]);
        sites.push_back(flat(x));
        int mu = 0;
        for (; mu < d; ++mu) {
            if (++off[mu] <= (l - 1) / 2) break;
            off[mu] = -(l - 1) / 2;
        }
        if (mu == d) break;
    }
    return sites;
}

LatticeConfig derive_config(int d, long L, long l, double rho_bar, double epsilon) {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    if (L < 3 || L % 2 == 0) throw std::invalid_argument("L must be odd and >= 3");
    if (l < 1 || l % 2 == 0) throw std::invalid_argument("l must be odd and >= 1");
    if (l > L) throw std::invalid_argument("l must not exceed L");
    if (!(rho_bar > 0.0 && rho_bar <= 1.0)) throw std::invalid_argument("rho_bar must be in (0, 1]");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0, 1)");

    LatticeConfig cfg;
    cfg.d = d;
    cfg.L = L;
    cfg.l = l;
    cfg.rho_bar = rho_bar;
    cfg.epsilon = epsilon;

    cfg.V = 1;
    for (int mu = 0; mu < d; ++mu) {
        if (cfg.V > (1L << 56) / L) throw std::invalid_argument("V = L^d overflows");
        cfg.V *= L;
    }

    // largest N with N/V <= rho_bar; the 1e-9 slack absorbs decimal inputs
    // like 1/3 that cannot be represented exactly
    cfg.N = static_cast<long>(std::floor(rho_bar * static_cast<double>(cfg.V) + 1e-9));
    if (cfg.N > cfg.V) cfg.N = cfg.V;
    if (cfg.N < 1) throw std::invalid_argument("rho_bar yields N = 0");

    cfg.n = (L + l - 1) / l;

    // centers {j*l ; -n/2 < j <= n/2}^d
    std::vector<long> js;
    for (long j = -(cfg.n - 1) / 2; j <= cfg.n / 2; ++j) js.push_back(j);
    if (static_cast<long>(js.size()) != cfg.n) throw std::logic_error("center count mismatch");
    std::vector<Coord> centers{Coord{}};
    for (int mu = 0; mu < d; ++mu) {
        std::vector<Coord> next;
        next.reserve(centers.size() * js.size());
        for (const auto& c : centers) {
            for (long j : js) {
                Coord cc = c;
                cc.push_back(cfg.wrap(j * l));
                next.push_back(std::move(cc));
            }
        }
        centers = std::move(next);
    }
    cfg.centers = std::move(centers);
    return cfg;
}

double dispersion(const Coord& alpha, const LatticeConfig& cfg) {
    double e = 0.0;
    for (int mu = 0; mu < cfg.d; ++mu) {
        e += 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(alpha[mu]) / static_cast<double>(cfg.L));
    }
    return e;
}

double dispersion_flat(long alpha_idx, const LatticeConfig& cfg) {
    return dispersion(cfg.unflat(alpha_idx), cfg);
}

long box_side_for(long L, long n) {
    for (long l = 1; l <= L; l += 2) {
        if ((L + l - 1) / l == n) return l;
    }
    throw std::invalid_argument("no odd box side gives n = " + std::to_string(n));
}

}  // namespace feq
