#include "feq/states.hpp"

#include "feq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace feq {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t bit(long i) { return std::uint64_t{1} << i; }

}  // namespace

long binomial_capped(long V, long N) {
    if (N < 0 || N > V) return 0;
    const long cap = 2 * FockBasis::kMaxDim;
    if (N >= 1 && N <= V - 1 && V >= cap) return cap;
    long r = 1;
    for (long k = 1; k <= std::min(N, V - N); ++k) {
        r = r * (V - k + 1) / k;  // exact: C(V,k-1)*(V-k+1) is divisible by k
        if (r > cap) return cap;
    }
    return r;
}

FockBasis::FockBasis(long V, long N) : V_(V), N_(N) {
    if (V < 1 || N < 1 || N > V) throw std::invalid_argument("need 1 <= N <= V");
    if (V > 62) throw CapacityError("Fock engine requires V <= 62");
    if (binomial_capped(V, N) > kMaxDim) throw CapacityError("C(V,N) exceeds Fock engine capacity");
    std::uint64_t m = (bit(N)) - 1;
    const std::uint64_t limit = bit(V);
    while (m < limit) {
        masks_.push_back(m);
        // next bit permutation with the same popcount
        std::uint64_t t = m | (m - 1);
        m = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(m) + 1));
    }
}

long FockBasis::index(std::uint64_t mask) const {
    auto it = std::lower_bound(masks_.begin(), masks_.end(), mask);
    if (it == masks_.end() || *it != mask) return -1;
    return static_cast<long>(it - masks_.begin());
}

const FockBasis& fock_basis(const LatticeConfig& cfg) {
    static std::map<std::pair<long, long>, FockBasis> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(cfg.V, cfg.N);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, FockBasis(cfg.V, cfg.N)).first;
    return it->second;
}

MatrixXc momentum_transform(const LatticeConfig& cfg) {
    MatrixXc F(cfg.V, cfg.V);
    const double s = 1.0 / std::sqrt(static_cast<double>(cfg.V));
    for (long xi = 0; xi < cfg.V; ++xi) {
        Coord x = cfg.unflat(xi);
        for (long ai = 0; ai < cfg.V; ++ai) {
            Coord a = cfg.unflat(ai);
            long dot = 0;
            for (int mu = 0; mu < cfg.d; ++mu) dot += a[mu] * x[mu];
            double phase = 2.0 * kPi * static_cast<double>(dot) / static_cast<double>(cfg.L);
            F(xi, ai) = s * Complex(std::cos(phase), std::sin(phase));
        }
    }
    return F;
}

namespace {

// Amplitude update for a 2x2 mode rotation g on adjacent modes (p, p+1).
// Because the modes are adjacent, the mixing carries no fermionic sign.
void apply_adjacent_pair(const FockBasis& basis, VectorXc& amp, long p, const Eigen::Matrix2cd& g) {
    const std::uint64_t bp = bit(p), bq = bit(p + 1);
    const Complex det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    for (long i = 0; i < basis.dim(); ++i) {
        std::uint64_t m = basis.mask(i);
        const bool hp = m & bp, hq = m & bq;
        if (hp && hq) {
            amp[i] *= det;
        } else if (hp && !hq) {
            long j = basis.index(m ^ (bp | bq));
            Complex a = amp[i], b = amp[j];
            amp[i] = g(0, 0) * a + g(0, 1) * b;
            amp[j] = g(1, 0) * a + g(1, 1) * b;
        }
    }
}

}  // namespace

FockState apply_single_particle_unitary(const FockState& psi, const MatrixXc& u) {
    const LatticeConfig& cfg = *psi.cfg;
    const FockBasis& basis = fock_basis(cfg);
    const long V = cfg.V;

    // QR-style reduction by adjacent Givens rotations: R_K ... R_1 u = D.
    MatrixXc R = u;
    std::vector<std::pair<long, Eigen::Matrix2cd>> rots;
    for (long j = 0; j < V; ++j) {
        for (long i = V - 1; i > j; --i) {
            Complex a = R(i - 1, j), b = R(i, j);
            double r = std::sqrt(std::norm(a) + std::norm(b));
            if (std::abs(b) < 1e-300) continue;
            Eigen::Matrix2cd g;
            g << std::conj(a) / r, std::conj(b) / r, -b / r, a / r;
            R.middleRows(i - 1, 2) = (g * R.middleRows(i - 1, 2)).eval();
            rots.emplace_back(i - 1, g);
        }
    }

    // u = G_1^+ ... G_K^+ D, so act with D first, then the G_k^+ in reverse.
    FockState out{psi.cfg, psi.amplitudes};
    for (long i = 0; i < basis.dim(); ++i) {
        Complex ph = 1.0;
        std::uint64_t m = basis.mask(i);
        while (m) {
            long p = std::countr_zero(m);
            ph *= R(p, p);
            m &= m - 1;
        }
        out.amplitudes[i] *= ph;
    }
    for (auto it = rots.rbegin(); it != rots.rend(); ++it) {
        apply_adjacent_pair(basis, out.amplitudes, it->first, Eigen::Matrix2cd(it->second.adjoint()));
    }
    return out;
}

FockState to_momentum_basis(const FockState& psi) {
    return apply_single_particle_unitary(psi, momentum_transform(*psi.cfg).adjoint());
}

FockState from_momentum_basis(const FockState& phi) {
    return apply_single_particle_unitary(phi, momentum_transform(*phi.cfg));
}

FockState evolve_fock(const FockState& psi, double t) {
    const LatticeConfig& cfg = *psi.cfg;
    const FockBasis& basis = fock_basis(cfg);
    FockState phi = to_momentum_basis(psi);
    std::vector<double> E(cfg.V);
    for (long a = 0; a < cfg.V; ++a) E[a] = dispersion_flat(a, cfg);
    for (long i = 0; i < basis.dim(); ++i) {
        double etot = 0.0;
        std::uint64_t m = basis.mask(i);
        while (m) {
            etot += E[std::countr_zero(m)];
            m &= m - 1;
        }
        phi.amplitudes[i] *= Complex(std::cos(t * etot), -std::sin(t * etot));
    }
    return from_momentum_basis(phi);
}

SlaterState evolve_slater(const SlaterState& s, double t) {
    const LatticeConfig& cfg = *s.cfg;
    MatrixXc F = momentum_transform(cfg);
    MatrixXc A = F.adjoint() * s.orbitals;
    for (long a = 0; a < cfg.V; ++a) {
        double e = dispersion_flat(a, cfg);
        A.row(a) *= Complex(std::cos(t * e), -std::sin(t * e));
    }
    return SlaterState{s.cfg, F * A};
}

CorrelationMatrix correlation(const SlaterState& s) {
    return CorrelationMatrix{s.orbitals * s.orbitals.adjoint()};
}

double p_neq_expectation(const FockState& psi) {
    const LatticeConfig& cfg = *psi.cfg;
    const FockBasis& basis = fock_basis(cfg);
    double ld = 1.0;
    for (int mu = 0; mu < cfg.d; ++mu) ld *= static_cast<double>(cfg.l);
    const double mean = static_cast<double>(cfg.N) / static_cast<double>(cfg.V);
    const double thr = cfg.epsilon * cfg.rho_bar;

    std::vector<std::uint64_t> boxmasks;
    for (const auto& c : cfg.centers) {
        std::uint64_t bm = 0;
        for (long s : cfg.box_sites(c)) bm |= bit(s);
        boxmasks.push_back(bm);
    }
    double out = 0.0;
    for (long i = 0; i < basis.dim(); ++i) {
        std::uint64_t m = basis.mask(i);
        bool neq = false;
        for (std::uint64_t bm : boxmasks) {
            double lam = static_cast<double>(std::popcount(m & bm)) / ld - mean;
            if (std::abs(lam) > thr) {
                neq = true;
                break;
            }
        }
        if (neq) out += std::norm(psi.amplitudes[i]);
    }
    return out;
}

std::vector<long> concentrated_sites(const LatticeConfig& cfg) {
    std::vector<std::pair<std::pair<long, Coord>, long>> order;  // ((dist, coord), flat)
    for (long i = 0; i < cfg.V; ++i) {
        Coord x = cfg.unflat(i);
        long d2 = 0;
        for (int mu = 0; mu < cfg.d; ++mu) d2 += x[mu] * x[mu];
        order.push_back({{d2, x}, i});
    }
    std::sort(order.begin(), order.end());
    std::vector<long> sites(cfg.N);
    for (long k = 0; k < cfg.N; ++k) sites[k] = order[k].second;
    return sites;
}

SlaterState slater_from_sites(const LatticeConfig& cfg, const std::vector<long>& sites) {
    MatrixXc phi = MatrixXc::Zero(cfg.V, static_cast<long>(sites.size()));
    for (long j = 0; j < static_cast<long>(sites.size()); ++j) phi(sites[j], j) = 1.0;
    return SlaterState{&cfg, phi};
}

SlaterState concentrated_state(const LatticeConfig& cfg) {
    return slater_from_sites(cfg, concentrated_sites(cfg));
}

SlaterState uniform_product_state(const LatticeConfig& cfg) {
    // round-robin over boxes, filling each box outward from its center
    std::vector<std::vector<long>> per_box;
    for (const auto& c : cfg.centers) {
        auto sites = cfg.box_sites(c);
        std::sort(sites.begin(), sites.end(), [&](long a, long b) {
            Coord xa = cfg.unflat(a), xb = cfg.unflat(b);
            long da = 0, db = 0;
            for (int mu = 0; mu < cfg.d; ++mu) {
                da += cfg.wrap(xa[mu] - c[mu]) * cfg.wrap(xa[mu] - c[mu]);
                db += cfg.wrap(xb[mu] - c[mu]) * cfg.wrap(xb[mu] - c[mu]);
            }
            return da != db ? da < db : a < b;
        });
        per_box.push_back(std::move(sites));
    }
    std::vector<bool> occupied(cfg.V, false);
    std::vector<long> chosen;
    while (static_cast<long>(chosen.size()) < cfg.N) {
        bool progress = false;
        for (auto& box : per_box) {
            if (static_cast<long>(chosen.size()) == cfg.N) break;
            for (long s : box) {
                if (!occupied[s]) {
                    occupied[s] = true;
                    chosen.push_back(s);
                    progress = true;
                    break;
                }
            }
        }
        if (!progress) throw std::logic_error("uniform_product: placement stalled");
    }
    std::sort(chosen.begin(), chosen.end());
    return slater_from_sites(cfg, chosen);
}

SlaterState momentum_filled_state(const LatticeConfig& cfg) {
    std::vector<std::pair<double, long>> order;
    for (long a = 0; a < cfg.V; ++a) order.push_back({std::abs(dispersion_flat(a, cfg)), a});
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    MatrixXc F = momentum_transform(cfg);
    MatrixXc phi(cfg.V, cfg.N);
    for (long j = 0; j < cfg.N; ++j) phi.col(j) = F.col(order[j].second);
    return SlaterState{&cfg, phi};
}

SlaterState random_slater_state(const LatticeConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    MatrixXc A(cfg.V, cfg.N);
    for (long i = 0; i < cfg.V; ++i)
        for (long j = 0; j < cfg.N; ++j) A(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<MatrixXc> qr(A);
    MatrixXc Q = qr.householderQ() * MatrixXc::Identity(cfg.V, cfg.N);
    return SlaterState{&cfg, Q};
}

FockState random_fock_state(const LatticeConfig& cfg, std::uint64_t seed) {
    const FockBasis& basis = fock_basis(cfg);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    FockState psi{&cfg, VectorXc(basis.dim())};
    for (long i = 0; i < basis.dim(); ++i) psi.amplitudes[i] = Complex(gauss(rng), gauss(rng));
    psi.amplitudes /= psi.amplitudes.norm();
    return psi;
}

FockState fock_from_sites(const LatticeConfig& cfg, const std::vector<long>& sites) {
    const FockBasis& basis = fock_basis(cfg);
    std::uint64_t m = 0;
    for (long s : sites) m |= bit(s);
    if (std::popcount(m) != static_cast<int>(cfg.N)) throw std::invalid_argument("site list must hold N distinct sites");
    FockState psi{&cfg, VectorXc::Zero(basis.dim())};
    psi.amplitudes[basis.index(m)] = 1.0;
    return psi;
}

FockState fock_from_momentum_modes(const LatticeConfig& cfg, const std::vector<long>& modes) {
    FockState phi = fock_from_sites(cfg, modes);  // same mask basis
    return from_momentum_basis(phi);
}

FockState fock_from_slater(const SlaterState& s) {
    const LatticeConfig& cfg = *s.cfg;
    const FockBasis& basis = fock_basis(cfg);
    FockState psi{&cfg, VectorXc(basis.dim())};
    MatrixXc sub(cfg.N, cfg.N);
    for (long i = 0; i < basis.dim(); ++i) {
        std::uint64_t m = basis.mask(i);
        long row = 0;
        while (m) {
            sub.row(row++) = s.orbitals.row(std::countr_zero(m));
            m &= m - 1;
        }
        psi.amplitudes[i] = sub.determinant();
    }
    return psi;
}

}  // namespace feq
