#include "feq/observables.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace feq {

namespace {

constexpr double kPi = std::numbers::pi;

double box_volume(const LatticeConfig& cfg) {
    double ld = 1.0;
    for (int mu = 0; mu < cfg.d; ++mu) ld *= static_cast<double>(cfg.l);
    return ld;
}

std::uint64_t box_bitmask(const LatticeConfig& cfg, const Coord& c) {
    std::uint64_t bm = 0;
    for (long s : cfg.box_sites(c)) bm |= std::uint64_t{1} << s;
    return bm;
}

Complex unit_phase(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace

double w1(long k, const LatticeConfig& cfg) {
    if (k == 0) return 1.0;
    const double L = static_cast<double>(cfg.L);
    const double l = static_cast<double>(cfg.l);
    return std::sin(kPi * static_cast<double>(k) * l / L) /
           (l * std::sin(kPi * static_cast<double>(k) / L));
}

double w_tilde(const Coord& m, const LatticeConfig& cfg) {
    double p = 1.0;
    for (int mu = 0; mu < cfg.d; ++mu) p *= w1(m[mu], cfg);
    return p;
}

std::vector<double> window_abs_prefix(const LatticeConfig& cfg) {
    const long half = (cfg.L - 1) / 2;
    std::vector<double> prefix(half + 1);
    prefix[0] = 1.0;
    for (long m = 1; m <= half; ++m) prefix[m] = prefix[m - 1] + 2.0 * std::abs(w1(m, cfg));
    return prefix;
}

long add_momentum(long beta_idx, const Coord& m, const LatticeConfig& cfg) {
    Coord b = cfg.unflat(beta_idx);
    for (int mu = 0; mu < cfg.d; ++mu) b[mu] = cfg.wrap(b[mu] + m[mu]);
    return cfg.flat(b);
}

double e_tilde(long beta_idx, const Coord& m, const LatticeConfig& cfg) {
    return dispersion_flat(beta_idx, cfg) - dispersion_flat(add_momentum(beta_idx, m, cfg), cfg);
}

double density_expectation(const FockState& psi, const Coord& c) {
    const LatticeConfig& cfg = *psi.cfg;
    const FockBasis& basis = fock_basis(cfg);
    const std::uint64_t bm = box_bitmask(cfg, c);
    const double ld = box_volume(cfg);
    double out = 0.0;
    for (long i = 0; i < basis.dim(); ++i) {
        out += std::norm(psi.amplitudes[i]) * static_cast<double>(std::popcount(basis.mask(i) & bm));
    }
    return out / ld;
}

double delta_rho_sq_expectation(const FockState& psi, const Coord& c) {
    const LatticeConfig& cfg = *psi.cfg;
    const FockBasis& basis = fock_basis(cfg);
    const std::uint64_t bm = box_bitmask(cfg, c);
    const double ld = box_volume(cfg);
    const double mean = static_cast<double>(cfg.N) / static_cast<double>(cfg.V);
    double out = 0.0;
    for (long i = 0; i < basis.dim(); ++i) {
        double lam = static_cast<double>(std::popcount(basis.mask(i) & bm)) / ld - mean;
        out += std::norm(psi.amplitudes[i]) * lam * lam;
    }
    return out;
}

namespace {

double wick_drho2(const MatrixXc& phi_box, const LatticeConfig& cfg) {
    const double ld = box_volume(cfg);
    const double mean = static_cast<double>(cfg.N) / static_cast<double>(cfg.V);
    MatrixXc M = phi_box.adjoint() * phi_box;  // N x N, Hermitian
    const double s = M.trace().real();
    const double fro = M.squaredNorm();
    return (s * s + s - fro) / (ld * ld) - 2.0 * mean * s / ld + mean * mean;
}

}  // namespace

double density_expectation(const SlaterState& s, const Coord& c) {
    const LatticeConfig& cfg = *s.cfg;
    double sum = 0.0;
    for (long x : cfg.box_sites(c)) sum += s.orbitals.row(x).squaredNorm();
    return sum / box_volume(cfg);
}

double delta_rho_sq_expectation(const SlaterState& s, const Coord& c) {
    const LatticeConfig& cfg = *s.cfg;
    const auto sites = cfg.box_sites(c);
    MatrixXc phi_box(static_cast<long>(sites.size()), s.orbitals.cols());
    for (long r = 0; r < static_cast<long>(sites.size()); ++r) phi_box.row(r) = s.orbitals.row(sites[r]);
    return wick_drho2(phi_box, cfg);
}

double density_momentum_form(const SlaterState& s, const Coord& c) {
    const LatticeConfig& cfg = *s.cfg;
    MatrixXc A = momentum_transform(cfg).adjoint() * s.orbitals;  // momentum orbitals
    MatrixXc P = A * A.adjoint();  // <a+_a a_b> = P(b, a)
    Complex out = 0.0;
    for (long a = 0; a < cfg.V; ++a) {
        Coord ca = cfg.unflat(a);
        for (long b = 0; b < cfg.V; ++b) {
            Coord cb = cfg.unflat(b);
            Coord m(cfg.d);
            long mc = 0;
            for (int mu = 0; mu < cfg.d; ++mu) {
                m[mu] = cfg.wrap(ca[mu] - cb[mu]);
                mc += m[mu] * c[mu];
            }
            out += w_tilde(m, cfg) * unit_phase(-2.0 * kPi * static_cast<double>(mc) / static_cast<double>(cfg.L)) * P(b, a);
        }
    }
    return out.real() / static_cast<double>(cfg.V);
}

SlaterDynamics::SlaterDynamics(const SlaterState& s) : cfg_(s.cfg) {
    MatrixXc F = momentum_transform(*cfg_);
    momentum_orbitals_ = F.adjoint() * s.orbitals;
    energies_.resize(cfg_->V);
    for (long a = 0; a < cfg_->V; ++a) energies_[a] = dispersion_flat(a, *cfg_);
}

MatrixXc SlaterDynamics::phased_orbitals(double t) const {
    MatrixXc B = momentum_orbitals_;
    for (long a = 0; a < cfg_->V; ++a) B.row(a) *= unit_phase(-t * energies_[a]);
    return B;
}

const MatrixXc& SlaterDynamics::box_rows(const Coord& c) const {
    const long key = cfg_->flat(c);
    for (const auto& [k, w] : box_cache_) {
        if (k == key) return w;
    }
    const auto sites = cfg_->box_sites(c);
    MatrixXc W(static_cast<long>(sites.size()), cfg_->V);
    const double sn = 1.0 / std::sqrt(static_cast<double>(cfg_->V));
    for (long r = 0; r < static_cast<long>(sites.size()); ++r) {
        Coord x = cfg_->unflat(sites[r]);
        for (long a = 0; a < cfg_->V; ++a) {
            Coord al = cfg_->unflat(a);
            long dot = 0;
            for (int mu = 0; mu < cfg_->d; ++mu) dot += al[mu] * x[mu];
            W(r, a) = sn * unit_phase(2.0 * kPi * static_cast<double>(dot) / static_cast<double>(cfg_->L));
        }
    }
    box_cache_.emplace_back(key, std::move(W));
    return box_cache_.back().second;
}

double SlaterDynamics::rho_of(const MatrixXc& B, const Coord& c) const {
    MatrixXc phi_box = box_rows(c) * B;
    return phi_box.squaredNorm() / box_volume(*cfg_);
}

double SlaterDynamics::drho2_of(const MatrixXc& B, const Coord& c) const {
    MatrixXc phi_box = box_rows(c) * B;
    return wick_drho2(phi_box, *cfg_);
}

double SlaterDynamics::density(const Coord& c, double t) const {
    return rho_of(phased_orbitals(t), c);
}

double SlaterDynamics::delta_rho_sq(const Coord& c, double t) const {
    return drho2_of(phased_orbitals(t), c);
}

double SlaterDynamics::neq_surrogate(double t) const {
    MatrixXc B = phased_orbitals(t);
    const double thr = cfg_->epsilon * cfg_->rho_bar;
    double sum = 0.0;
    for (const auto& c : cfg_->centers) sum += drho2_of(B, c);
    return sum / (thr * thr);
}

FockState apply_delta_rho_heisenberg(const FockState& phi_momentum, double t, const Coord& c) {
    const LatticeConfig& cfg = *phi_momentum.cfg;
    const FockBasis& basis = fock_basis(cfg);
    FockState out{&cfg, VectorXc::Zero(basis.dim())};

    for (long mi = 0; mi < cfg.V; ++mi) {
        Coord m = cfg.unflat(mi);
        bool zero = true;
        long mc = 0;
        for (int mu = 0; mu < cfg.d; ++mu) {
            if (m[mu] != 0) zero = false;
            mc += m[mu] * c[mu];
        }
        if (zero) continue;
        const Complex wm = w_tilde(m, cfg) *
                           unit_phase(-2.0 * kPi * static_cast<double>(mc) / static_cast<double>(cfg.L)) /
                           static_cast<double>(cfg.V);
        if (std::abs(wm) == 0.0) continue;
        for (long beta = 0; beta < cfg.V; ++beta) {
            const long target = add_momentum(beta, m, cfg);
            const Complex coeff = wm * unit_phase(-t * (dispersion_flat(beta, cfg) - dispersion_flat(target, cfg)));
            const std::uint64_t bq = std::uint64_t{1} << beta;
            const std::uint64_t bp = std::uint64_t{1} << target;
            for (long i = 0; i < basis.dim(); ++i) {
                const std::uint64_t msk = basis.mask(i);
                if (!(msk & bq) || (msk & bp)) continue;  // a+_p a_q needs q set, p empty
                std::uint64_t removed = msk & ~bq;
                int sgn = std::popcount(msk & (bq - 1)) + std::popcount(removed & (bp - 1));
                long j = basis.index(removed | bp);
                out.amplitudes[j] += ((sgn & 1) ? -coeff : coeff) * phi_momentum.amplitudes[i];
            }
        }
    }
    return out;
}

}  // namespace feq
