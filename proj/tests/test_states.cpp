#include <bit>
#include <random>
#include <set>

#include "doctest.h"
#include "feq/errors.hpp"
#include "feq/states.hpp"

using namespace feq;

namespace {

MatrixXc random_unitary(long V, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    MatrixXc a(V, V);
    for (long i = 0; i < V; ++i)
        for (long j = 0; j < V; ++j) a(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<MatrixXc> qr(a);
    return qr.householderQ() * MatrixXc::Identity(V, V);
}

}  // namespace

TEST_CASE("occupation basis enumerates C(V,N) sorted masks") {
    FockBasis b(6, 3);
    CHECK(b.dim() == 20);
    for (long i = 0; i < b.dim(); ++i) {
        CHECK(std::popcount(b.mask(i)) == 3);
        CHECK(b.index(b.mask(i)) == i);
        if (i > 0) CHECK(b.mask(i - 1) < b.mask(i));
    }
    CHECK(b.index(0b111000u) == b.dim() - 1);
    CHECK(b.index(0b1u) == -1);
}

TEST_CASE("binomial is exact below the cap and saturates above") {
    CHECK(binomial_capped(9, 3) == 84);
    CHECK(binomial_capped(15, 7) == 6435);
    CHECK(binomial_capped(62, 1) == 62);
    CHECK(binomial_capped(31, 15) == 2 * FockBasis::kMaxDim);   // 300540195 saturates
    CHECK(binomial_capped(1000, 500) == 2 * FockBasis::kMaxDim);
}

TEST_CASE("oversized sectors raise capacity errors") {
    CHECK_THROWS_AS(FockBasis(63, 1), CapacityError);
    CHECK_THROWS_AS(FockBasis(31, 15), CapacityError);
    CHECK_NOTHROW(FockBasis(15, 7));
}

TEST_CASE("momentum transform is unitary") {
    LatticeConfig cfg = derive_config(2, 5, 5, 0.5, 0.5);
    MatrixXc F = momentum_transform(cfg);
    CHECK((F.adjoint() * F - MatrixXc::Identity(cfg.V, cfg.V)).norm() < 1e-12);
}

TEST_CASE("single-particle unitary lift matches the determinant oracle") {
    LatticeConfig cfg = derive_config(1, 5, 5, 0.45, 0.5);  // V = 5, N = 2
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SlaterState s = random_slater_state(cfg, seed);
        MatrixXc u = random_unitary(cfg.V, 100 + seed);
        FockState lifted = apply_single_particle_unitary(fock_from_slater(s), u);
        SlaterState rotated{&cfg, u * s.orbitals};
        FockState oracle = fock_from_slater(rotated);
        CHECK((lifted.amplitudes - oracle.amplitudes).norm() < 1e-10);
    }
}

TEST_CASE("momentum basis round trip is the identity") {
    LatticeConfig cfg = derive_config(1, 7, 7, 0.4, 0.5);
    FockState psi = random_fock_state(cfg, 11);
    FockState back = from_momentum_basis(to_momentum_basis(psi));
    CHECK((back.amplitudes - psi.amplitudes).norm() < 1e-10);
    CHECK(to_momentum_basis(psi).norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("evolution is unitary, composes, and fixes t = 0") {
    LatticeConfig cfg = derive_config(1, 7, 7, 0.4, 0.5);
    FockState psi = random_fock_state(cfg, 5);
    CHECK((evolve_fock(psi, 0.0).amplitudes - psi.amplitudes).norm() < 1e-10);
    FockState a = evolve_fock(psi, 1.9);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-10));
    FockState b = evolve_fock(evolve_fock(psi, 0.8), 1.1);
    CHECK((a.amplitudes - b.amplitudes).norm() < 1e-9);
}

TEST_CASE("orbital evolution and exact evolution give the same many-body state") {
    LatticeConfig cfg = derive_config(1, 7, 3, 0.4, 0.5);
    for (std::uint64_t seed : {1u, 9u}) {
        SlaterState s = random_slater_state(cfg, seed);
        for (double t : {0.7, 3.1}) {
            FockState via_orbitals = fock_from_slater(evolve_slater(s, t));
            FockState via_fock = evolve_fock(fock_from_slater(s), t);
            CHECK((via_orbitals.amplitudes - via_fock.amplitudes).norm() < 1e-9);
        }
    }
}

TEST_CASE("correlation matrix is the rank-N projector") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    SlaterState s = random_slater_state(cfg, 3);
    MatrixXc G = correlation(s).G;
    CHECK((G * G - G).norm() < 1e-10);
    CHECK(G.trace().real() == doctest::Approx(static_cast<double>(cfg.N)).epsilon(1e-10));
}

TEST_CASE("momentum-filled state is stationary") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    FockState psi = fock_from_slater(momentum_filled_state(cfg));
    FockState evolved = evolve_fock(psi, 4.2);
    // stationary up to a global phase
    Complex overlap = psi.amplitudes.dot(evolved.amplitudes);
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fully filled band never leaves equilibrium") {
    LatticeConfig cfg = derive_config(1, 7, 7, 1.0, 0.5);
    CHECK(cfg.N == cfg.V);
    FockState psi = fock_from_slater(concentrated_state(cfg));
    CHECK(p_neq_expectation(psi) == doctest::Approx(0.0));
    CHECK(p_neq_expectation(evolve_fock(psi, 2.5)) == doctest::Approx(0.0));
}

TEST_CASE("projector expectation stays within [0, 1] and detects concentration") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    FockState conc = fock_from_sites(cfg, concentrated_sites(cfg));
    double p = p_neq_expectation(conc);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(p == doctest::Approx(1.0));  // one box holds every particle
}

TEST_CASE("concentrated occupation fills the N sites nearest the origin") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    std::vector<long> sites = concentrated_sites(cfg);
    REQUIRE(sites.size() == 3);
    std::set<long> coords;
    for (long s : sites) coords.insert(cfg.unflat(s)[0]);
    CHECK(coords == std::set<long>{-1, 0, 1});
}

TEST_CASE("uniform product places one particle per box when counts match") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);  // N = 3 = n
    SlaterState s = uniform_product_state(cfg);
    MatrixXc G = correlation(s).G;
    for (const auto& c : cfg.centers) {
        double occ = 0.0;
        for (long x : cfg.box_sites(c)) occ += G(x, x).real();
        CHECK(occ == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("random states are orthonormal, normalized, and seed-deterministic") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    SlaterState s1 = random_slater_state(cfg, 7);
    SlaterState s2 = random_slater_state(cfg, 7);
    SlaterState s3 = random_slater_state(cfg, 8);
    CHECK((s1.orbitals - s2.orbitals).norm() == 0.0);
    CHECK((s1.orbitals - s3.orbitals).norm() > 1e-6);
    CHECK((s1.orbitals.adjoint() * s1.orbitals - MatrixXc::Identity(cfg.N, cfg.N)).norm() < 1e-10);

    FockState f1 = random_fock_state(cfg, 7);
    FockState f2 = random_fock_state(cfg, 7);
    CHECK((f1.amplitudes - f2.amplitudes).norm() == 0.0);
    CHECK(f1.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("slater states built from sites match the occupation vector") {
    LatticeConfig cfg = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    std::vector<long> sites = concentrated_sites(cfg);
    FockState direct = fock_from_sites(cfg, sites);
    FockState via_slater = fock_from_slater(slater_from_sites(cfg, sites));
    CHECK(std::abs(direct.amplitudes.dot(via_slater.amplitudes)) == doctest::Approx(1.0).epsilon(1e-10));
}
