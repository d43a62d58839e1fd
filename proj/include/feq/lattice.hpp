#ifndef FEQ_LATTICE_HPP
#define FEQ_LATTICE_HPP

#include <cstdint>
#include <vector>

namespace feq {

using Coord = std::vector<long>;  // d integer components, each in (-L/2, L/2)

// Periodic hypercubic lattice of odd linear size L in d dimensions, with
// coarse-graining boxes of odd side l and target particle density rho_bar.
// All derived quantities are fixed at construction; instances are immutable.
struct LatticeConfig {
    int d = 1;
    long L = 0;             // linear size (odd)
    long l = 0;             // box side (odd), 1 <= l <= L
    double rho_bar = 0.0;   // target density in (0, 1]
    double epsilon = 0.0;   // equilibrium threshold in (0, 1)

    long V = 0;             // L^d sites
    long N = 0;             // largest N with N/V <= rho_bar
    long n = 0;             // ceil(L/l) boxes per direction
    std::vector<Coord> centers;  // the n^d box centers, canonical coords

    long wrap(long x) const;                  // representative in (-L/2, L/2)
    long flat(const Coord& x) const;          // coord -> index in [0, V)
    Coord unflat(long idx) const;             // inverse of flat()
    bool in_box(const Coord& x, const Coord& c) const;  // ||x-c||_inf < l/2
    std::vector<long> box_sites(const Coord& c) const;  // l^d flat indices
};

// Validates inputs and fills every derived field. Throws std::invalid_argument
// on even L or l, l > L, out-of-range rho_bar/epsilon, or N = 0.
LatticeConfig derive_config(int d, long L, long l, double rho_bar, double epsilon);

// E_alpha = sum_mu 2 cos(2 pi alpha^mu / L)
double dispersion(const Coord& alpha, const LatticeConfig& cfg);
double dispersion_flat(long alpha_idx, const LatticeConfig& cfg);

// Smallest odd l such that ceil(L/l) == n; throws if no such l exists.
long box_side_for(long L, long n);

}  // namespace feq

#endif
