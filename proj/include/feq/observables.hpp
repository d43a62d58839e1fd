#ifndef FEQ_OBSERVABLES_HPP
#define FEQ_OBSERVABLES_HPP

#include <vector>

#include "feq/lattice.hpp"
#include "feq/states.hpp"

namespace feq {

// Fourier window of the box indicator: w1(0) = 1,
// w1(k) = sin(pi k l / L) / (l sin(pi k / L)) otherwise.
double w1(long k, const LatticeConfig& cfg);
double w_tilde(const Coord& m, const LatticeConfig& cfg);

// prefix[m] = sum_{k=-m..m} |w1(k)| for m in [0, (L-1)/2]
std::vector<double> window_abs_prefix(const LatticeConfig& cfg);

// beta + m with per-component mod-L wrap, on flat momentum indices.
long add_momentum(long beta_idx, const Coord& m, const LatticeConfig& cfg);

// E_beta - E_{beta+m}
double e_tilde(long beta_idx, const Coord& m, const LatticeConfig& cfg);

// <rho_c> and <(Delta rho_c)^2> on the exact engine (diagonal in the
// site-occupation basis) and on the Slater engine (Wick's theorem).
double density_expectation(const FockState& psi, const Coord& c);
double density_expectation(const SlaterState& s, const Coord& c);
double delta_rho_sq_expectation(const FockState& psi, const Coord& c);
double delta_rho_sq_expectation(const SlaterState& s, const Coord& c);

// Momentum-representation evaluation of <rho_c> on a Slater state,
// (1/V) sum_{a,b} w(a-b) e^{-2 pi i (a-b).c / L} <a+_a a_b>; used to check
// the Fourier bookkeeping against the site-basis sum.
double density_momentum_form(const SlaterState& s, const Coord& c);

// Evaluates rho_c and (Delta rho_c)^2 at arbitrary times from one Slater
// state without re-evolving orbitals: momentum orbitals are cached and only
// box-restricted site amplitudes are rebuilt per query.
class SlaterDynamics {
  public:
    explicit SlaterDynamics(const SlaterState& s);

    double density(const Coord& c, double t) const;
    double delta_rho_sq(const Coord& c, double t) const;
    // sum over all box centers of <(Delta rho_c)^2>(t) / (eps rho_bar)^2
    double neq_surrogate(double t) const;

    const LatticeConfig& cfg() const { return *cfg_; }

    MatrixXc phased_orbitals(double t) const;  // V x N momentum orbitals at time t

  private:
    const MatrixXc& box_rows(const Coord& c) const;
    double rho_of(const MatrixXc& B, const Coord& c) const;
    double drho2_of(const MatrixXc& B, const Coord& c) const;

    const LatticeConfig* cfg_;
    MatrixXc momentum_orbitals_;          // V x N
    std::vector<double> energies_;        // E_alpha
    mutable std::vector<std::pair<long, MatrixXc>> box_cache_;  // flat(center) -> F rows
};

// Applies the Heisenberg-picture deviation operator to momentum-basis
// amplitudes: (1/V) sum_{m!=0} w(m) e^{-2 pi i m.c/L} F_t(m) |phi>.
FockState apply_delta_rho_heisenberg(const FockState& phi_momentum, double t, const Coord& c);

}  // namespace feq

#endif
