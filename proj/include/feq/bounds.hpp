#ifndef FEQ_BOUNDS_HPP
#define FEQ_BOUNDS_HPP

#include <map>
#include <string>
#include <vector>

#include "feq/lattice.hpp"
#include "feq/observables.hpp"
#include "feq/states.hpp"
#include "feq/timeavg.hpp"

namespace feq {

// One verified inequality: lhs <= rhs must hold whenever hypothesis_ok and
// the bound is a proved one.
struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool hypothesis_ok = true;
    std::map<std::string, double> params;

    double margin() const { return rhs - lhs; }
    bool holds() const { return lhs <= rhs; }
};

struct ChainEvaluation {
    double S = 0.0;          // (1/V) sum_{m != 0} |w(m)| sqrt(J_m)
    double S_squared = 0.0;
    double delta_half = 0.0;  // delta_{1/2}(tau, L); 0 when tau <= L
    double delta_one = 0.0;
    double ratio = 0.0;       // S / (n^d delta_half)
    bool tau_in_range = false;  // tau > L, so the delta fields are meaningful
    long m_cut = 0;
    bool reduced_route = false;
};

// sum_c <(Delta rho_c)^2> / (eps rho_bar)^2, the computable upper bound on
// <P_neq> (exact-engine variant; the Slater one lives on SlaterDynamics).
double neq_surrogate(const FockState& psi);

// Evaluates the operator-norm chain constant S. For d >= 2 the exact J_m is
// used by default; reduced_route replaces it with the (V^2/L^2) J_{||m||_inf}
// upper bound, which can only increase S.
ChainEvaluation chain_evaluate(const LatticeConfig& cfg, double tau, long m_cut = 0,
                               bool reduced_route = false);

// lhs = [<(Delta rho_c,H)^2>]_tau (+ truncation bound), rhs = S^2.
BoundReport variance_average_check(const SlaterState& s, const Coord& c, double tau, long m_cut = 0);
BoundReport variance_average_check(const FockState& psi, const Coord& c, double tau, long m_cut = 0);

// Measured nonequilibrium fraction against the computed 3B/delta bound,
// B = sum_c [<(Delta rho_c)^2>]_tau / (eps rho_bar)^2, delta = delta_1/2.
BoundReport fraction_bound_report(const SlaterState& s, double tau, double dt, long m_cut = 0);
BoundReport fraction_bound_report(const FockState& psi, double tau, double dt, long m_cut = 0);

// Window-sum, |C_m| and sqrt-decomposition estimates; each report carries
// the worst-margin m over the full range 1 <= m < L/2.
std::vector<BoundReport> window_estimate_reports(const LatticeConfig& cfg, double tau);

// First time at which the far-box density deviation |<Delta rho_c>| drops
// to rho_bar/2, starting from the concentrated state; c = (floor(L/3),...).
struct FrontReport {
    long L = 0;
    double t_star = 0.0;
    double c_fitted = 0.0;  // t_star / L
    Coord center;
};
FrontReport front_persistence(const LatticeConfig& cfg, double coarse_dt = 0.0);

}  // namespace feq

#endif
