#ifndef FEQ_SPECTRAL_HPP
#define FEQ_SPECTRAL_HPP

#include <vector>

#include "feq/lattice.hpp"

namespace feq {

// Sorted multiset of the pair-energy levels E_beta - E_{beta+m} over all
// beta; exactly V values (L values when d = 1).
struct LevelSet {
    Coord m;
    double tau = 0.0;
    std::vector<double> values;  // ascending, multiplicity kept
};

// Piecewise-constant E -> |Omega_m(E)|: counts[i] holds between
// breakpoints[i] and breakpoints[i+1].
struct SpectralProfile {
    std::vector<double> breakpoints;
    std::vector<long> counts;
};

struct JmValue {
    double value = 0.0;        // (tau/2) int |Omega_m(E)|^2 dE, exact
    double abs_integral = 0.0; // (tau/2) int |Omega_m(E)| dE = number of levels
    long num_levels = 0;
};

LevelSet levels(const Coord& m, const LatticeConfig& cfg);
std::vector<double> levels_1d(long m, long L);  // unsorted, beta ascending

SpectralProfile profile(const LevelSet& ls, double tau);
long profile_count_at(const SpectralProfile& p, double E);

// |{beta : |E - E~_{beta,m}| < 1/tau}| by binary search on sorted levels.
long omega_count(const Coord& m, double E, double tau, const LatticeConfig& cfg);
long omega_count_sorted(const std::vector<double>& sorted_levels, double E, double one_over_tau);

JmValue jm_exact(const Coord& m, double tau, const LatticeConfig& cfg);
JmValue jm_exact_1d(long m, double tau, long L);  // J_m of the d=1 chain of size L
JmValue jm_from_sorted_levels(const std::vector<double>& sorted_levels, double tau);

// Rescaled d=1 counting function |omega_m(x, delta)| (closed window),
// counted against the sorted sine values sin(2 pi (beta + m/2) / L).
std::vector<double> sorted_sines_1d(long m, long L);
long omega_brute_1d(const std::vector<double>& sorted_sines, double x, double delta);

double abs_c_m(long m, long L);  // |C_m| = 4 |sin(pi m / L)|

// L*delta / sqrt(1 - (min(|x|, 1-delta))^2) + 2, zero outside |x| <= 1+delta
double window_count_bound(double x, double delta, long L);

// L^2 log(|C_m| tau) / (|C_m| tau) + 4 L
double jm_log_bound(long m, double tau, long L);

// d >= 2 reduction target: (V^2 / L^2) * J_{||m||_inf} of the d=1 chain.
double jm_reduction_bound(const Coord& m, double tau, const LatticeConfig& cfg);
long inf_norm(const Coord& m);

bool asymptotic_regime(long L, double tau);  // L > 10^4 and tau > 2L

}  // namespace feq

#endif
