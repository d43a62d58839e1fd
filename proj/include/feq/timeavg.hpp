#ifndef FEQ_TIMEAVG_HPP
#define FEQ_TIMEAVG_HPP

#include <complex>
#include <functional>

#include "feq/lattice.hpp"
#include "feq/observables.hpp"
#include "feq/states.hpp"

namespace feq {

// f_tau(t) = (1/(pi tau)) (sin(t/tau) / (t/tau))^2
double kernel_f_tau(double t, double tau);

// The sinc^2-weighted average of a phase at frequency omega:
// max(0, 1 - tau |omega| / 2), the interval-overlap form of the key identity.
double tent(double omega, double tau);

// delta_a(tau, L) = (log(tau/L)/(tau/L))^a + ((log L)^{2d}/L)^a; needs tau > L.
double delta_a(double a, double tau, double L, int d);

struct QuadratureResult {
    double value = 0.0;
    double truncation_bound = 0.0;  // B_X * 2 tau / (pi t_cut)
    double step = 0.0;              // final quadrature step
};

// int f_tau(t) X(t) dt over [-t_cut, t_cut] by composite Simpson rule with
// step halving until the estimate is stable to 1e-6. sup_bound is a known
// bound on |X|, used only for the reported truncation error.
QuadratureResult time_average_quadrature(const std::function<double(double)>& X, double tau,
                                         double t_cut, double sup_bound, double dt0 = 0.0);

// Independent evaluation of [e^{-i omega t}]_tau: Simpson quadrature on
// [-t_cut, t_cut] plus the exact tail integral expressed through the sine
// integral Si. Does not use the tent closed form.
std::complex<double> phase_average_quadrature(double omega, double tau, double t_cut = 0.0);

struct SpectralAverageResult {
    double value = 0.0;
    double truncation_bound = 0.0;  // Schwarz bound on the discarded m,n tail
    long m_cut = 0;
};

// [<(Delta rho_c,H(t))^2>]_tau via the tent-kernel double momentum sum; the
// quartic expectations come from Wick's theorem (Slater) or are exact (Fock).
SpectralAverageResult time_average_spectral(const SlaterState& s, const Coord& c, double tau, long m_cut = 0);
SpectralAverageResult time_average_spectral(const FockState& psi, const Coord& c, double tau, long m_cut = 0);

// smallest m with n/(2m) < 1e-3, clamped to (L-1)/2
long default_m_cut(const LatticeConfig& cfg);

struct TimeFractionReport {
    double tau = 0.0;
    double delta = 0.0;
    double dt = 0.0;
    double fraction = 0.0;
    bool surrogate = false;  // true when X is the variance upper bound
    long samples = 0;
};

// Fraction of uniform samples of X over [-tau, tau] exceeding delta.
// X is <P_neq> on the exact engine; the Slater engine samples the
// Chebyshev variance surrogate, so its fraction upper-bounds the exact one.
TimeFractionReport noneq_fraction(const FockState& psi0, double tau, double delta, double dt);
TimeFractionReport noneq_fraction(const SlaterDynamics& dyn, double tau, double delta, double dt);

}  // namespace feq

#endif
