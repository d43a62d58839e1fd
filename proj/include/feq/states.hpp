#ifndef FEQ_STATES_HPP
#define FEQ_STATES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "feq/lattice.hpp"

namespace feq {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

// Exact N-particle amplitudes over the C(V,N) occupation bitmasks with
// exactly N bits set, ordered ascending as integers (lexicographic on the
// bitmask). The mode labels behind the bits are flat lattice indices; the
// same basis doubles as the momentum-occupation basis after a mode
// transform.
struct FockState {
    const LatticeConfig* cfg = nullptr;
    VectorXc amplitudes;

    double norm() const { return amplitudes.norm(); }
};

// V x N matrix of orthonormal single-particle orbitals in the site basis.
struct SlaterState {
    const LatticeConfig* cfg = nullptr;
    MatrixXc orbitals;
};

struct CorrelationMatrix {
    MatrixXc G;  // G = orbitals * orbitals^dagger, G_xy = <c+_y c_x>
};

// Shared occupation basis for a (V, N) sector. Capacity-capped: dimensions
// above kMaxDim (or V > 62) are rejected.
class FockBasis {
  public:
    static constexpr long kMaxDim = 2'000'000;

    FockBasis(long V, long N);

    long dim() const { return static_cast<long>(masks_.size()); }
    std::uint64_t mask(long i) const { return masks_[i]; }
    long index(std::uint64_t mask) const;  // -1 if absent
    long V() const { return V_; }
    long N() const { return N_; }

  private:
    long V_, N_;
    std::vector<std::uint64_t> masks_;
};

const FockBasis& fock_basis(const LatticeConfig& cfg);  // cached per (V,N)
long binomial_capped(long V, long N);  // C(V,N), saturating at 2*kMaxDim

// Single-particle momentum transform, F(x, alpha) = exp(2 pi i a.x/L)/sqrt(V).
MatrixXc momentum_transform(const LatticeConfig& cfg);

// Lifts a V x V single-particle unitary to the N-particle sector via a
// decomposition into adjacent-mode Givens rotations; exact up to rounding.
FockState apply_single_particle_unitary(const FockState& psi, const MatrixXc& u);

// Basis changes between site-occupation and momentum-occupation amplitudes.
FockState to_momentum_basis(const FockState& psi);
FockState from_momentum_basis(const FockState& phi);

// |Psi(t)> = exp(-iHt)|Psi(0)>: transform to the momentum occupation basis,
// phase each basis state by exp(-it sum of E_alpha over occupied alpha),
// transform back.
FockState evolve_fock(const FockState& psi, double t);

SlaterState evolve_slater(const SlaterState& s, double t);
CorrelationMatrix correlation(const SlaterState& s);

// Exact <Psi|P_neq|Psi>: sum of |amplitude|^2 over occupation patterns with
// some box density deviating from N/V by more than epsilon*rho_bar.
double p_neq_expectation(const FockState& psi);

// Initial states.
SlaterState concentrated_state(const LatticeConfig& cfg);
SlaterState uniform_product_state(const LatticeConfig& cfg);
SlaterState momentum_filled_state(const LatticeConfig& cfg);
SlaterState random_slater_state(const LatticeConfig& cfg, std::uint64_t seed);
FockState random_fock_state(const LatticeConfig& cfg, std::uint64_t seed);

// Occupied flat site indices of concentrated_state (N sites nearest the
// origin, ties broken lexicographically on canonical coordinates).
std::vector<long> concentrated_sites(const LatticeConfig& cfg);

FockState fock_from_sites(const LatticeConfig& cfg, const std::vector<long>& sites);
FockState fock_from_momentum_modes(const LatticeConfig& cfg, const std::vector<long>& modes);
FockState fock_from_slater(const SlaterState& s);
SlaterState slater_from_sites(const LatticeConfig& cfg, const std::vector<long>& sites);

}  // namespace feq

#endif
