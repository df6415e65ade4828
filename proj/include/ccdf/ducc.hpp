#pragma once

#include "ccdf/ses.hpp"

namespace ccdf {

/// Anti-Hermitian generator sigma = T - T^dagger realized on demand as a
/// dense matrix (G^T = -G).
struct AntiHermitianGenerator {
    ClusterOperator source;

    Eigen::MatrixXd realize(const DeterminantSpace& space) const;
};

/// sigma_ext = T_ext - T_ext^dagger.
AntiHermitianGenerator build_sigma_ext(const ClusterOperator& t_ext);

/// Single-commutator downfolding
///   H + [H, sigma] + 1/2 [[F_N, sigma], sigma]
/// projected onto (P+Q_int); F_N is the normal-ordered Fock matrix (scalar
/// part removed). Result symmetrized after asserting asymmetry <= 1e-10.
EffectiveHamiltonian ducc_c1(const BareHamiltonian& h, const FockOperator& f,
                             const AntiHermitianGenerator& sigma, const ActiveSpace& active);

/// Double-commutator downfolding
///   H + [H, sigma] + 1/2 [[H, sigma], sigma] + 1/6 [[[F_N, sigma], sigma], sigma].
EffectiveHamiltonian ducc_c2(const BareHamiltonian& h, const FockOperator& f,
                             const AntiHermitianGenerator& sigma, const ActiveSpace& active);

/// Lowest eigenpair of a Hermitian effective Hamiltonian in its CAS.
std::pair<double, Eigen::VectorXd> ducc_energy(const EffectiveHamiltonian& heff);

/// Projection of the bare Hamiltonian onto the CAS (the CAS-CI baseline).
EffectiveHamiltonian bare_cas(const BareHamiltonian& h, const ActiveSpace& active);

}  // namespace ccdf
