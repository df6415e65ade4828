#pragma once

// test-only helpers: brute-force oracles independent of the library's
// Slater-Condon implementation path

#include <random>
#include <string>

#include "ccdf/ccsolver.hpp"
#include "ccdf/dense.hpp"

namespace ccdf::testing {

inline std::string data_file(const std::string& name) {
    return std::string(CCDF_DATA_DIR) + "/" + name;
}

inline BareHamiltonian load_system(const std::string& name) {
    return to_spinorbital(parse_fcidump_file(data_file(name)));
}

/// <I| a+_p a_q |J> by direct string application.
inline double one_body_element(std::uint64_t I, std::uint64_t J, int p, int q) {
    std::uint64_t mask = J;
    int sign = apply_annihilate(mask, q);
    if (!sign) return 0.0;
    sign *= apply_create(mask, p);
    if (!sign || mask != I) return 0.0;
    return sign;
}

/// <I| a+_p a+_q a_s a_r |J> by direct string application.
inline double two_body_element(std::uint64_t I, std::uint64_t J, int p, int q, int r, int s) {
    std::uint64_t mask = J;
    int sign = apply_annihilate(mask, r);
    if (!sign) return 0.0;
    sign *= apply_annihilate(mask, s);
    if (!sign) return 0.0;
    sign *= apply_create(mask, q);
    if (!sign) return 0.0;
    sign *= apply_create(mask, p);
    if (!sign || mask != I) return 0.0;
    return sign;
}

/// <I|H|J> summed over every operator string: the oracle for the
/// Slater-Condon builder.
inline double brute_force_element(const BareHamiltonian& h, std::uint64_t I, std::uint64_t J) {
    const int n = h.basis.n_spinorb();
    double val = (I == J) ? h.e_core : 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            if (h.h(p, q) != 0.0) val += h.h(p, q) * one_body_element(I, J, p, q);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s)
                    if (h.v(p, q, r, s) != 0.0)
                        val += 0.25 * h.v(p, q, r, s) * two_body_element(I, J, p, q, r, s);
    return val;
}

/// Random Hermitian-symmetric fake Hamiltonian over n spatial orbitals.
inline BareHamiltonian random_hamiltonian(int n_spatial, int n_elec, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    IntegralSet s;
    s.n_spatial = n_spatial;
    s.n_elec = n_elec;
    s.e_core = u(rng);
    s.h_spatial = Eigen::MatrixXd::Zero(n_spatial, n_spatial);
    for (int p = 0; p < n_spatial; ++p)
        for (int q = 0; q <= p; ++q) {
            const double v = u(rng);
            s.h_spatial(p, q) = v;
            s.h_spatial(q, p) = v;
        }
    s.eri_spatial = Tensor4(n_spatial);
    for (int p = 0; p < n_spatial; ++p)
        for (int q = 0; q <= p; ++q)
            for (int r = 0; r <= p; ++r) {
                const int smax = (r == p) ? q : r;
                for (int t = 0; t <= smax; ++t) {
                    const double v = 0.3 * u(rng);
                    for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}})
                        for (auto [c, d] : {std::pair{r, t}, std::pair{t, r}}) {
                            s.eri_spatial(a, b, c, d) = v;
                            s.eri_spatial(c, d, a, b) = v;
                        }
                }
            }
    return to_spinorbital(s);
}

}  // namespace ccdf::testing
