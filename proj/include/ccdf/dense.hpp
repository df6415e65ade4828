#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "ccdf/cluster.hpp"
#include "ccdf/determinant.hpp"

namespace ccdf {

/// Hard cap on dense dimensions; exactness duty outranks scale.
inline constexpr int kDefaultDimensionCap = 20000;

/// Square real matrix of a second-quantized operator over a determinant space.
struct DenseOperator {
    DeterminantSpace space;
    Eigen::MatrixXd matrix;

    int dim() const { return static_cast<int>(matrix.rows()); }
    bool is_hermitian(double tol = 1e-12) const;
};

/// Slater-Condon matrix of the bare Hamiltonian, core energy on the diagonal.
DenseOperator build_matrix(const BareHamiltonian& h, const DeterminantSpace& space,
                           int dimension_cap = kDefaultDimensionCap);

/// Matrix of a one-body operator sum_pq m(p,q) a+_p a_q on the space.
DenseOperator build_one_body(const Eigen::MatrixXd& m, const DeterminantSpace& space);

/// Matrix of scalar + one-body + antisymmetrized two-body tensors restricted
/// to the orbitals listed in `orbitals` (tensor indices follow that list).
DenseOperator build_from_tensors(const DeterminantSpace& space, double scalar,
                                 const Eigen::MatrixXd& one_body, const Tensor4& two_body_antisym,
                                 const std::vector<int>& orbitals);

/// Matrix of the excitation operator T = sum t * E over the space.
/// Excitations leaving the space raise unless `project` (then dropped).
DenseOperator cluster_matrix(const ClusterOperator& t, const DeterminantSpace& space,
                             bool project = false);

/// Lowest eigenpair of a symmetric operator; eigenvector sign fixed so the
/// largest-magnitude component is positive.
std::pair<double, Eigen::VectorXd> fci_ground(const DenseOperator& op);

struct NonHermitianEig {
    double energy = 0.0;
    Eigen::VectorXd right_vector;  // normalized, real
    double reference_overlap = 0.0;
};

/// Real eigenvalue of a general matrix whose right eigenvector has maximal
/// overlap with the unit vector at `reference_index`. Complex pairs
/// (|Im| > 1e-8) are excluded; throws with the spectrum when none qualify.
NonHermitianEig eig_nonhermitian(const DenseOperator& op, int reference_index = 0);
NonHermitianEig eig_nonhermitian_matrix(const Eigen::MatrixXd& m, int reference_index);

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b);

enum class TransformMode { exact, bch };

/// e^{-G} H e^{G}: dense exponentials for `exact`, truncated nested
/// commutator sum for `bch` with the given order.
DenseOperator similarity_transform(const DenseOperator& h, const DenseOperator& g,
                                   TransformMode mode, int bch_order = 0);

/// exp(M) by power series for nilpotent M (terminates when a power vanishes).
Eigen::MatrixXd expm_nilpotent(const Eigen::MatrixXd& m);

/// exp(T)|v> for nilpotent T without forming the exponential.
Eigen::VectorXd apply_exp_nilpotent(const Eigen::MatrixXd& t, const Eigen::VectorXd& v);

/// Many-body tensor content of an active-space operator: scalar fixed to the
/// reference expectation value, one-/two-body tensors in the bare-product
/// convention  scalar + sum chi1^P_Q a+_Q a_P + 1/2 sum chi2^PQ_RS a+_R a+_S a_Q a_P,
/// indices positions in the active spin-orbital list.
struct ExtractedTensors {
    double scalar = 0.0;
    Eigen::MatrixXd chi1;          // chi1(P,Q) = chi^P_Q
    Tensor4 chi2;                  // chi2(P,Q,R,S) = chi^PQ_RS
    double residual_norm = 0.0;    // Frobenius norm of (op - rebuilt) on the CAS
    bool one_body_determined = true;
    bool two_body_determined = true;
    std::vector<int> active_orbitals;  // spin orbitals the indices refer to
};

/// Extract scalar/one-/two-body content from an operator on a CAS space.
/// `active_orbitals` lists the spin orbitals allowed to differ from the
/// reference in the space (ascending).
ExtractedTensors extract_tensors(const DenseOperator& op, const std::vector<int>& active_orbitals);

/// Dense operator of the extracted tensors on the same space.
DenseOperator rebuild_from_tensors(const ExtractedTensors& t, const DeterminantSpace& space);

/// Binary dense dump (uint64 dimension + row-major doubles) plus JSON sidecar
/// with the determinant list and provenance. Paths: base + ".bin"/".json".
void save_dense(const DenseOperator& op, const std::string& base_path, const std::string& provenance);
DenseOperator load_dense(const std::string& base_path);

}  // namespace ccdf
