#pragma once

#include "qcc/density_matrix.hpp"
#include "qcc/rng.hpp"

namespace qcc {

// A weighted mixture of pure product states; the generic separable witness.
struct SeparableDecomposition {
    struct Term {
        double weight;
        Vector alpha;  // unit vector on side A
        Vector beta;   // unit vector on side B
    };
    std::vector<Term> terms;

    DensityMatrix reconstruct() const;  // dims {dA, dB}, split 1
    int dim_a() const { return terms.empty() ? 0 : int(terms[0].alpha.size()); }
    int dim_b() const { return terms.empty() ? 0 : int(terms[0].beta.size()); }
};

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

DensityMatrix bell(BellKind which);

// p |Psi-><Psi-| + (1-p) I/4; entangled iff p > 1/3.
DensityMatrix werner(double p);

// Sum_ij p_ij |i><i| (x) |j><j| in the given product basis (two locals).
DensityMatrix cc_state(const Eigen::MatrixXd& p, const ProductBasisChoice& basis);

// Sum_i w_i |i><i| (x) rho_B^i in the computational registry basis.
DensityMatrix cq_state(const std::vector<double>& weights,
                       const std::vector<DensityMatrix>& bob_states);

Vector random_unit_vector(int d, CounterRng& rng);
Matrix random_gaussian_matrix(int rows, int cols, CounterRng& rng);

// Haar unitary: Gram-Schmidt orthonormalization of a complex standard
// Gaussian matrix, each column's first nonzero entry made real-positive.
Matrix haar_unitary(int d, CounterRng& rng);
Matrix haar_unitary(int d, std::uint64_t seed);

// Isometry with r Haar-ish orthonormal columns in C^n.
Matrix haar_isometry(int n, int r, CounterRng& rng);

DensityMatrix random_pure(const std::vector<int>& dims, int split, std::uint64_t seed);
DensityMatrix random_mixed(const std::vector<int>& dims, int rank, int split,
                           std::uint64_t seed);

struct SeparableSample {
    DensityMatrix state;
    SeparableDecomposition decomposition;
};
SeparableSample random_separable(int n_terms, int dim_a, int dim_b, std::uint64_t seed);

} // namespace qcc
