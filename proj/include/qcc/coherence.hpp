#pragma once

#include "qcc/density_matrix.hpp"

#include <cstdint>

namespace qcc {

// l1-norm coherence: sum of |off-diagonal| entries after conjugating rho
// into the given basis.
double l1_coherence(const Matrix& rho, const Matrix& basis);
double l1_coherence(const DensityMatrix& rho, const LocalBasis& basis);
double l1_coherence(const DensityMatrix& rho, const ProductBasisChoice& basis);

// Full projective dephasing: keeps only the diagonal in `basis`.
DensityMatrix dephase(const DensityMatrix& rho, const Matrix& basis);
DensityMatrix dephase(const DensityMatrix& rho, const ProductBasisChoice& basis);

// Dephases a single subsystem in a local basis, Sum_j P_j rho P_j.
DensityMatrix dephase_subsystem(const DensityMatrix& rho, int k,
                                const LocalBasis& local_basis);

struct MaxLossReport {
    double ref_coherence = 0.0;     // C_l1 after dephasing in the reference local basis
    double min_sampled_coherence = 0.0;
    int n_samples = 0;
    bool pass = false;              // ref <= every sampled value + 1e-9
};

// Falsification harness for the maximal-coherence-loss claim: dephasing
// subsystem k in the reference local basis should never be beaten by a
// Haar-sampled projective basis.
MaxLossReport max_loss_certificate(const DensityMatrix& rho, int k,
                                   const ProductBasisChoice& ref_basis,
                                   int n_samples, std::uint64_t seed);

} // namespace qcc
