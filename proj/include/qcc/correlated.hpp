#pragma once

#include "qcc/coherence.hpp"
#include "qcc/optimizer.hpp"

namespace qcc {

enum class Side { A, B };

enum class CanonicalBasisMode {
    Fixed,                    // deterministic eigh eigenbases of the marginals
    MinimizedOverDegeneracy,  // additionally minimized over rotations inside
                              // each degeneracy block
};

struct CCResult {
    double value = 0.0;
    ProductBasisChoice basis;  // two locals: side A, side B
    CanonicalBasisMode mode = CanonicalBasisMode::Fixed;
    OptimizerReport report;    // populated in Minimized mode
    bool converged = true;     // false = OptimizerDidNotConverge; value still
                               // a valid upper bound within the family
};

// C_cc = C_l1(rho_AB, basis_A (x) basis_B) - C_l1(rho_A) - C_l1(rho_B).
double correlated_coherence(const DensityMatrix& rho, const ProductBasisChoice& basis);

DensityMatrix marginal(const DensityMatrix& rho, Side side);

// Deterministic eigenbasis of one marginal; degeneracy blocks are groups of
// size >= 2 whose eigenvalues agree within 1e-8.
LocalBasis local_eigenbasis(const DensityMatrix& rho, Side side);

CCResult correlated_coherence_canonical(
    const DensityMatrix& rho,
    CanonicalBasisMode mode = CanonicalBasisMode::MinimizedOverDegeneracy,
    const OptimizerConfig& config = {});

// Dephases one whole side in a basis over that side's full dimension.
DensityMatrix dephase_side(const DensityMatrix& rho, Side side, const LocalBasis& basis);

struct SymmetricDiscordResult {
    bool zero = false;
    CCResult cc;
};
SymmetricDiscordResult symmetric_discord_zero(const DensityMatrix& rho,
                                              double tol = 1e-7,
                                              const OptimizerConfig& config = {});

struct AsymmetricDiscordResult {
    double delta = 0.0;
    bool zero = false;
    CCResult cc;  // the C_cc(rho) term; delta subtracts the dephased term in
                  // the same basis pair
};
AsymmetricDiscordResult asymmetric_discord_delta(const DensityMatrix& rho, Side side,
                                                 const OptimizerConfig& config = {},
                                                 double tol = 1e-7);

} // namespace qcc
