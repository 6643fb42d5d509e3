#pragma once

#include "qcc/correlated.hpp"
#include "qcc/stategen.hpp"

#include <optional>
#include <utility>

namespace qcc {

struct NotClassicalOnRegistry : Error {
    double mass;
    explicit NotClassicalOnRegistry(double m)
        : Error("state is not classical on the registry subsystem"), mass(m) {}
};

struct NoSymmetricCandidateFound : Error {
    double best_residual;
    explicit NoSymmetricCandidateFound(double r)
        : Error("no restart met the symmetry residual gate"), best_residual(r) {}
};

// Extension states always carry dims {D_A, d_A', D_B, d_B'} with split 2,
// the sides flattened; its AB marginal is obtained by tracing factors 1, 3.
struct ExtensionResult {
    DensityMatrix state;
    std::pair<int, int> ancilla_dims{1, 1};
    double cc_value = 0.0;
    ProductBasisChoice basis;   // the eigenbasis pair achieving cc_value
    Matrix sym_u, sym_v;        // swap-symmetry witnesses (padded side dims)
    double symmetry_residual = 0.0;
    double marginal_residual = 0.0;
    OptimizerReport report;
    bool converged = true;
};

// AB marginal of an extension state (traces the two primed factors).
DensityMatrix extension_marginal(const ExtensionResult& ext);
DensityMatrix extension_marginal(const DensityMatrix& ext_state);

// Swap residual at fixed local unitaries; sides with unequal dimensions are
// padded with |0> ancillas up to the lcm before comparing.
double swap_symmetry_residual(const DensityMatrix& ext_state, const Matrix& u,
                              const Matrix& v);
int padded_side_dim(const DensityMatrix& ext_state);

struct SymmetryResidualResult {
    double value = 0.0;
    Matrix u, v;
    // True when unequal marginal spectra already certify a positive lower
    // bound and no optimization ran.
    bool spectral_certificate = false;
};
SymmetryResidualResult unitary_symmetry_residual(
    const DensityMatrix& ext_state, const OptimizerConfig& config = {},
    const std::vector<std::pair<Matrix, Matrix>>& guesses = {});

// Proof construction for separable states: ancilla flags copy the mixture
// index; cc vanishes in the constructed eigenbases and the swap witnesses
// come out in closed form.
ExtensionResult separable_extension(const SeparableDecomposition& decomp);

// Upper bound on min C_cc over all extensions with the given ancilla dims
// (no symmetry requirement). Extensions are parameterized as
// Tr_G[(1 (x) W)|psi><psi|(1 (x) W)^dag] for the canonical purification psi
// and an isometry W into A'B'G, W = Q0 exp(G(x)) E_r per restart base.
ExtensionResult min_cc_extension(const DensityMatrix& rho,
                                 std::pair<int, int> ancilla_dims,
                                 const OptimizerConfig& config = {},
                                 const SeparableDecomposition* witness = nullptr,
                                 const std::vector<DensityMatrix>& seed_extensions = {},
                                 int purifier_dim = 0);

// Same search with the swap-symmetry penalty mu * residual^2 and a hard
// acceptance gate residual <= 1e-4; reports an upper bound on the
// entanglement of coherence. Throws NoSymmetricCandidateFound if no
// candidate passes the gate.
ExtensionResult eoc_upper_bound(const DensityMatrix& rho,
                                std::pair<int, int> ancilla_dims = {0, 0},
                                const OptimizerConfig& config = {},
                                const SeparableDecomposition* witness = nullptr,
                                const std::vector<DensityMatrix>& seed_extensions = {},
                                int purifier_dim = 0);

// Flagged convex mixture of two extensions; cc adds exactly with weights
// lambda and (1 - lambda), and the swap witnesses compose blockwise.
ExtensionResult mixture_extension(const ExtensionResult& ext_rho,
                                  const ExtensionResult& ext_sigma, double lambda);

// Dilates the projective measurement of subsystem k: appends a |0> ancilla
// and applies the generalized CNOT copying k (in `basis`) onto it.
DensityMatrix projection_dilation(const DensityMatrix& rho, int k,
                                  const LocalBasis& basis);

// Copies a classical registry subsystem onto a fresh ancilla appended on
// Bob's side. Input must be block-diagonal on the registry within 1e-9.
DensityMatrix classical_copy(const DensityMatrix& rho, int registry,
                             const LocalBasis& registry_basis);

struct LoccRoundReport {
    double before = 0.0;
    double after = 0.0;
    bool monotone_ok = false;
    double slack = 0.0;
    DensityMatrix output;
    ExtensionResult before_ext, after_ext;
};

// One Alice -> Bob communication round: ancilla registry, Alice unitary,
// projective readout of the registry, classical copy to Bob, Bob's
// conditional unitary, ancilla removal. Evaluates eoc_upper_bound before
// and after with a shared config.
LoccRoundReport locc_round_probe(const DensityMatrix& rho, const Matrix& alice_unitary,
                                 const LocalBasis& registry_basis,
                                 const std::vector<Matrix>& bob_conditionals,
                                 const OptimizerConfig& config,
                                 const SeparableDecomposition* decomp = nullptr,
                                 double slack = 5e-2,
                                 std::pair<int, int> ancilla_dims = {0, 0});

// Pushes a separable decomposition through the same round (used to seed the
// post-round optimization with an exact witness).
SeparableDecomposition transform_decomposition(const SeparableDecomposition& decomp,
                                               const Matrix& alice_unitary,
                                               const LocalBasis& registry_basis,
                                               const std::vector<Matrix>& bob_conditionals);

} // namespace qcc
