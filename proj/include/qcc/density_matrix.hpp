#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimError : Error {
    using Error::Error;
};

struct ValidationIssue {
    std::string kind;    // NonHermitian, TraceNotOne, NotPSD, DimMismatch
    double residual = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

struct ValidationError : Error {
    ValidationReport report;
    explicit ValidationError(ValidationReport r)
        : Error(r.to_string()), report(std::move(r)) {}
};

// Composite index convention: A-major. For subsystem dims d_1..d_n the flat
// index of digits (x_1,..,x_n) is x_1*d_2*..*d_n + ... + x_n, and
// kron(X, Y) places X on the left (most significant) factor.
class DensityMatrix {
public:
    DensityMatrix() = default;

    // Invariant residuals without constructing; one issue per violation.
    static ValidationReport check(const Matrix& data,
                                  const std::vector<int>& dims, int split);

    // Validating constructor; throws ValidationError. Eigenvalues in
    // [-1e-9, 0) are clamped to zero and flagged.
    static DensityMatrix make(Matrix data, std::vector<int> dims, int split = -1);

    // For internally constructed states that are positive by construction.
    static DensityMatrix trusted(Matrix data, std::vector<int> dims, int split = -1);

    const Matrix& mat() const { return data_; }
    const std::vector<int>& dims() const { return dims_; }
    int split() const { return split_; }
    bool bipartite() const { return split_ > 0 && split_ < int(dims_.size()); }
    bool clamped() const { return clamped_; }

    int dim() const { return int(data_.rows()); }
    int dim_side_a() const;
    int dim_side_b() const;
    std::vector<int> dims_a() const;
    std::vector<int> dims_b() const;

    DensityMatrix with_split(int split) const;

private:
    Matrix data_;
    std::vector<int> dims_;
    int split_ = -1;
    bool clamped_ = false;
};

// Orthonormal basis of one subsystem (or one side); columns are the vectors.
// degeneracy_blocks groups indices whose source eigenvalues agreed within
// 1e-8; empty when the basis is not eigenbasis-derived.
struct LocalBasis {
    Matrix vectors;
    std::vector<std::vector<int>> degeneracy_blocks;

    int dim() const { return int(vectors.cols()); }
    static LocalBasis computational(int d);
    static LocalBasis from_columns(Matrix cols);  // throws on non-orthonormal
    double orthonormality_residual() const;
};

// Product reference basis: one LocalBasis per factor, dims multiplying to
// the full dimension. For a bipartite state the two factors are the sides.
struct ProductBasisChoice {
    std::vector<LocalBasis> locals;
    Matrix full() const;
    int dim() const;
};

struct EighResult {
    RealVector values;  // descending
    Matrix vectors;     // columns, phase-fixed
};

// Deterministic Hermitian eigendecomposition: eigenvalues descending, each
// eigenvector's first entry of magnitude > 1e-12 made real-positive, ties
// broken by lexicographic comparison of rounded eigenvector entries.
EighResult eigh(const Matrix& h);

// exp(i * H) for Hermitian H.
Matrix unitary_exp(const Matrix& h);

Matrix kron(const Matrix& x, const Matrix& y);
DensityMatrix kron(const DensityMatrix& x, const DensityMatrix& y, int split = -1);

Matrix partial_trace_mat(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<int>& drop);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& drop,
                            int new_split = -1);

// Reorders tensor factors: new factor j is old factor perm[j].
Matrix permute_subsystems_mat(const Matrix& m, const std::vector<int>& dims,
                              const std::vector<int>& perm);
DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<int>& perm,
                                 int new_split = -1);

// Embeds an operator acting on the listed subsystems (in that order) into
// the full space.
Matrix embed(const Matrix& op, const std::vector<int>& dims,
             const std::vector<int>& targets);

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<int>& on);

// A|B system swap; requires equal side dimensions. Involution.
DensityMatrix swap_bipartite(const DensityMatrix& rho);

struct Purification {
    Vector psi;       // on system (x) ancilla, system-major
    int ancilla_dim;  // numerical rank at threshold 1e-10
};
Purification purify(const DensityMatrix& rho, double rank_tol = 1e-10);

double frobenius_distance(const Matrix& x, const Matrix& y);

// Hermitian m x m matrix from m*m real parameters (diagonal first, then
// re/im of each upper entry), and the inverse packing.
Matrix hermitian_from_params(const double* x, int m);
void hermitian_to_params(const Matrix& h, double* x);

// Hermitian logarithm: H with unitary_exp(H) == u (angles in (-pi, pi]).
Matrix hermitian_log_unitary(const Matrix& u);

// Deterministic completion of r orthonormal columns to a full unitary.
Matrix complete_basis(const Matrix& cols);

} // namespace qcc
