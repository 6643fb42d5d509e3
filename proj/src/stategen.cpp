#include "qcc/stategen.hpp"

#include <cmath>

namespace qcc {

DensityMatrix SeparableDecomposition::reconstruct() const {
    if (terms.empty()) throw DimError("empty decomposition");
    const int da = dim_a(), db = dim_b();
    Matrix m = Matrix::Zero(da * db, da * db);
    double wsum = 0.0;
    for (const auto& t : terms) {
        Vector v(da * db);
        for (int a = 0; a < da; ++a)
            for (int b = 0; b < db; ++b) v[a * db + b] = t.alpha[a] * t.beta[b];
        m += t.weight * (v * v.adjoint());
        wsum += t.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-10)
        throw ValidationError({{{"TraceNotOne", std::abs(wsum - 1.0), "decomposition weights"}}});
    return DensityMatrix::make(std::move(m), {da, db}, 1);
}

DensityMatrix bell(BellKind which) {
    Vector v = Vector::Zero(4);
    const double s = 1.0 / std::sqrt(2.0);
    switch (which) {
        case BellKind::PhiPlus:  v[0] = s; v[3] = s; break;
        case BellKind::PhiMinus: v[0] = s; v[3] = -s; break;
        case BellKind::PsiPlus:  v[1] = s; v[2] = s; break;
        case BellKind::PsiMinus: v[1] = s; v[2] = -s; break;
    }
    return DensityMatrix::trusted(v * v.adjoint(), {2, 2}, 1);
}

DensityMatrix werner(double p) {
    if (p < 0.0 || p > 1.0) throw Error("werner: p outside [0,1]");
    const Matrix m = p * bell(BellKind::PsiMinus).mat() +
                     (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
    return DensityMatrix::trusted(m, {2, 2}, 1);
}

DensityMatrix cc_state(const Eigen::MatrixXd& p, const ProductBasisChoice& basis) {
    if (basis.locals.size() != 2) throw DimError("cc_state: need two local bases");
    const int da = basis.locals[0].dim(), db = basis.locals[1].dim();
    if (p.rows() != da || p.cols() != db) throw DimError("cc_state: weight shape");
    if (p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-10)
        throw Error("cc_state: weights must be nonnegative and sum to 1");
    Matrix m = Matrix::Zero(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) {
            Vector v(da * db);
            for (int a = 0; a < da; ++a)
                for (int b = 0; b < db; ++b)
                    v[a * db + b] = basis.locals[0].vectors(a, i) * basis.locals[1].vectors(b, j);
            m += p(i, j) * (v * v.adjoint());
        }
    return DensityMatrix::trusted(std::move(m), {da, db}, 1);
}

DensityMatrix cq_state(const std::vector<double>& weights,
                       const std::vector<DensityMatrix>& bob_states) {
    if (weights.empty() || weights.size() != bob_states.size())
        throw DimError("cq_state: weights/states mismatch");
    const int da = int(weights.size());
    const int db = bob_states[0].dim();
    Matrix m = Matrix::Zero(da * db, da * db);
    for (int i = 0; i < da; ++i) {
        if (bob_states[i].dim() != db) throw DimError("cq_state: Bob dims differ");
        m.block(i * db, i * db, db, db) = weights[i] * bob_states[i].mat();
    }
    return DensityMatrix::make(std::move(m), {da, db}, 1);
}

Matrix random_gaussian_matrix(int rows, int cols, CounterRng& rng) {
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
    return g;
}

Vector random_unit_vector(int d, CounterRng& rng) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.complex_normal();
    return v / v.norm();
}

namespace {

// Modified Gram-Schmidt with the eigh phase convention per column.
Matrix orthonormalize(Matrix g) {
    const int n = int(g.rows()), r = int(g.cols());
    for (int c = 0; c < r; ++c) {
        for (int k = 0; k < c; ++k)
            g.col(c) -= g.col(k).dot(g.col(c)) * g.col(k);
        const double nrm = g.col(c).norm();
        if (nrm < 1e-12) throw Error("orthonormalize: rank deficient sample");
        g.col(c) /= nrm;
        for (int i = 0; i < n; ++i) {
            const Complex z = g(i, c);
            if (std::abs(z) > 1e-12) {
                g.col(c) *= std::conj(z) / std::abs(z);
                break;
            }
        }
    }
    return g;
}

} // namespace

Matrix haar_unitary(int d, CounterRng& rng) {
    return orthonormalize(random_gaussian_matrix(d, d, rng));
}

Matrix haar_unitary(int d, std::uint64_t seed) {
    CounterRng rng(seed);
    return haar_unitary(d, rng);
}

Matrix haar_isometry(int n, int r, CounterRng& rng) {
    if (r > n) throw DimError("haar_isometry: r > n");
    return orthonormalize(random_gaussian_matrix(n, r, rng));
}

DensityMatrix random_pure(const std::vector<int>& dims, int split, std::uint64_t seed) {
    long long d = 1;
    for (int x : dims) d *= x;
    CounterRng rng(seed);
    const Vector v = random_unit_vector(int(d), rng);
    return DensityMatrix::trusted(v * v.adjoint(), dims, split);
}

DensityMatrix random_mixed(const std::vector<int>& dims, int rank, int split,
                           std::uint64_t seed) {
    long long d = 1;
    for (int x : dims) d *= x;
    if (rank < 1 || rank > d) throw DimError("random_mixed: bad rank");
    CounterRng rng(seed);
    const Matrix g = random_gaussian_matrix(int(d), rank, rng);
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix::trusted(std::move(m), dims, split);
}

SeparableSample random_separable(int n_terms, int dim_a, int dim_b, std::uint64_t seed) {
    if (n_terms < 1) throw DimError("random_separable: need at least one term");
    CounterRng rng(seed);
    SeparableDecomposition dec;
    std::vector<double> w(n_terms);
    double sum = 0.0;
    for (int i = 0; i < n_terms; ++i) {
        w[i] = rng.uniform() + 0.05;  // bounded away from zero weight
        sum += w[i];
    }
    for (int i = 0; i < n_terms; ++i) {
        dec.terms.push_back({w[i] / sum, random_unit_vector(dim_a, rng),
                             random_unit_vector(dim_b, rng)});
    }
    return {dec.reconstruct(), std::move(dec)};
}

} // namespace qcc
