#include "qcc/density_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qcc {

namespace {

long long product(const std::vector<int>& dims) {
    long long p = 1;
    for (int d : dims) p *= d;
    return p;
}

// Flat index digits for each subsystem, A-major.
std::vector<int> strides_of(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int i = int(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
    return s;
}

int digit_of(int flat, int stride, int dim) { return (flat / stride) % dim; }

} // namespace

std::string ValidationReport::to_string() const {
    if (issues.empty()) return "valid";
    std::ostringstream os;
    for (size_t i = 0; i < issues.size(); ++i) {
        if (i) os << "; ";
        os << issues[i].kind << " (residual " << issues[i].residual << ")";
        if (!issues[i].detail.empty()) os << ": " << issues[i].detail;
    }
    return os.str();
}

ValidationReport DensityMatrix::check(const Matrix& data,
                                      const std::vector<int>& dims, int split) {
    ValidationReport rep;
    if (data.rows() != data.cols()) {
        rep.issues.push_back({"DimMismatch", 0.0, "matrix is not square"});
        return rep;
    }
    if (dims.empty() || product(dims) != data.rows()) {
        rep.issues.push_back({"DimMismatch", 0.0, "product of dims != side length"});
        return rep;
    }
    for (int d : dims) {
        if (d < 1) {
            rep.issues.push_back({"DimMismatch", 0.0, "subsystem dimension < 1"});
            return rep;
        }
    }
    if (split != -1 && (split < 1 || split >= int(dims.size()))) {
        rep.issues.push_back({"DimMismatch", 0.0, "split out of range"});
        return rep;
    }

    const double herm = (data - data.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-9) rep.issues.push_back({"NonHermitian", herm, ""});

    const double tr = std::abs(data.trace() - Complex(1.0, 0.0));
    if (tr > 1e-9) rep.issues.push_back({"TraceNotOne", tr, ""});

    if (herm <= 1e-9) {
        Matrix h = (data + data.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        const double lam_min = es.eigenvalues().minCoeff();
        if (lam_min < -1e-9)
            rep.issues.push_back({"NotPSD", lam_min, ""});
    }
    return rep;
}

DensityMatrix DensityMatrix::make(Matrix data, std::vector<int> dims, int split) {
    ValidationReport rep = check(data, dims, split);
    if (!rep.ok()) throw ValidationError(std::move(rep));

    DensityMatrix out;
    Matrix h = (data + data.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.eigenvalues().minCoeff() < 0.0) {
        // Roundoff negatives in [-1e-9, 0): clamp and renormalize.
        RealVector lam = es.eigenvalues().cwiseMax(0.0);
        h = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
        h /= h.trace().real();
        out.clamped_ = true;
        out.data_ = std::move(h);
    } else {
        out.data_ = std::move(data);
    }
    out.dims_ = std::move(dims);
    out.split_ = split;
    return out;
}

DensityMatrix DensityMatrix::trusted(Matrix data, std::vector<int> dims, int split) {
    DensityMatrix out;
    out.data_ = std::move(data);
    out.dims_ = std::move(dims);
    out.split_ = split;
    return out;
}

int DensityMatrix::dim_side_a() const {
    if (!bipartite()) throw DimError("state has no bipartition");
    long long p = 1;
    for (int i = 0; i < split_; ++i) p *= dims_[i];
    return int(p);
}

int DensityMatrix::dim_side_b() const {
    if (!bipartite()) throw DimError("state has no bipartition");
    long long p = 1;
    for (int i = split_; i < int(dims_.size()); ++i) p *= dims_[i];
    return int(p);
}

std::vector<int> DensityMatrix::dims_a() const {
    if (!bipartite()) throw DimError("state has no bipartition");
    return {dims_.begin(), dims_.begin() + split_};
}

std::vector<int> DensityMatrix::dims_b() const {
    if (!bipartite()) throw DimError("state has no bipartition");
    return {dims_.begin() + split_, dims_.end()};
}

DensityMatrix DensityMatrix::with_split(int split) const {
    if (split != -1 && (split < 1 || split >= int(dims_.size())))
        throw DimError("split out of range");
    DensityMatrix out = *this;
    out.split_ = split;
    return out;
}

LocalBasis LocalBasis::computational(int d) {
    return {Matrix::Identity(d, d), {}};
}

double LocalBasis::orthonormality_residual() const {
    const Matrix g = vectors.adjoint() * vectors;
    return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

LocalBasis LocalBasis::from_columns(Matrix cols) {
    LocalBasis b{std::move(cols), {}};
    if (b.vectors.rows() != b.vectors.cols())
        throw DimError("basis must be square");
    if (b.orthonormality_residual() > 1e-9)
        throw ValidationError({{{"NonOrthonormal", b.orthonormality_residual(), ""}}});
    return b;
}

Matrix ProductBasisChoice::full() const {
    Matrix f = Matrix::Identity(1, 1);
    for (const auto& b : locals) f = kron(f, b.vectors);
    return f;
}

int ProductBasisChoice::dim() const {
    long long p = 1;
    for (const auto& b : locals) p *= b.dim();
    return int(p);
}

EighResult eigh(const Matrix& h_in) {
    if (h_in.rows() != h_in.cols()) throw DimError("eigh: matrix not square");
    if ((h_in - h_in.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw ValidationError({{{"NonHermitian",
                                 (h_in - h_in.adjoint()).cwiseAbs().maxCoeff(), "eigh input"}}});
    const Matrix h = (h_in + h_in.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const int n = int(h.rows());

    Matrix v = es.eigenvectors();
    RealVector lam = es.eigenvalues();

    // Phase convention: first entry with |v_k| > 1e-12 made real-positive.
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) {
            const Complex z = v(r, c);
            if (std::abs(z) > 1e-12) {
                v.col(c) *= std::conj(z) / std::abs(z);
                break;
            }
        }
    }

    auto lexkey = [&](int c) {
        std::vector<long long> key;
        key.reserve(2 * n);
        for (int r = 0; r < n; ++r) {
            key.push_back(llround(v(r, c).real() * 1e9));
            key.push_back(llround(v(r, c).imag() * 1e9));
        }
        return key;
    };

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<long long>> keys(n);
    for (int c = 0; c < n; ++c) keys[c] = lexkey(c);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const long long la = llround(lam[a] * 1e12), lb = llround(lam[b] * 1e12);
        if (la != lb) return la > lb;
        return keys[a] < keys[b];
    });

    EighResult out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int c = 0; c < n; ++c) {
        out.values[c] = lam[order[c]];
        out.vectors.col(c) = v.col(order[c]);
    }
    return out;
}

Matrix unitary_exp(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
    const int n = int(h.rows());
    Vector phase(n);
    for (int i = 0; i < n; ++i)
        phase[i] = std::exp(Complex(0.0, es.eigenvalues()[i]));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

DensityMatrix kron(const DensityMatrix& x, const DensityMatrix& y, int split) {
    std::vector<int> dims = x.dims();
    dims.insert(dims.end(), y.dims().begin(), y.dims().end());
    return DensityMatrix::trusted(kron(x.mat(), y.mat()), std::move(dims), split);
}

Matrix partial_trace_mat(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<int>& drop) {
    const int n = int(dims.size());
    std::vector<bool> dropped(n, false);
    for (int k : drop) {
        if (k < 0 || k >= n) throw DimError("partial_trace: bad subsystem index");
        if (dropped[k]) throw DimError("partial_trace: duplicate subsystem index");
        dropped[k] = true;
    }
    const auto strides = strides_of(dims);

    std::vector<int> keep_idx, drop_idx;
    for (int i = 0; i < n; ++i) (dropped[i] ? drop_idx : keep_idx).push_back(i);

    long long dk = 1, dd = 1;
    for (int i : keep_idx) dk *= dims[i];
    for (int i : drop_idx) dd *= dims[i];

    // Full-index offsets of every kept / dropped multi-index.
    std::vector<long long> off_keep(dk, 0), off_drop(dd, 0);
    {
        std::vector<int> kd, ks;  // kept dims and their full strides
        for (int i : keep_idx) { kd.push_back(dims[i]); ks.push_back(strides[i]); }
        const auto local = strides_of(kd);
        for (long long u = 0; u < dk; ++u) {
            long long off = 0;
            for (size_t j = 0; j < kd.size(); ++j)
                off += (long long)digit_of(int(u), local[j], kd[j]) * ks[j];
            off_keep[u] = off;
        }
        std::vector<int> dd_dims, dss;
        for (int i : drop_idx) { dd_dims.push_back(dims[i]); dss.push_back(strides[i]); }
        const auto locald = strides_of(dd_dims);
        for (long long t = 0; t < dd; ++t) {
            long long off = 0;
            for (size_t j = 0; j < dd_dims.size(); ++j)
                off += (long long)digit_of(int(t), locald[j], dd_dims[j]) * dss[j];
            off_drop[t] = off;
        }
    }

    Matrix out = Matrix::Zero(dk, dk);
    for (long long r = 0; r < dk; ++r)
        for (long long c = 0; c < dk; ++c) {
            Complex s = 0.0;
            for (long long t = 0; t < dd; ++t)
                s += m(off_keep[r] + off_drop[t], off_keep[c] + off_drop[t]);
            out(r, c) = s;
        }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& drop,
                            int new_split) {
    Matrix out = partial_trace_mat(rho.mat(), rho.dims(), drop);
    std::vector<bool> dropped(rho.dims().size(), false);
    for (int k : drop) dropped[k] = true;
    std::vector<int> kept;
    for (size_t i = 0; i < rho.dims().size(); ++i)
        if (!dropped[i]) kept.push_back(rho.dims()[i]);
    if (kept.empty()) throw DimError("partial_trace: cannot drop every subsystem");
    return DensityMatrix::trusted(std::move(out), std::move(kept), new_split);
}

Matrix permute_subsystems_mat(const Matrix& m, const std::vector<int>& dims,
                              const std::vector<int>& perm) {
    const int n = int(dims.size());
    if (int(perm.size()) != n) throw DimError("permute: bad permutation size");
    std::vector<bool> seen(n, false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p]) throw DimError("permute: not a permutation");
        seen[p] = true;
    }
    std::vector<int> new_dims(n);
    for (int j = 0; j < n; ++j) new_dims[j] = dims[perm[j]];
    const auto old_strides = strides_of(dims);
    const auto new_strides = strides_of(new_dims);
    const long long d = m.rows();

    std::vector<long long> map(d);
    for (long long o = 0; o < d; ++o) {
        long long v = 0;
        for (int j = 0; j < n; ++j)
            v += (long long)digit_of(int(o), old_strides[perm[j]], dims[perm[j]]) * new_strides[j];
        map[o] = v;
    }
    Matrix out(d, d);
    for (long long r = 0; r < d; ++r)
        for (long long c = 0; c < d; ++c) out(map[r], map[c]) = m(r, c);
    return out;
}

DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<int>& perm,
                                 int new_split) {
    Matrix out = permute_subsystems_mat(rho.mat(), rho.dims(), perm);
    std::vector<int> nd(perm.size());
    for (size_t j = 0; j < perm.size(); ++j) nd[j] = rho.dims()[perm[j]];
    return DensityMatrix::trusted(std::move(out), std::move(nd), new_split);
}

Matrix embed(const Matrix& op, const std::vector<int>& dims,
             const std::vector<int>& targets) {
    const int n = int(dims.size());
    long long dt = 1;
    std::vector<bool> is_target(n, false);
    for (int k : targets) {
        if (k < 0 || k >= n) throw DimError("embed: bad subsystem index");
        if (is_target[k]) throw DimError("embed: duplicate subsystem index");
        is_target[k] = true;
        dt *= dims[k];
    }
    if (op.rows() != dt || op.cols() != dt)
        throw DimError("embed: operator does not match target dims");

    const auto strides = strides_of(dims);
    std::vector<int> tdims;
    for (int k : targets) tdims.push_back(dims[k]);
    const auto tstrides = strides_of(tdims);

    const long long d = product(dims);
    std::vector<long long> tkey(d), rkey(d);
    for (long long o = 0; o < d; ++o) {
        long long t = 0;
        for (size_t j = 0; j < targets.size(); ++j)
            t += (long long)digit_of(int(o), strides[targets[j]], dims[targets[j]]) * tstrides[j];
        tkey[o] = t;
        long long r = 0;
        for (int i = 0; i < n; ++i)
            if (!is_target[i]) r = r * dims[i] + digit_of(int(o), strides[i], dims[i]);
        rkey[o] = r;
    }

    Matrix out = Matrix::Zero(d, d);
    for (long long r = 0; r < d; ++r)
        for (long long c = 0; c < d; ++c)
            if (rkey[r] == rkey[c]) out(r, c) = op(tkey[r], tkey[c]);
    return out;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<int>& on) {
    const double ures =
        (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (ures > 1e-9)
        throw ValidationError({{{"NotUnitary", ures, "apply_unitary"}}});
    const Matrix uf = embed(u, rho.dims(), on);
    return DensityMatrix::trusted(uf * rho.mat() * uf.adjoint(), rho.dims(), rho.split());
}

DensityMatrix swap_bipartite(const DensityMatrix& rho) {
    if (!rho.bipartite()) throw DimError("swap: state has no bipartition");
    const int da = rho.dim_side_a(), db = rho.dim_side_b();
    if (da != db) throw DimError("swap: side dimensions differ");
    const Matrix& m = rho.mat();
    Matrix out(m.rows(), m.cols());
    for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b)
            for (int a2 = 0; a2 < da; ++a2)
                for (int b2 = 0; b2 < db; ++b2)
                    out(b * da + a, b2 * da + a2) = m(a * db + b, a2 * db + b2);
    std::vector<int> nd = rho.dims_b();
    const auto ad = rho.dims_a();
    nd.insert(nd.end(), ad.begin(), ad.end());
    return DensityMatrix::trusted(std::move(out), std::move(nd),
                                  int(rho.dims().size()) - rho.split());
}

Purification purify(const DensityMatrix& rho, double rank_tol) {
    const EighResult e = eigh(rho.mat());
    int rank = 0;
    for (int i = 0; i < e.values.size(); ++i)
        if (e.values[i] > rank_tol) ++rank;
    if (rank == 0) throw ValidationError({{{"NotPSD", 0.0, "purify: zero state"}}});
    const int d = rho.dim();
    Vector psi = Vector::Zero((long long)d * rank);
    for (int k = 0; k < rank; ++k) {
        const double s = std::sqrt(e.values[k]);
        for (int x = 0; x < d; ++x) psi[(long long)x * rank + k] = s * e.vectors(x, k);
    }
    return {std::move(psi), rank};
}

double frobenius_distance(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimError("frobenius_distance: shape mismatch");
    return (x - y).norm();
}

Matrix hermitian_from_params(const double* x, int m) {
    Matrix h = Matrix::Zero(m, m);
    int k = 0;
    for (int i = 0; i < m; ++i) h(i, i) = x[k++];
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            h(i, j) = Complex(x[k], x[k + 1]);
            h(j, i) = std::conj(h(i, j));
            k += 2;
        }
    return h;
}

void hermitian_to_params(const Matrix& h, double* x) {
    const int m = int(h.rows());
    int k = 0;
    for (int i = 0; i < m; ++i) x[k++] = h(i, i).real();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            x[k++] = h(i, j).real();
            x[k++] = h(i, j).imag();
        }
}

Matrix hermitian_log_unitary(const Matrix& u) {
    const int n = int(u.rows());
    Matrix h = Matrix::Zero(n, n);
    // A unitary is normal, so its Schur form is diagonal with orthonormal
    // Schur vectors.
    Eigen::ComplexSchur<Matrix> schur(u);
    const Matrix& q = schur.matrixU();
    const Matrix& t = schur.matrixT();
    for (int i = 0; i < n; ++i) {
        const double angle = std::arg(t(i, i));
        h += angle * (q.col(i) * q.col(i).adjoint());
    }
    return h;
}

Matrix complete_basis(const Matrix& cols) {
    const int n = int(cols.rows()), r = int(cols.cols());
    if (r > n) throw DimError("complete_basis: too many columns");
    Matrix q(n, n);
    q.leftCols(r) = cols;
    int filled = r;
    for (int cand = 0; cand < n && filled < n; ++cand) {
        Vector v = Vector::Zero(n);
        v[cand] = 1.0;
        for (int k = 0; k < filled; ++k) v -= q.col(k).dot(v) * q.col(k);
        // second pass for numerical orthogonality
        for (int k = 0; k < filled; ++k) v -= q.col(k).dot(v) * q.col(k);
        const double nrm = v.norm();
        if (nrm > 1e-8) q.col(filled++) = v / nrm;
    }
    if (filled != n) throw Error("complete_basis: completion failed");
    return q;
}

} // namespace qcc
