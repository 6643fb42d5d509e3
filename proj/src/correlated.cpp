#include "qcc/correlated.hpp"

#include <cmath>

namespace qcc {

namespace {

constexpr double kDegeneracyGap = 1e-8;
constexpr double kSupportTol = 1e-12;

std::vector<int> side_indices(const DensityMatrix& rho, Side side) {
    std::vector<int> idx;
    const int n = int(rho.dims().size());
    if (side == Side::A)
        for (int i = 0; i < rho.split(); ++i) idx.push_back(i);
    else
        for (int i = rho.split(); i < n; ++i) idx.push_back(i);
    return idx;
}

struct EigBasis {
    LocalBasis basis;
    RealVector values;
};

EigBasis eigbasis_of(const Matrix& marg) {
    const EighResult e = eigh(marg);
    LocalBasis b{e.vectors, {}};
    int start = 0;
    for (int i = 1; i <= e.values.size(); ++i) {
        const bool boundary =
            i == e.values.size() || e.values[i - 1] - e.values[i] > kDegeneracyGap;
        if (boundary) {
            if (i - start >= 2) {
                std::vector<int> block;
                for (int j = start; j < i; ++j) block.push_back(j);
                b.degeneracy_blocks.push_back(std::move(block));
            }
            start = i;
        }
    }
    return {std::move(b), e.values};
}

struct BlockRef {
    int side;  // 0 = A, 1 = B
    std::vector<int> cols;
    int param_offset;
};

} // namespace

DensityMatrix marginal(const DensityMatrix& rho, Side side) {
    if (!rho.bipartite()) throw DimError("marginal: state has no bipartition");
    const auto drop = side_indices(rho, side == Side::A ? Side::B : Side::A);
    const Matrix m = partial_trace_mat(rho.mat(), rho.dims(), drop);
    const std::vector<int> dims =
        side == Side::A ? rho.dims_a() : rho.dims_b();
    return DensityMatrix::trusted(m, dims);
}

LocalBasis local_eigenbasis(const DensityMatrix& rho, Side side) {
    return eigbasis_of(marginal(rho, side).mat()).basis;
}

double correlated_coherence(const DensityMatrix& rho, const ProductBasisChoice& basis) {
    if (basis.locals.size() != 2) throw DimError("correlated_coherence: need two locals");
    if (basis.locals[0].dim() != rho.dim_side_a() ||
        basis.locals[1].dim() != rho.dim_side_b())
        throw DimError("correlated_coherence: basis dims do not match sides");
    const double total = l1_coherence(rho.mat(), basis.full());
    const double la = l1_coherence(marginal(rho, Side::A).mat(), basis.locals[0].vectors);
    const double lb = l1_coherence(marginal(rho, Side::B).mat(), basis.locals[1].vectors);
    return total - la - lb;
}

DensityMatrix dephase_side(const DensityMatrix& rho, Side side, const LocalBasis& basis) {
    const int da = rho.dim_side_a(), db = rho.dim_side_b();
    const int d = side == Side::A ? da : db;
    if (basis.dim() != d) throw DimError("dephase_side: basis dimension mismatch");
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (int i = 0; i < d; ++i) {
        const Matrix pi = basis.vectors.col(i) * basis.vectors.col(i).adjoint();
        const Matrix pf = side == Side::A ? kron(pi, Matrix::Identity(db, db))
                                          : kron(Matrix::Identity(da, da), pi);
        out += pf * rho.mat() * pf;
    }
    return DensityMatrix::trusted(std::move(out), rho.dims(), rho.split());
}

CCResult correlated_coherence_canonical(const DensityMatrix& rho,
                                        CanonicalBasisMode mode,
                                        const OptimizerConfig& config) {
    EigBasis ea = eigbasis_of(marginal(rho, Side::A).mat());
    EigBasis eb = eigbasis_of(marginal(rho, Side::B).mat());

    CCResult out;
    out.mode = mode;

    // Blocks worth optimizing: degenerate and on the marginal's support.
    // Rotations inside the kernel cannot change any coherence entry.
    std::vector<BlockRef> blocks;
    int n_params = 0;
    if (mode == CanonicalBasisMode::MinimizedOverDegeneracy) {
        const EigBasis* sides[2] = {&ea, &eb};
        for (int s = 0; s < 2; ++s)
            for (const auto& blk : sides[s]->basis.degeneracy_blocks) {
                if (sides[s]->values[blk.front()] <= kSupportTol) continue;
                blocks.push_back({s, blk, n_params});
                n_params += int(blk.size()) * int(blk.size());
            }
    }

    auto rotated_basis = [&](const Eigen::VectorXd& x) {
        ProductBasisChoice pb{{ea.basis, eb.basis}};
        for (const auto& blk : blocks) {
            const int m = int(blk.cols.size());
            const Matrix u = unitary_exp(hermitian_from_params(x.data() + blk.param_offset, m));
            Matrix sub(pb.locals[blk.side].vectors.rows(), m);
            for (int j = 0; j < m; ++j)
                sub.col(j) = pb.locals[blk.side].vectors.col(blk.cols[j]);
            sub = sub * u;
            for (int j = 0; j < m; ++j)
                pb.locals[blk.side].vectors.col(blk.cols[j]) = sub.col(j);
        }
        return pb;
    };

    if (blocks.empty()) {
        out.basis = ProductBasisChoice{{ea.basis, eb.basis}};
        out.value = correlated_coherence(rho, out.basis);
        out.converged = true;
        return out;
    }

    OptimizerConfig cfg = config;
    if (cfg.target < 0.0) cfg.target = 1e-12;
    const auto objective = [&](const Eigen::VectorXd& x) {
        return correlated_coherence(rho, rotated_basis(x));
    };
    const SearchOutcome res = minimize_multistart(objective, n_params, cfg,
                                                  {Eigen::VectorXd::Zero(n_params)});
    out.basis = rotated_basis(res.best_x);
    out.value = res.report.best_value;
    out.report = res.report;
    out.converged = res.report.converged;
    return out;
}

SymmetricDiscordResult symmetric_discord_zero(const DensityMatrix& rho, double tol,
                                              const OptimizerConfig& config) {
    OptimizerConfig cfg = config;
    if (cfg.target < 0.0) cfg.target = tol * 0.1;
    SymmetricDiscordResult out;
    out.cc = correlated_coherence_canonical(rho, CanonicalBasisMode::MinimizedOverDegeneracy, cfg);
    out.zero = out.cc.value <= tol;
    return out;
}

AsymmetricDiscordResult asymmetric_discord_delta(const DensityMatrix& rho, Side side,
                                                 const OptimizerConfig& config,
                                                 double tol) {
    AsymmetricDiscordResult out;
    out.cc = correlated_coherence_canonical(rho, CanonicalBasisMode::MinimizedOverDegeneracy,
                                            config);
    const LocalBasis& local = out.cc.basis.locals[side == Side::A ? 0 : 1];
    const DensityMatrix dephased = dephase_side(rho, side, local);
    out.delta = out.cc.value - correlated_coherence(dephased, out.cc.basis);
    out.zero = out.delta <= tol;
    return out;
}

} // namespace qcc
