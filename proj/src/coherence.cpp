#include "qcc/coherence.hpp"

#include "qcc/stategen.hpp"

#include <cmath>
#include <limits>

namespace qcc {

double l1_coherence(const Matrix& rho, const Matrix& basis) {
    if (basis.rows() != rho.rows() || basis.cols() != rho.rows())
        throw DimError("l1_coherence: basis dimension mismatch");
    const Matrix s = basis.adjoint() * rho * basis;
    double total = 0.0;
    for (int i = 0; i < s.rows(); ++i)
        for (int j = 0; j < s.cols(); ++j)
            if (i != j) total += std::abs(s(i, j));
    return total;
}

double l1_coherence(const DensityMatrix& rho, const LocalBasis& basis) {
    return l1_coherence(rho.mat(), basis.vectors);
}

double l1_coherence(const DensityMatrix& rho, const ProductBasisChoice& basis) {
    return l1_coherence(rho.mat(), basis.full());
}

DensityMatrix dephase(const DensityMatrix& rho, const Matrix& basis) {
    if (basis.rows() != rho.dim() || basis.cols() != rho.dim())
        throw DimError("dephase: basis dimension mismatch");
    const Matrix s = basis.adjoint() * rho.mat() * basis;
    const Matrix out = basis * s.diagonal().asDiagonal() * basis.adjoint();
    return DensityMatrix::trusted(out, rho.dims(), rho.split());
}

DensityMatrix dephase(const DensityMatrix& rho, const ProductBasisChoice& basis) {
    return dephase(rho, basis.full());
}

DensityMatrix dephase_subsystem(const DensityMatrix& rho, int k,
                                const LocalBasis& local_basis) {
    if (k < 0 || k >= int(rho.dims().size()))
        throw DimError("dephase_subsystem: bad subsystem index");
    if (local_basis.dim() != rho.dims()[k])
        throw DimError("dephase_subsystem: basis dimension mismatch");
    const int d = local_basis.dim();
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (int j = 0; j < d; ++j) {
        const Matrix pj =
            embed(local_basis.vectors.col(j) * local_basis.vectors.col(j).adjoint(),
                  rho.dims(), {k});
        out += pj * rho.mat() * pj;
    }
    return DensityMatrix::trusted(std::move(out), rho.dims(), rho.split());
}

MaxLossReport max_loss_certificate(const DensityMatrix& rho, int k,
                                   const ProductBasisChoice& ref_basis,
                                   int n_samples, std::uint64_t seed) {
    if (ref_basis.locals.size() != rho.dims().size())
        throw DimError("max_loss_certificate: need one local basis per subsystem");
    if (ref_basis.dim() != rho.dim())
        throw DimError("max_loss_certificate: basis dimension mismatch");
    const Matrix ref_full = ref_basis.full();

    MaxLossReport rep;
    rep.n_samples = n_samples;
    rep.ref_coherence =
        l1_coherence(dephase_subsystem(rho, k, ref_basis.locals[k]).mat(), ref_full);

    CounterRng rng(seed);
    double min_sampled = std::numeric_limits<double>::infinity();
    const int dk = rho.dims()[k];
    for (int s = 0; s < n_samples; ++s) {
        const LocalBasis sampled{haar_unitary(dk, rng), {}};
        const double v =
            l1_coherence(dephase_subsystem(rho, k, sampled).mat(), ref_full);
        min_sampled = std::min(min_sampled, v);
    }
    rep.min_sampled_coherence = min_sampled;
    rep.pass = rep.ref_coherence <= min_sampled + 1e-9;
    return rep;
}

} // namespace qcc
