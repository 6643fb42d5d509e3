#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcc/extensions.hpp"

using namespace qcc;

namespace {

OptimizerConfig quick(std::uint64_t seed, int restarts = 8) {
    OptimizerConfig cfg;
    cfg.restarts = restarts;
    cfg.seed = seed;
    cfg.max_iters = 150;
    return cfg;
}

} // namespace

TEST_CASE("separable witness extension certifies the state") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull}) {
        const SeparableSample s = random_separable(3, 2, 2, seed);
        const ExtensionResult ext = separable_extension(s.decomposition);
        CHECK(ext.cc_value <= 1e-9);
        CHECK(ext.cc_value >= -1e-10);
        CHECK(ext.symmetry_residual <= 1e-6);
        CHECK(ext.marginal_residual <= 1e-10);
        CHECK(ext.ancilla_dims == std::pair<int, int>{3, 3});
        CHECK(frobenius_distance(extension_marginal(ext).mat(), s.state.mat()) < 1e-10);
    }
}

TEST_CASE("swap residual is exact on hand-built cases") {
    // Trivial extension of a swap-symmetric state: identity witnesses work.
    const DensityMatrix phi = bell(BellKind::PhiPlus);
    const DensityMatrix triv = permute_subsystems(
        kron(phi, DensityMatrix::trusted(Matrix::Identity(1, 1), {1, 1}, 1), 3),
        {0, 2, 1, 3}, 2);
    const Matrix id2 = Matrix::Identity(2, 2);
    CHECK(swap_symmetry_residual(triv, id2, id2) < 1e-12);

    // Asymmetric product state: residual equals the swap distance.
    Matrix pa = Matrix::Zero(2, 2), pb = Matrix::Identity(2, 2) * 0.5;
    pa(0, 0) = 1.0;
    const DensityMatrix prod = DensityMatrix::trusted(
        kron(kron(pa, Matrix::Identity(1, 1)), kron(pb, Matrix::Identity(1, 1))),
        {2, 1, 2, 1}, 2);
    CHECK(swap_symmetry_residual(prod, id2, id2) ==
          doctest::Approx(frobenius_distance(kron(pa, pb), kron(pb, pa))));
    CHECK(padded_side_dim(prod.with_split(2)) == 2);
}

TEST_CASE("unequal marginal spectra yield a spectral certificate") {
    Matrix pa = Matrix::Zero(2, 2), pb = Matrix::Identity(2, 2) * 0.5;
    pa(0, 0) = 0.8; pa(1, 1) = 0.2;
    const DensityMatrix prod =
        DensityMatrix::trusted(kron(pa, pb), {2, 1, 2, 1}, 2);
    const SymmetryResidualResult sr = unitary_symmetry_residual(prod);
    CHECK(sr.spectral_certificate);
    CHECK(sr.value == doctest::Approx(0.3));
}

TEST_CASE("optimized symmetry residual finds exact local symmetries") {
    // |a><a| (x) |b><b| with equal spectra: some U,V swap them exactly.
    const Matrix u = haar_unitary(2, 404);
    Matrix pa = u.col(0) * u.col(0).adjoint();
    Matrix pb = u.col(1) * u.col(1).adjoint();
    const DensityMatrix prod =
        DensityMatrix::trusted(kron(pa, pb), {2, 1, 2, 1}, 2);
    const SymmetryResidualResult sr = unitary_symmetry_residual(prod, quick(5, 6));
    CHECK(!sr.spectral_certificate);
    CHECK(sr.value < 1e-6);
    CHECK(swap_symmetry_residual(prod, sr.u, sr.v) == doctest::Approx(sr.value));
}

TEST_CASE("eoc upper bound: pure product state with no ancillas") {
    const Matrix u = haar_unitary(2, 31), v = haar_unitary(2, 32);
    const DensityMatrix prod = DensityMatrix::trusted(
        kron(Matrix(u.col(0) * u.col(0).adjoint()), Matrix(v.col(0) * v.col(0).adjoint())),
        {2, 2}, 1);
    const ExtensionResult ext = eoc_upper_bound(prod, {1, 1}, quick(1, 6));
    CHECK(ext.cc_value < 1e-9);
    CHECK(ext.symmetry_residual <= 1e-4);
    CHECK(ext.marginal_residual < 1e-10);
}

TEST_CASE("eoc gate failure when no symmetric extension can exist") {
    // Ancillas of size one pin the extension to the state itself; its sides
    // have different spectra, so the spectral certificate blocks the gate.
    Matrix pa = Matrix::Zero(2, 2), pb = Matrix::Identity(2, 2) * 0.5;
    pa(0, 0) = 0.9; pa(1, 1) = 0.1;
    const DensityMatrix prod = DensityMatrix::trusted(kron(pa, pb), {2, 2}, 1);
    CHECK_THROWS_AS(eoc_upper_bound(prod, {1, 1}, quick(2, 4), nullptr, {}, 2),
                    NoSymmetricCandidateFound);
}

TEST_CASE("witness-seeded eoc certifies separable states") {
    for (std::uint64_t seed : {21ull, 22ull}) {
        const SeparableSample s = random_separable(3, 2, 2, seed);
        OptimizerConfig cfg = quick(seed, 8);
        cfg.target = 1e-6;
        const ExtensionResult ext =
            eoc_upper_bound(s.state, {3, 3}, cfg, &s.decomposition);
        CHECK(ext.cc_value <= 1e-3);
        CHECK(ext.symmetry_residual <= 1e-4);
        CHECK(ext.marginal_residual <= 1e-8);
    }
}

TEST_CASE("bell eoc stays pinned at one") {
    OptimizerConfig cfg = quick(3, 8);
    const ExtensionResult ext = eoc_upper_bound(bell(BellKind::PhiPlus), {2, 2}, cfg);
    CHECK(ext.cc_value <= 1.0 + 1e-6);
    CHECK(ext.cc_value >= 0.1);
    CHECK(ext.symmetry_residual <= 1e-4);
}

TEST_CASE("minimum-cc search keeps the marginal and stays below the trivial bound") {
    const DensityMatrix rho = random_mixed({2, 2}, 2, 1, 71);
    const double trivial =
        correlated_coherence_canonical(rho).value;
    const ExtensionResult ext = min_cc_extension(rho, {2, 2}, quick(7, 6));
    CHECK(ext.cc_value <= trivial + 1e-9);
    CHECK(ext.marginal_residual < 1e-8);
    CHECK(ext.state.dims() == std::vector<int>{2, 2, 2, 2});
}

TEST_CASE("transported witnesses reproduce cc under local unitaries") {
    const SeparableSample s = random_separable(3, 2, 2, 99);
    const ExtensionResult ext = separable_extension(s.decomposition);
    const Matrix ua = haar_unitary(2, 801), ub = haar_unitary(2, 802);

    const Matrix ra = kron(ua, Matrix::Identity(3, 3));
    const Matrix rb = kron(ub, Matrix::Identity(3, 3));
    const DensityMatrix moved = apply_unitary(ext.state, kron(ra, rb), {0, 1, 2, 3});
    ProductBasisChoice basis = ext.basis;
    basis.locals[0].vectors = ra * basis.locals[0].vectors;
    basis.locals[1].vectors = rb * basis.locals[1].vectors;
    CHECK(std::abs(correlated_coherence(moved, basis) - ext.cc_value) < 1e-9);
    // Transported swap witnesses keep the residual.
    const Matrix ut = ra * ext.sym_u * rb.adjoint();
    const Matrix vt = rb * ext.sym_v * ra.adjoint();
    CHECK(swap_symmetry_residual(moved, ut, vt) < 1e-9);
}

TEST_CASE("flagged mixtures add cc exactly") {
    const SeparableSample s1 = random_separable(2, 2, 2, 51);
    const SeparableSample s2 = random_separable(2, 2, 2, 52);
    const ExtensionResult e1 = separable_extension(s1.decomposition);
    const ExtensionResult e2 = separable_extension(s2.decomposition);
    for (double lambda : {0.25, 0.5, 0.75}) {
        const ExtensionResult mix = mixture_extension(e1, e2, lambda);
        const double expected =
            lambda * e1.cc_value + (1.0 - lambda) * e2.cc_value;
        CHECK(std::abs(mix.cc_value - expected) <= 1e-9);
        CHECK(mix.symmetry_residual < 1e-6);
        CHECK(mix.marginal_residual < 1e-10);
        CHECK(mix.ancilla_dims == std::pair<int, int>{4, 4});
    }
}

TEST_CASE("projection dilation equals subsystem dephasing after discarding") {
    const DensityMatrix rho = random_mixed({2, 2}, 3, 1, 61);
    const LocalBasis lb = LocalBasis::from_columns(haar_unitary(2, 62));
    for (int k = 0; k < 2; ++k) {
        const DensityMatrix dilated = projection_dilation(rho, k, lb);
        CHECK(dilated.dims() == std::vector<int>{2, 2, 2});
        const DensityMatrix back = partial_trace(dilated, {2}, 1);
        const DensityMatrix deph = dephase_subsystem(rho, k, lb);
        CHECK(frobenius_distance(back.mat(), deph.mat()) < 1e-12);
    }
}

TEST_CASE("classical copy duplicates the registry and rejects coherence") {
    const DensityMatrix b0 = random_mixed({2}, 2, -1, 1);
    const DensityMatrix b1 = random_mixed({2}, 2, -1, 2);
    const DensityMatrix cq = cq_state({0.6, 0.4}, {b0, b1});
    const DensityMatrix copied = classical_copy(cq, 0, LocalBasis::computational(2));
    CHECK(copied.dims() == std::vector<int>{2, 2, 2});
    CHECK(frobenius_distance(partial_trace(copied, {2}, 1).mat(), cq.mat()) < 1e-12);
    // The copy is perfectly correlated with the registry.
    const DensityMatrix pair = partial_trace(copied, {1}, 1);
    CHECK(std::abs(pair.mat()(0, 0).real() - 0.6) < 1e-12);
    CHECK(std::abs(pair.mat()(3, 3).real() - 0.4) < 1e-12);
    CHECK(std::abs(pair.mat()(1, 1)) < 1e-12);

    CHECK_THROWS_AS(
        classical_copy(bell(BellKind::PhiPlus), 0, LocalBasis::computational(2)),
        NotClassicalOnRegistry);
}

TEST_CASE("decomposition transport matches the channel output") {
    const SeparableSample s = random_separable(2, 2, 2, 301);
    const Matrix alice = haar_unitary(4, 302);  // on registry (x) A
    const LocalBasis reg = LocalBasis::computational(2);
    const std::vector<Matrix> bob{haar_unitary(2, 303), haar_unitary(2, 304)};
    const SeparableDecomposition moved =
        transform_decomposition(s.decomposition, alice, reg, bob);
    double total = 0.0;
    for (const auto& t : moved.terms) total += t.weight;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // Oracle: run the dilated round on the reconstructed state.
    DensityMatrix sigma = kron(
        DensityMatrix::trusted(Matrix((Vector(2) << 1, 0).finished() *
                                      (Vector(2) << 1, 0).finished().adjoint()),
                               {2}),
        s.state, 2);
    sigma = apply_unitary(sigma, alice, {0, 1});
    sigma = dephase_subsystem(sigma, 0, reg);
    Matrix bop = Matrix::Zero(4, 4);
    bop.block(0, 0, 2, 2) = bob[0];
    bop.block(2, 2, 2, 2) = bob[1];
    sigma = apply_unitary(sigma, bop, {0, 2});
    const DensityMatrix expected = partial_trace(sigma, {0}, 1);
    CHECK(frobenius_distance(moved.reconstruct().mat(), expected.mat()) < 1e-10);
}

TEST_CASE("one communication round never raises the bound on separable probes") {
    const SeparableSample s = random_separable(2, 2, 2, 401);
    const Matrix alice = haar_unitary(4, 402);
    const std::vector<Matrix> bob{haar_unitary(2, 403), haar_unitary(2, 404)};
    OptimizerConfig cfg = quick(405, 6);
    cfg.target = 1e-6;
    const LoccRoundReport rep = locc_round_probe(
        s.state, alice, LocalBasis::computational(2), bob, cfg, &s.decomposition,
        5e-2, {4, 4});
    CHECK(rep.monotone_ok);
    CHECK(rep.before <= 1e-3);
    CHECK(rep.after <= rep.before + rep.slack);
    CHECK(rep.output.dims() == std::vector<int>{2, 2});
    CHECK(std::abs(rep.output.mat().trace() - Complex(1.0)) < 1e-10);
}
