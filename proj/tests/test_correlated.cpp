#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcc/correlated.hpp"
#include "qcc/stategen.hpp"

#include "ppt.hpp"

using namespace qcc;
using qcc_test::ppt_entangled;

TEST_CASE("product states carry no correlated coherence") {
    const DensityMatrix a = random_mixed({2}, 2, -1, 5);
    const DensityMatrix b = random_mixed({3}, 2, -1, 6);
    const DensityMatrix rho = kron(a, b, 1);
    const CCResult r = correlated_coherence_canonical(rho);
    CHECK(std::abs(r.value) < 1e-9);
    // In an arbitrary product basis the cc of a product state factorizes
    // into the product of the local coherences.
    const ProductBasisChoice pb{{LocalBasis::from_columns(haar_unitary(2, 9)),
                                 LocalBasis::from_columns(haar_unitary(3, 10))}};
    const double ca = l1_coherence(a.mat(), pb.locals[0].vectors);
    const double cb = l1_coherence(b.mat(), pb.locals[1].vectors);
    CHECK(correlated_coherence(rho, pb) == doctest::Approx(ca * cb).epsilon(1e-9));
}

TEST_CASE("cc is nonnegative in any product basis") {
    CounterRng rng(12345);
    for (int trial = 0; trial < 40; ++trial) {
        const int db = 2 + trial % 2;
        const DensityMatrix rho =
            random_mixed({2, db}, 1 + trial % 4, 1, 1000 + trial);
        const ProductBasisChoice pb{
            {LocalBasis::from_columns(haar_unitary(2, rng.next_u64())),
             LocalBasis::from_columns(haar_unitary(db, rng.next_u64()))}};
        CHECK(correlated_coherence(rho, pb) >= -1e-10);
        CHECK(correlated_coherence_canonical(rho, CanonicalBasisMode::Fixed).value >=
              -1e-10);
    }
}

TEST_CASE("cc-states vanish in their defining basis and classify as discord-free") {
    CounterRng rng(777);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd p(2, 3);
        double total = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) { p(i, j) = rng.uniform() + 0.01; total += p(i, j); }
        p /= total;
        const ProductBasisChoice pb{
            {LocalBasis::from_columns(haar_unitary(2, rng.next_u64())),
             LocalBasis::from_columns(haar_unitary(3, rng.next_u64()))}};
        const DensityMatrix rho = cc_state(p, pb);
        CHECK(std::abs(correlated_coherence(rho, pb)) < 1e-10);
        const SymmetricDiscordResult sd = symmetric_discord_zero(rho);
        CHECK(sd.zero);
    }
}

TEST_CASE("entangled pure states are not symmetric-discord-free") {
    int found = 0;
    for (std::uint64_t seed = 1; seed <= 40 && found < 10; ++seed) {
        const DensityMatrix psi = random_pure({2, 2}, 1, seed);
        if (!ppt_entangled(psi, 2.5e-2)) continue;
        ++found;
        const SymmetricDiscordResult sd = symmetric_discord_zero(psi);
        CHECK(!sd.zero);
        CHECK(sd.cc.value >= 1e-2);
    }
    CHECK(found == 10);
}

TEST_CASE("bell cc equals one in minimized canonical bases") {
    const DensityMatrix phi = bell(BellKind::PhiPlus);
    OptimizerConfig cfg;
    cfg.restarts = 8;
    cfg.seed = 21;
    const CCResult r = correlated_coherence_canonical(
        phi, CanonicalBasisMode::MinimizedOverDegeneracy, cfg);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-3));
    // Fully degenerate marginals expose one 2x2 block per side.
    CHECK(r.basis.locals[0].degeneracy_blocks.size() == 1);
}

TEST_CASE("fixed and minimized modes agree without degeneracy") {
    const DensityMatrix rho = random_mixed({2, 2}, 3, 1, 31);
    const double fixed =
        correlated_coherence_canonical(rho, CanonicalBasisMode::Fixed).value;
    const double minimized =
        correlated_coherence_canonical(rho, CanonicalBasisMode::MinimizedOverDegeneracy)
            .value;
    CHECK(std::abs(fixed - minimized) < 1e-6);
}

TEST_CASE("dephasing one side in its eigenbasis preserves cq-state cc") {
    CounterRng rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        // Distinct registry weights keep side A's eigenbasis computational.
        std::vector<double> w{0.55 + 0.01 * trial, 0.45 - 0.01 * trial};
        const std::vector<DensityMatrix> bob{random_mixed({2}, 2, -1, rng.next_u64()),
                                             random_mixed({2}, 2, -1, rng.next_u64())};
        const DensityMatrix rho = cq_state(w, bob);
        const AsymmetricDiscordResult ad = asymmetric_discord_delta(rho, Side::A);
        CHECK(ad.zero);
        CHECK(ad.delta <= 1e-9);
        CHECK(ad.delta >= -1e-12);
    }
}

TEST_CASE("bell loses all cc under one-sided dephasing") {
    OptimizerConfig cfg;
    cfg.restarts = 8;
    cfg.seed = 77;
    const AsymmetricDiscordResult ad =
        asymmetric_discord_delta(bell(BellKind::PsiMinus), Side::A, cfg);
    CHECK(ad.delta == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(!ad.zero);
}

TEST_CASE("dephase_side matches embedded projectors") {
    const DensityMatrix rho = random_mixed({2, 2}, 4, 1, 808);
    const LocalBasis lb = LocalBasis::from_columns(haar_unitary(2, 9001));
    const DensityMatrix fast = dephase_side(rho, Side::B, lb);
    Matrix slow = Matrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i) {
        const Matrix p = lb.vectors.col(i) * lb.vectors.col(i).adjoint();
        const Matrix pe = embed(p, {2, 2}, {1});
        slow += pe * rho.mat() * pe;
    }
    CHECK(frobenius_distance(fast.mat(), slow) < 1e-13);
}
