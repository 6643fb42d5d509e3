#include "qcc/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qcc {

namespace {

constexpr double kSymmetryGate = 1e-4;
constexpr double kSpectralGap = 1e-8;

long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

Matrix pure_projector(int d, int which) {
    Matrix p = Matrix::Zero(d, d);
    p(which, which) = 1.0;
    return p;
}

// Appends |0> pad factors so both sides have the lcm dimension.
DensityMatrix pad_extension(const DensityMatrix& ext) {
    const int da = ext.dim_side_a(), db = ext.dim_side_b();
    const long long l = lcm_ll(da, db);
    const int pa = int(l / da), pb = int(l / db);
    if (pa == 1 && pb == 1) return ext;
    Matrix m = kron(kron(ext.mat(), pure_projector(pa, 0)), pure_projector(pb, 0));
    std::vector<int> dims = ext.dims();
    const int n = int(dims.size());
    dims.push_back(pa);
    dims.push_back(pb);
    std::vector<int> perm;
    for (int i = 0; i < ext.split(); ++i) perm.push_back(i);
    perm.push_back(n);
    for (int i = ext.split(); i < n; ++i) perm.push_back(i);
    perm.push_back(n + 1);
    return permute_subsystems(
        DensityMatrix::trusted(std::move(m), std::move(dims)), perm, ext.split() + 1);
}

} // namespace

int padded_side_dim(const DensityMatrix& ext_state) {
    return int(lcm_ll(ext_state.dim_side_a(), ext_state.dim_side_b()));
}

DensityMatrix extension_marginal(const DensityMatrix& ext_state) {
    if (ext_state.dims().size() != 4 || ext_state.split() != 2)
        throw DimError("extension_marginal: expected {D_A, d_A', D_B, d_B'} layout");
    return partial_trace(ext_state, {1, 3}, 1);
}

DensityMatrix extension_marginal(const ExtensionResult& ext) {
    return extension_marginal(ext.state);
}

double swap_symmetry_residual(const DensityMatrix& ext_state, const Matrix& u,
                              const Matrix& v) {
    const DensityMatrix padded = pad_extension(ext_state);
    const int l = padded.dim_side_a();
    if (u.rows() != l || v.rows() != l)
        throw DimError("swap_symmetry_residual: unitary does not match padded side");
    const DensityMatrix swapped = swap_bipartite(
        DensityMatrix::trusted(padded.mat(), {l, l}, 1));
    const Matrix w = kron(u, v);
    return frobenius_distance(w * swapped.mat() * w.adjoint(), padded.mat());
}

SymmetryResidualResult unitary_symmetry_residual(
    const DensityMatrix& ext_state, const OptimizerConfig& config,
    const std::vector<std::pair<Matrix, Matrix>>& guesses) {
    const DensityMatrix padded = pad_extension(ext_state);
    const int l = padded.dim_side_a();
    const DensityMatrix flat = DensityMatrix::trusted(padded.mat(), {l, l}, 1);

    // Unequal marginal spectra rule out symmetry outright.
    const EighResult ea = eigh(marginal(flat, Side::A).mat());
    const EighResult eb = eigh(marginal(flat, Side::B).mat());
    const double gap = (ea.values - eb.values).cwiseAbs().maxCoeff();
    SymmetryResidualResult out;
    if (gap > kSpectralGap) {
        out.value = gap;
        out.u = Matrix::Identity(l, l);
        out.v = Matrix::Identity(l, l);
        out.spectral_certificate = true;
        return out;
    }

    const DensityMatrix swapped = swap_bipartite(flat);
    const int np = l * l;
    const auto objective = [&](const Eigen::VectorXd& x) {
        const Matrix u = unitary_exp(hermitian_from_params(x.data(), l));
        const Matrix v = unitary_exp(hermitian_from_params(x.data() + np, l));
        const Matrix w = kron(u, v);
        return frobenius_distance(w * swapped.mat() * w.adjoint(), flat.mat());
    };

    // Guesses first: an exact witness hits the target on its first
    // evaluation and spares the remaining restarts.
    std::vector<Eigen::VectorXd> starts;
    for (const auto& [gu, gv] : guesses) {
        if (gu.rows() != l || gv.rows() != l) continue;
        Eigen::VectorXd x(2 * np);
        hermitian_to_params(hermitian_log_unitary(gu), x.data());
        hermitian_to_params(hermitian_log_unitary(gv), x.data() + np);
        starts.push_back(std::move(x));
    }
    starts.push_back(Eigen::VectorXd::Zero(2 * np));  // identity

    OptimizerConfig cfg = config;
    if (cfg.target < 0.0) cfg.target = 1e-10;
    const SearchOutcome res = minimize_multistart(objective, 2 * np, cfg, starts);
    out.value = res.report.best_value;
    out.u = unitary_exp(hermitian_from_params(res.best_x.data(), l));
    out.v = unitary_exp(hermitian_from_params(res.best_x.data() + np, l));
    return out;
}

namespace {

// Witness extension of a separable decomposition with ancilla dims (a, b):
// mu_i = alpha_i (x) |i>_{A'}, nu_i = beta_i (x) |i>_{B'}.
struct WitnessPieces {
    DensityMatrix state;
    Matrix mu, nu;  // columns, on the unpadded sides
};

WitnessPieces witness_extension_state(const SeparableDecomposition& dec, int a, int b) {
    const int n = int(dec.terms.size());
    const int da = dec.dim_a(), db = dec.dim_b();
    if (a < n || b < n)
        throw DimError("witness extension: ancilla dims below the number of terms");
    const int la = da * a, lb = db * b;
    Matrix mu = Matrix::Zero(la, n), nu = Matrix::Zero(lb, n);
    Matrix m = Matrix::Zero((long long)la * lb, (long long)la * lb);
    for (int i = 0; i < n; ++i) {
        for (int x = 0; x < da; ++x) mu(x * a + i, i) = dec.terms[i].alpha[x];
        for (int y = 0; y < db; ++y) nu(y * b + i, i) = dec.terms[i].beta[y];
        Vector joint((long long)la * lb);
        for (int x = 0; x < la; ++x)
            for (int y = 0; y < lb; ++y) joint[(long long)x * lb + y] = mu(x, i) * nu(y, i);
        m += dec.terms[i].weight * (joint * joint.adjoint());
    }
    return {DensityMatrix::trusted(std::move(m), {da, a, db, b}, 2),
            std::move(mu), std::move(nu)};
}

// Closed-form swap witnesses on the padded sides: U nu_i = mu_i, V mu_i = nu_i.
std::pair<Matrix, Matrix> witness_sym_unitaries(const Matrix& mu, const Matrix& nu) {
    const int la = int(mu.rows()), lb = int(nu.rows());
    const long long l = lcm_ll(la, lb);
    const int pa = int(l / la), pb = int(l / lb);
    Matrix mup = Matrix::Zero(l, mu.cols()), nup = Matrix::Zero(l, nu.cols());
    for (int c = 0; c < mu.cols(); ++c) {
        for (int x = 0; x < la; ++x) mup(x * pa, c) = mu(x, c);
        for (int y = 0; y < lb; ++y) nup(y * pb, c) = nu(y, c);
    }
    const Matrix qmu = complete_basis(mup), qnu = complete_basis(nup);
    return {qmu * qnu.adjoint(), qnu * qmu.adjoint()};
}

} // namespace

ExtensionResult separable_extension(const SeparableDecomposition& dec) {
    const int n = int(dec.terms.size());
    WitnessPieces wp = witness_extension_state(dec, n, n);

    ExtensionResult out;
    out.state = wp.state;
    out.ancilla_dims = {n, n};
    out.basis = ProductBasisChoice{
        {LocalBasis{complete_basis(wp.mu), {}}, LocalBasis{complete_basis(wp.nu), {}}}};
    out.cc_value = correlated_coherence(out.state, out.basis);
    std::tie(out.sym_u, out.sym_v) = witness_sym_unitaries(wp.mu, wp.nu);
    out.symmetry_residual = swap_symmetry_residual(out.state, out.sym_u, out.sym_v);
    out.marginal_residual =
        frobenius_distance(extension_marginal(out.state).mat(), dec.reconstruct().mat());
    return out;
}

namespace {

struct SearchBase {
    Matrix q0;  // N x N completion of the base isometry
    std::vector<std::pair<Matrix, Matrix>> sym_guesses;
    int restarts;
};

Matrix stiefel_generator(const double* x, int n, int r) {
    // Tangent-block anti-Hermitian generator [[B, -C^dag], [C, 0]], B = i*H.
    Matrix g = Matrix::Zero(n, n);
    const Matrix h = hermitian_from_params(x, r);
    g.topLeftCorner(r, r) = Complex(0.0, 1.0) * h;
    int k = r * r;
    for (int i = r; i < n; ++i)
        for (int j = 0; j < r; ++j) {
            g(i, j) = Complex(x[k], x[k + 1]);
            g(j, i) = -std::conj(g(i, j));
            k += 2;
        }
    return g;
}

DensityMatrix build_extension(const Matrix& s, const Matrix& w, int da_side, int db_side,
                              int a, int b, int g) {
    const int d = int(s.rows()), r = int(s.cols());
    const int n = int(w.rows());
    (void)r;
    const Matrix t = s * w.transpose();  // D x N, N = a*b*g
    Matrix m((long long)d * a * b, g);
    for (int x = 0; x < d; ++x)
        for (int anc = 0; anc < a * b; ++anc)
            for (int gg = 0; gg < g; ++gg)
                m((long long)x * a * b + anc, gg) = t(x, anc * g + gg);
    (void)n;
    Matrix rho_big = m * m.adjoint();
    const DensityMatrix tmp =
        DensityMatrix::trusted(std::move(rho_big), {da_side, db_side, a, b});
    return permute_subsystems(tmp, {0, 2, 1, 3}, 2);
}

// Recovers an isometry W with Tr_G[(1 (x) W)|psi><psi|(..)] == ext, when the
// extension's rank fits in the purifier dimension g.
std::optional<Matrix> isometry_from_extension(const DensityMatrix& ext, const Matrix& s,
                                              const RealVector& lam, int r, int a, int b,
                                              int g) {
    const DensityMatrix reord = permute_subsystems(ext, {0, 2, 1, 3});
    const EighResult e = eigh(reord.mat());
    int m_rank = 0;
    for (int i = 0; i < e.values.size(); ++i)
        if (e.values[i] > 1e-10) ++m_rank;
    if (m_rank > g) return std::nullopt;

    const int d = int(s.rows());
    const int n = a * b * g;
    Matrix f = Matrix::Zero(d, n);
    for (int gg = 0; gg < m_rank; ++gg) {
        const double sq = std::sqrt(e.values[gg]);
        for (int x = 0; x < d; ++x)
            for (int anc = 0; anc < a * b; ++anc)
                f(x, anc * g + gg) = sq * e.vectors((long long)x * a * b + anc, gg);
    }
    // Purifications of the same marginal differ by an isometry on the
    // purifying side: F = S W^T.
    Matrix vs = s;  // columns sqrt(lam_k) v_k; recover V then divide
    Matrix w(n, r);
    const Matrix vf = vs.adjoint() * f;  // (sqrt(lam_k) v_k)^dag F = lam_k-scaled rows
    for (int k = 0; k < r; ++k) w.col(k) = vf.row(k).transpose() / lam[k];

    const double iso = (w.adjoint() * w - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
    if (iso > 1e-6) return std::nullopt;
    // Clean up and confirm the reconstruction.
    Eigen::HouseholderQR<Matrix> qr(w);
    Matrix q = qr.householderQ() * Matrix::Identity(n, r);
    // Keep the original column phases where defined.
    for (int k = 0; k < r; ++k) {
        const Complex ov = q.col(k).dot(w.col(k));
        if (std::abs(ov) > 1e-12) q.col(k) *= ov / std::abs(ov);
    }
    const DensityMatrix rebuilt =
        build_extension(s, q, ext.dims()[0], ext.dims()[2], a, b, g);
    if (frobenius_distance(rebuilt.mat(), ext.mat()) > 1e-6) return std::nullopt;
    return q;
}

struct Candidate {
    DensityMatrix state;
    std::vector<std::pair<Matrix, Matrix>> sym_guesses;
    bool converged = true;
};

ExtensionResult extension_search(const DensityMatrix& rho, std::pair<int, int> ancilla,
                                 const OptimizerConfig& config,
                                 const SeparableDecomposition* witness,
                                 const std::vector<DensityMatrix>& seed_extensions,
                                 int purifier_dim, bool symmetric) {
    if (!rho.bipartite()) throw DimError("extension search: state has no bipartition");
    const int da_side = rho.dim_side_a(), db_side = rho.dim_side_b();
    const int a = ancilla.first, b = ancilla.second;
    if (a < 1 || b < 1) throw DimError("extension search: ancilla dims must be >= 1");

    const EighResult e = eigh(rho.mat());
    int r = 0;
    for (int i = 0; i < e.values.size(); ++i)
        if (e.values[i] > 1e-10) ++r;
    const int d = rho.dim();
    Matrix s(d, r);
    RealVector lam(r);
    for (int k = 0; k < r; ++k) {
        lam[k] = e.values[k];
        s.col(k) = std::sqrt(e.values[k]) * e.vectors.col(k);
    }

    int g = purifier_dim > 0 ? purifier_dim : std::max(2, r);
    while (a * b * g < r) ++g;
    // Base-point extensions are only recoverable when their rank fits the
    // purifier, so grow it to accommodate the witness and any seeds.
    if (purifier_dim <= 0) {
        if (witness && int(witness->terms.size()) <= std::min(a, b))
            g = std::max(g, int(witness->terms.size()));
        for (const auto& seed : seed_extensions) {
            if (seed.dims().size() != 4 || seed.dims()[0] != da_side ||
                seed.dims()[1] != a || seed.dims()[2] != db_side || seed.dims()[3] != b)
                continue;
            const EighResult se = eigh(seed.mat());
            int sr = 0;
            for (int i = 0; i < se.values.size(); ++i)
                if (se.values[i] > 1e-10) ++sr;
            g = std::max(g, sr);
        }
    }
    const int n = a * b * g;
    const int n_w = 2 * n * r - r * r;
    const int lpad = int(lcm_ll((long long)da_side * a, (long long)db_side * b));
    const int n_u = lpad * lpad;
    const int n_params = symmetric ? n_w + 2 * n_u : n_w;

    // Restart base points, most informed first.
    std::vector<SearchBase> bases;
    if (witness && int(witness->terms.size()) <= std::min(a, b) &&
        witness->dim_a() == da_side && witness->dim_b() == db_side) {
        WitnessPieces wp = witness_extension_state(*witness, a, b);
        if (auto w0 = isometry_from_extension(wp.state, s, lam, r, a, b, g)) {
            SearchBase sb;
            sb.q0 = complete_basis(*w0);
            sb.sym_guesses.push_back(witness_sym_unitaries(wp.mu, wp.nu));
            sb.restarts = 2;
            bases.push_back(std::move(sb));
        }
    }
    for (const auto& seed : seed_extensions) {
        if (seed.dims().size() != 4 || seed.dims()[0] != da_side ||
            seed.dims()[1] != a || seed.dims()[2] != db_side || seed.dims()[3] != b)
            continue;
        if (auto w0 = isometry_from_extension(seed, s, lam, r, a, b, g))
            bases.push_back({complete_basis(*w0), {}, 2});
    }
    bases.push_back({Matrix::Identity(n, n), {}, 1});  // trivial extension rho (x) |0><0|
    int used = 0;
    for (auto& sb : bases) used += sb.restarts;
    bases.back().restarts = std::max(2, config.restarts - (used - bases.back().restarts));

    const double early_accept = config.target >= 0.0 ? config.target : 1e-9;

    // Coarse objective: fixed-eigenbasis cc (+ penalized swap residual).
    const double mu = config.penalty_weight;
    OptimizerReport aggregate;
    std::vector<Candidate> candidates;

    for (size_t bi = 0; bi < bases.size(); ++bi) {
        const SearchBase& base = bases[bi];
        const auto make_state = [&](const Eigen::VectorXd& x) {
            const Matrix gmat = stiefel_generator(x.data(), n, r);
            const Matrix w = base.q0 * unitary_exp(Complex(0, -1) * gmat).leftCols(r);
            return build_extension(s, w, da_side, db_side, a, b, g);
        };
        const auto make_uv = [&](const Eigen::VectorXd& x) {
            Matrix u0 = Matrix::Identity(lpad, lpad), v0 = u0;
            if (!base.sym_guesses.empty()) {
                u0 = base.sym_guesses.front().first;
                v0 = base.sym_guesses.front().second;
            }
            const Matrix u = unitary_exp(hermitian_from_params(x.data() + n_w, lpad)) * u0;
            const Matrix v = unitary_exp(hermitian_from_params(x.data() + n_w + n_u, lpad)) * v0;
            return std::make_pair(u, v);
        };
        const auto objective = [&](const Eigen::VectorXd& x) {
            const DensityMatrix ext = make_state(x);
            double val =
                correlated_coherence_canonical(ext, CanonicalBasisMode::Fixed).value;
            if (symmetric) {
                const auto [u, v] = make_uv(x);
                const double res = swap_symmetry_residual(ext, u, v);
                val += mu * res * res;
            }
            return val;
        };

        OptimizerConfig cfg = config;
        cfg.restarts = base.restarts;
        cfg.seed = CounterRng::mix64(config.seed + 0x9E37 * (bi + 1));
        cfg.target = early_accept * 0.1;
        const SearchOutcome res = minimize_multistart(
            objective, n_params, cfg, {Eigen::VectorXd::Zero(n_params)});

        aggregate.evaluations += res.report.evaluations;
        aggregate.restarts_used += res.report.restarts_used;
        aggregate.restart_values.insert(aggregate.restart_values.end(),
                                        res.report.restart_values.begin(),
                                        res.report.restart_values.end());

        Candidate cand;
        cand.state = make_state(res.best_x);
        cand.converged = res.report.converged;
        cand.sym_guesses = base.sym_guesses;
        if (symmetric) {
            const auto [u, v] = make_uv(res.best_x);
            cand.sym_guesses.insert(cand.sym_guesses.begin(), {u, v});
        }
        candidates.push_back(std::move(cand));
        // The base point itself is a certified candidate too.
        candidates.push_back(
            {make_state(Eigen::VectorXd::Zero(n_params)), base.sym_guesses, true});

        if (res.report.best_value <= early_accept) break;
    }

    // Full evaluation: minimized canonical cc and (for eoc) the certified
    // symmetry residual with its acceptance gate.
    OptimizerConfig fine = config;
    fine.restarts = std::max(4, config.restarts / 4);
    fine.max_iters = std::max(200, config.max_iters);
    fine.target = -1.0;
    fine.seed = CounterRng::mix64(config.seed + 0xF1FE);

    ExtensionResult best;
    bool have_best = false;
    double best_gate_residual = std::numeric_limits<double>::infinity();
    for (auto& cand : candidates) {
        const CCResult cc = correlated_coherence_canonical(
            cand.state, CanonicalBasisMode::MinimizedOverDegeneracy, fine);
        double sym_res = 0.0;
        Matrix u = Matrix::Identity(lpad, lpad), v = u;
        if (symmetric) {
            const SymmetryResidualResult sr =
                unitary_symmetry_residual(cand.state, fine, cand.sym_guesses);
            sym_res = sr.value;
            u = sr.u;
            v = sr.v;
            best_gate_residual = std::min(best_gate_residual, sym_res);
            if (sym_res > kSymmetryGate) continue;
        } else {
            sym_res = swap_symmetry_residual(cand.state, u, v);
        }
        if (!have_best || cc.value < best.cc_value) {
            best.state = cand.state;
            best.cc_value = cc.value;
            best.basis = cc.basis;
            best.sym_u = u;
            best.sym_v = v;
            best.symmetry_residual = sym_res;
            best.converged = cand.converged && cc.converged;
            have_best = true;
        }
    }
    if (!have_best) throw NoSymmetricCandidateFound(best_gate_residual);

    best.ancilla_dims = ancilla;
    best.marginal_residual =
        frobenius_distance(extension_marginal(best.state).mat(), rho.mat());
    aggregate.best_value = best.cc_value;
    aggregate.converged = best.converged;
    best.report = std::move(aggregate);
    return best;
}

} // namespace

ExtensionResult min_cc_extension(const DensityMatrix& rho, std::pair<int, int> ancilla,
                                 const OptimizerConfig& config,
                                 const SeparableDecomposition* witness,
                                 const std::vector<DensityMatrix>& seed_extensions,
                                 int purifier_dim) {
    return extension_search(rho, ancilla, config, witness, seed_extensions,
                            purifier_dim, /*symmetric=*/false);
}

ExtensionResult eoc_upper_bound(const DensityMatrix& rho, std::pair<int, int> ancilla,
                                const OptimizerConfig& config,
                                const SeparableDecomposition* witness,
                                const std::vector<DensityMatrix>& seed_extensions,
                                int purifier_dim) {
    if (ancilla.first <= 0) ancilla.first = rho.dim_side_a();
    if (ancilla.second <= 0) ancilla.second = rho.dim_side_b();
    return extension_search(rho, ancilla, config, witness, seed_extensions,
                            purifier_dim, /*symmetric=*/true);
}

ExtensionResult mixture_extension(const ExtensionResult& ext_rho,
                                  const ExtensionResult& ext_sigma, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw Error("mixture_extension: bad lambda");
    const auto& ra = ext_rho.state;
    const auto& rb = ext_sigma.state;
    if (ra.dims() != rb.dims())
        throw DimError("mixture_extension: extensions on different spaces");
    const int da_side = ra.dims()[0], aa = ra.dims()[1];
    const int db_side = ra.dims()[2], ab = ra.dims()[3];

    const auto flagged = [&](const Matrix& m, int which) {
        Matrix big = kron(kron(m, pure_projector(2, which)), pure_projector(2, which));
        const DensityMatrix tmp = DensityMatrix::trusted(
            std::move(big), {da_side, aa, db_side, ab, 2, 2});
        return permute_subsystems(tmp, {0, 1, 4, 2, 3, 5}).mat();
    };
    Matrix tau = lambda * flagged(ra.mat(), 0) + (1.0 - lambda) * flagged(rb.mat(), 1);
    const DensityMatrix tau4 =
        DensityMatrix::trusted(std::move(tau), {da_side, aa * 2, db_side, ab * 2}, 2);

    // Union eigenbases: each input's side basis tagged by its flag.
    const auto union_basis = [&](const LocalBasis& ba, const LocalBasis& bb) {
        const int l0 = ba.dim();
        Matrix cols = Matrix::Zero(l0 * 2, l0 * 2);
        for (int j = 0; j < l0; ++j)
            for (int x = 0; x < l0; ++x) {
                cols(x * 2 + 0, j) = ba.vectors(x, j);
                cols(x * 2 + 1, l0 + j) = bb.vectors(x, j);
            }
        return LocalBasis{std::move(cols), {}};
    };
    ExtensionResult out;
    out.state = tau4;
    out.ancilla_dims = {aa * 2, ab * 2};
    out.basis = ProductBasisChoice{
        {union_basis(ext_rho.basis.locals[0], ext_sigma.basis.locals[0]),
         union_basis(ext_rho.basis.locals[1], ext_sigma.basis.locals[1])}};

    if (l1_coherence(marginal(tau4, Side::A).mat(), out.basis.locals[0].vectors) > 1e-8 ||
        l1_coherence(marginal(tau4, Side::B).mat(), out.basis.locals[1].vectors) > 1e-8)
        throw Error("mixture_extension: union basis fails to diagonalize the marginals");

    out.cc_value = correlated_coherence(tau4, out.basis);
    const double expected =
        lambda * ext_rho.cc_value + (1.0 - lambda) * ext_sigma.cc_value;
    if (std::abs(out.cc_value - expected) > 1e-9)
        throw Error("mixture_extension: cc does not mix affinely");

    // W = U (x) |0><0| + V (x) |1><1| on each side, padded like the inputs.
    const int la = da_side * aa, lb = db_side * ab;
    const long long l = lcm_ll(la, lb);
    const int pa = int(l / la), pb = int(l / lb);
    const auto side_w = [&](const Matrix& u_first, const Matrix& u_second, int dside,
                            int anc, int pad) {
        const std::vector<int> sdims{dside, anc, 2, pad};
        const Matrix e0 = embed(pure_projector(2, 0), sdims, {2});
        const Matrix e1 = embed(pure_projector(2, 1), sdims, {2});
        const Matrix c0 = embed(u_first, sdims, {0, 1, 3});
        const Matrix c1 = embed(u_second, sdims, {0, 1, 3});
        return Matrix(c0 * e0 + c1 * e1);
    };
    out.sym_u = side_w(ext_rho.sym_u, ext_sigma.sym_u, da_side, aa, pa);
    out.sym_v = side_w(ext_rho.sym_v, ext_sigma.sym_v, db_side, ab, pb);
    out.symmetry_residual = swap_symmetry_residual(tau4, out.sym_u, out.sym_v);

    const Matrix mixed_marginal = lambda * extension_marginal(ext_rho).mat() +
                                  (1.0 - lambda) * extension_marginal(ext_sigma).mat();
    out.marginal_residual =
        frobenius_distance(extension_marginal(tau4).mat(), mixed_marginal);
    return out;
}

DensityMatrix projection_dilation(const DensityMatrix& rho, int k,
                                  const LocalBasis& basis) {
    if (k < 0 || k >= int(rho.dims().size()))
        throw DimError("projection_dilation: bad subsystem index");
    const int d = rho.dims()[k];
    if (basis.dim() != d) throw DimError("projection_dilation: basis dim mismatch");

    std::vector<int> nd = rho.dims();
    nd.push_back(d);
    Matrix joint = kron(rho.mat(), pure_projector(d, 0));

    // U |b_i, j> = |b_i, j + i mod d>: controlled cyclic shift.
    Matrix shift = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) shift((j + 1) % d, j) = 1.0;
    Matrix op = Matrix::Zero(d * d, d * d);
    Matrix pow = Matrix::Identity(d, d);
    for (int i = 0; i < d; ++i) {
        op += kron(Matrix(basis.vectors.col(i) * basis.vectors.col(i).adjoint()), pow);
        pow = shift * pow;
    }
    const Matrix uf = embed(op, nd, {k, int(nd.size()) - 1});
    return DensityMatrix::trusted(uf * joint * uf.adjoint(), nd, rho.split());
}

DensityMatrix classical_copy(const DensityMatrix& rho, int registry,
                             const LocalBasis& registry_basis) {
    if (registry < 0 || registry >= int(rho.dims().size()))
        throw DimError("classical_copy: bad subsystem index");
    const int d = rho.dims()[registry];
    if (registry_basis.dim() != d) throw DimError("classical_copy: basis dim mismatch");

    const Matrix t = embed(registry_basis.vectors, rho.dims(), {registry});
    const Matrix sigma = t.adjoint() * rho.mat() * t;

    // Off-block mass across the registry index.
    const int dim = rho.dim();
    std::vector<int> strides(rho.dims().size(), 1);
    for (int i = int(rho.dims().size()) - 2; i >= 0; --i)
        strides[i] = strides[i + 1] * rho.dims()[i + 1];
    const int st = strides[registry];
    const auto digit = [&](int flat) { return (flat / st) % d; };
    double mass = 0.0;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if (digit(r) != digit(c)) mass += std::abs(sigma(r, c));
    if (mass > 1e-9) throw NotClassicalOnRegistry(mass);

    std::vector<int> nd = rho.dims();
    nd.push_back(d);
    Matrix out = Matrix::Zero((long long)dim * d, (long long)dim * d);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            if (digit(r) != digit(c)) continue;
            out((long long)r * d + digit(r), (long long)c * d + digit(c)) = sigma(r, c);
        }
    const Matrix tb = embed(registry_basis.vectors, nd, {registry});
    return DensityMatrix::trusted(tb * out * tb.adjoint(), nd, rho.split());
}

namespace {

DensityMatrix apply_round(const DensityMatrix& in, int alice_idx, int bob_idx,
                          const Matrix& alice_unitary, const LocalBasis& registry_basis,
                          const std::vector<Matrix>& bob_conditionals, int out_split) {
    const int dm = registry_basis.dim();
    DensityMatrix sigma = kron(
        DensityMatrix::trusted(pure_projector(dm, 0), {dm}), in,
        in.split() > 0 ? in.split() + 1 : -1);
    sigma = apply_unitary(sigma, alice_unitary, {0, alice_idx + 1});
    sigma = dephase_subsystem(sigma, 0, registry_basis);
    sigma = classical_copy(sigma, 0, registry_basis);

    const int copy_idx = int(sigma.dims().size()) - 1;
    const int db = sigma.dims()[bob_idx + 1];
    Matrix bob_op = Matrix::Zero(dm * db, dm * db);
    for (int m = 0; m < dm; ++m)
        bob_op += kron(pure_projector(dm, m), bob_conditionals[m]);
    sigma = apply_unitary(sigma, bob_op, {copy_idx, bob_idx + 1});

    return partial_trace(sigma, {0, copy_idx}, out_split);
}

} // namespace

SeparableDecomposition transform_decomposition(const SeparableDecomposition& dec,
                                               const Matrix& alice_unitary,
                                               const LocalBasis& registry_basis,
                                               const std::vector<Matrix>& bob_conditionals) {
    const int dm = registry_basis.dim();
    const int da = dec.dim_a();
    SeparableDecomposition out;
    for (const auto& term : dec.terms) {
        Vector joint = Vector::Zero(dm * da);
        joint.head(da) = term.alpha;  // |0>_M (x) |alpha>
        joint = alice_unitary * joint;
        for (int m = 0; m < dm; ++m) {
            Vector am = Vector::Zero(da);
            for (int j = 0; j < dm; ++j)
                for (int x = 0; x < da; ++x)
                    am[x] += std::conj(registry_basis.vectors(j, m)) * joint[j * da + x];
            const double q = am.squaredNorm();
            if (q < 1e-14) continue;
            out.terms.push_back({term.weight * q, am / std::sqrt(q),
                                 bob_conditionals[m] * term.beta});
        }
    }
    return out;
}

LoccRoundReport locc_round_probe(const DensityMatrix& rho, const Matrix& alice_unitary,
                                 const LocalBasis& registry_basis,
                                 const std::vector<Matrix>& bob_conditionals,
                                 const OptimizerConfig& config,
                                 const SeparableDecomposition* decomp, double slack,
                                 std::pair<int, int> ancilla_dims) {
    if (rho.dims().size() != 2 || rho.split() != 1)
        throw DimError("locc_round_probe: expects a two-subsystem bipartite state");
    if (int(bob_conditionals.size()) != registry_basis.dim())
        throw DimError("locc_round_probe: one Bob unitary per registry outcome");

    LoccRoundReport rep;
    rep.slack = slack;
    rep.before_ext = eoc_upper_bound(rho, ancilla_dims, config, decomp);
    rep.before = rep.before_ext.cc_value;

    rep.output = apply_round(rho, 0, 1, alice_unitary, registry_basis,
                             bob_conditionals, 1);

    // The same round applied to the best extension yields an extension of
    // the output state; it seeds the post-round search.
    const DensityMatrix transported = apply_round(
        rep.before_ext.state, 0, 2, alice_unitary, registry_basis, bob_conditionals, 2);

    SeparableDecomposition dec_after;
    const SeparableDecomposition* dec_ptr = nullptr;
    if (decomp) {
        dec_after = transform_decomposition(*decomp, alice_unitary, registry_basis,
                                            bob_conditionals);
        dec_ptr = &dec_after;
    }
    rep.after_ext = eoc_upper_bound(rep.output, ancilla_dims, config, dec_ptr,
                                    {transported});
    rep.after = rep.after_ext.cc_value;
    rep.monotone_ok = rep.after <= rep.before + slack;
    return rep;
}

} // namespace qcc
