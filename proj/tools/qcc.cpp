#include "qcc/extensions.hpp"
#include "qcc/statefile.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

using nlohmann::json;
using namespace qcc;

constexpr int kExitBadInput = 2;
constexpr int kExitGateFailure = 3;

struct StrictViolation : Error {
    using Error::Error;
};

void require_seed(bool strict, bool seed_set) {
    if (strict && !seed_set)
        throw StrictViolation("--strict requires --seed on randomized commands");
}

void print(const json& j) { std::cout << j.dump() << "\n"; }

int cmd_coherence(const std::string& file, const std::string& basis) {
    const DensityMatrix rho = load_state(file);
    double value = 0.0;
    if (basis == "computational") {
        value = l1_coherence(rho.mat(), Matrix::Identity(rho.dim(), rho.dim()));
    } else {
        const ProductBasisChoice pb{
            {local_eigenbasis(rho, Side::A), local_eigenbasis(rho, Side::B)}};
        value = l1_coherence(rho, pb);
    }
    print(json{{"c_l1", value}});
    return 0;
}

int cmd_cc(const std::string& file, const std::string& mode, OptimizerConfig cfg) {
    const DensityMatrix rho = load_state(file);
    const CanonicalBasisMode m = mode == "fixed"
                                     ? CanonicalBasisMode::Fixed
                                     : CanonicalBasisMode::MinimizedOverDegeneracy;
    const CCResult r = correlated_coherence_canonical(rho, m, cfg);
    print(json{{"value", r.value},
               {"mode", mode},
               {"converged", r.converged},
               {"restarts_used", r.report.restarts_used},
               {"evaluations", r.report.evaluations}});
    return 0;
}

int cmd_discord(const std::string& file, bool sym, const std::string& asym_side,
                double tol, const OptimizerConfig& cfg) {
    const DensityMatrix rho = load_state(file);
    json out;
    if (sym) {
        const SymmetricDiscordResult r = symmetric_discord_zero(rho, tol, cfg);
        out = json{{"value", r.cc.value}, {"zero", r.zero}};
    } else {
        const Side side = asym_side == "A" ? Side::A : Side::B;
        const AsymmetricDiscordResult r = asymmetric_discord_delta(rho, side, cfg, tol);
        out = json{{"value", r.delta}, {"zero", r.zero}};
    }
    print(out);
    return 0;
}

int cmd_eoc(const std::string& file, std::pair<int, int> ancilla,
            const std::string& decomp_file, const OptimizerConfig& cfg) {
    const DensityMatrix rho = load_state(file);
    SeparableDecomposition dec;
    const SeparableDecomposition* witness = nullptr;
    if (!decomp_file.empty()) {
        dec = load_decomposition(decomp_file);
        witness = &dec;
    }
    const ExtensionResult r = eoc_upper_bound(rho, ancilla, cfg, witness);
    print(json{{"value", r.cc_value},
               {"symmetry_residual", r.symmetry_residual},
               {"marginal_residual", r.marginal_residual},
               {"ancilla", {r.ancilla_dims.first, r.ancilla_dims.second}},
               {"restarts_used", r.report.restarts_used},
               {"converged", r.converged}});
    return 0;
}

int cmd_gen(const std::string& family, const std::string& kind, double p,
            std::vector<int> dims, int rank, std::uint64_t seed,
            const std::string& out_file) {
    DensityMatrix rho;
    if (family == "bell") {
        BellKind k = BellKind::PhiPlus;
        if (kind == "phi+") k = BellKind::PhiPlus;
        else if (kind == "phi-") k = BellKind::PhiMinus;
        else if (kind == "psi+") k = BellKind::PsiPlus;
        else if (kind == "psi-") k = BellKind::PsiMinus;
        else throw ParseError("unknown bell kind: " + kind);
        rho = bell(k);
    } else if (family == "werner") {
        if (p < 0.0 || p > 1.0) throw ParseError("werner: --p must be in [0, 1]");
        rho = werner(p);
    } else if (family == "random") {
        if (dims.size() != 2) throw ParseError("random: --dims takes two ints");
        if (rank < 1) throw ParseError("random: --rank must be >= 1");
        rho = random_mixed(dims, rank, 1, seed);
    } else {
        throw ParseError("unknown family: " + family);
    }
    save_state(out_file, rho);
    print(json{{"written", out_file}, {"dim", rho.dim()}});
    return 0;
}

int cmd_check_extension(const std::string& ext_file, const std::string& marginal_file,
                        const OptimizerConfig& cfg) {
    DensityMatrix ext = load_state(ext_file);
    if (ext.dims().size() != 4)
        throw ParseError("extension file must have two factors per side");
    const DensityMatrix target = load_state(marginal_file);
    const DensityMatrix marg = extension_marginal(ext);
    const double mres = frobenius_distance(marg.mat(), target.mat());
    const SymmetryResidualResult sres = unitary_symmetry_residual(ext, cfg);
    print(json{{"is_extension", mres <= 1e-8},
               {"marginal_residual", mres},
               {"symmetry_residual", sres.value},
               {"spectral_certificate", sres.spectral_certificate}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"l1-coherence, correlated coherence and extension tools"};
    app.require_subcommand(1);
    bool strict = false;
    app.add_flag("--strict", strict, "require --seed on randomized commands");

    std::string file, basis = "computational", mode = "min", asym_side;
    std::string decomp_file, out_file = "state.json", family, kind = "phi+";
    bool sym = false;
    double tol = 1e-7, p = 0.0;
    std::vector<int> ancilla, dims;
    int rank = 1;
    OptimizerConfig cfg;
    bool seed_set = false;

    auto add_seed = [&](CLI::App* c) {
        c->add_option("--seed", cfg.seed, "PRNG seed")->each([&](const std::string&) {
            seed_set = true;
        });
        c->add_option("--restarts", cfg.restarts, "optimizer restarts");
    };

    auto* c_coh = app.add_subcommand("coherence", "l1-norm coherence of a state file");
    c_coh->add_option("file", file)->required();
    c_coh->add_option("--basis", basis)->check(CLI::IsMember({"computational", "eigen"}));

    auto* c_cc = app.add_subcommand("cc", "correlated coherence in canonical bases");
    c_cc->add_option("file", file)->required();
    c_cc->add_option("--mode", mode)->check(CLI::IsMember({"fixed", "min"}));
    add_seed(c_cc);

    auto* c_dis = app.add_subcommand("discord", "discord-zero classifiers");
    c_dis->add_option("file", file)->required();
    auto* f_sym = c_dis->add_flag("--sym", sym, "symmetric classifier");
    c_dis->add_option("--asym", asym_side, "one-sided classifier, side A or B")
        ->check(CLI::IsMember({"A", "B"}))
        ->excludes(f_sym);
    c_dis->add_option("--tol", tol, "classification tolerance");
    add_seed(c_dis);

    auto* c_eoc = app.add_subcommand("eoc", "entanglement-of-coherence upper bound");
    c_eoc->add_option("file", file)->required();
    c_eoc->add_option("--ancilla", ancilla, "ancilla dims dA' dB'")->expected(2);
    c_eoc->add_option("--decomp", decomp_file, "separable decomposition sidecar");
    c_eoc->add_option("--mu", cfg.penalty_weight, "symmetry penalty weight");
    add_seed(c_eoc);

    auto* c_gen = app.add_subcommand("gen", "write a state file");
    c_gen->add_option("family", family)->required()
        ->check(CLI::IsMember({"bell", "werner", "random"}));
    c_gen->add_option("kind", kind, "bell kind: phi+ phi- psi+ psi-");
    c_gen->add_option("--p", p, "werner mixing weight");
    c_gen->add_option("--dims", dims, "random: side dims dA dB")->expected(2);
    c_gen->add_option("--rank", rank, "random: rank");
    c_gen->add_option("--seed", cfg.seed)->each([&](const std::string&) {
        seed_set = true;
    });
    c_gen->add_option("-o,--output", out_file, "output path");

    auto* c_chk = app.add_subcommand("check-extension", "verify an extension file");
    c_chk->add_option("ext_file", file)->required();
    c_chk->add_option("--marginal", decomp_file, "target marginal state file")->required();
    add_seed(c_chk);

    for (auto* c : {c_coh, c_cc, c_dis, c_eoc, c_gen, c_chk})
        c->add_flag("--strict", strict, "require --seed on randomized commands");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_coh->parsed()) return cmd_coherence(file, basis);
        if (c_cc->parsed()) {
            require_seed(strict, seed_set);
            return cmd_cc(file, mode, cfg);
        }
        if (c_dis->parsed()) {
            require_seed(strict, seed_set);
            if (!sym && asym_side.empty())
                throw ParseError("discord: pass --sym or --asym A|B");
            return cmd_discord(file, sym, asym_side, tol, cfg);
        }
        if (c_eoc->parsed()) {
            require_seed(strict, seed_set);
            std::pair<int, int> anc{0, 0};
            if (ancilla.size() == 2) anc = {ancilla[0], ancilla[1]};
            return cmd_eoc(file, anc, decomp_file, cfg);
        }
        if (c_gen->parsed()) {
            if (family == "random") require_seed(strict, seed_set);
            return cmd_gen(family, kind, p, dims, rank, cfg.seed, out_file);
        }
        if (c_chk->parsed()) {
            require_seed(strict, seed_set);
            return cmd_check_extension(file, decomp_file, cfg);
        }
    } catch (const NoSymmetricCandidateFound& e) {
        std::cerr << e.what() << " (best residual " << e.best_residual << ")\n";
        return kExitGateFailure;
    } catch (const ValidationError& e) {
        std::cerr << e.report.to_string() << "\n";
        return kExitBadInput;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitBadInput;
    }
    return 0;
}
