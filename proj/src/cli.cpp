#include "idrkit/cli.hpp"

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "idrkit/mm.hpp"
#include "idrkit/oracles.hpp"
#include "idrkit/problems.hpp"
#include "idrkit/recycling.hpp"
#include "idrkit/trace.hpp"

namespace idrkit {

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("IDRKIT_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

struct ProblemOpts {
    std::string problem;
    std::string matrix_path, rhs_path;
    double c1 = 1.0, c2 = 1.0;
    int inv_h = 0;
    std::string precon = "none";
    double shift = 1.0;
    std::string reorder_path;
};

void add_problem_opts(CLI::App* cmd, ProblemOpts& po) {
    cmd->add_option("--problem", po.problem, "catalog problem name (cdr2d, bicgstabl_xpl1, bicgstabl_xpl3, cdr3d)");
    cmd->add_option("--matrix", po.matrix_path, "Matrix Market system matrix");
    cmd->add_option("--rhs", po.rhs_path, "Matrix Market right-hand side");
    cmd->add_option("--c1", po.c1, "convection scale (cdr2d family)");
    cmd->add_option("--c2", po.c2, "reaction scale (cdr2d family)");
    cmd->add_option("--h", po.inv_h, "reciprocal mesh size 1/h");
    cmd->add_option("--precon", po.precon, "none | ilu0 | ilu0_shift")
        ->check(CLI::IsMember({"none", "ilu0", "ilu0_shift"}));
    cmd->add_option("--shift", po.shift, "diagonal shift for ilu0_shift");
    cmd->add_option("--reorder", po.reorder_path, "permutation file (one 1-based index per line)");
}

LinearSystem build_system(const ProblemOpts& po) {
    PreconMode mode = po.precon == "ilu0" ? PreconMode::ilu0
                      : po.precon == "ilu0_shift" ? PreconMode::ilu0_shift
                                                  : PreconMode::none;
    if (!po.matrix_path.empty()) {
        CsrMatrix a = mm_read_sparse(po.matrix_path);
        std::vector<int> perm;
        if (!po.reorder_path.empty()) perm = read_permutation(po.reorder_path, a.n_rows);
        LinearSystem sys;
        sys.name = po.matrix_path;
        sys.op = make_preconditioned(a, mode, po.shift, perm.empty() ? nullptr : &perm);
        Vector b_tilde;
        if (!po.rhs_path.empty()) b_tilde = mm_read_vector(po.rhs_path);
        else b_tilde = csr_matvec(a, Vector(static_cast<std::size_t>(a.n_cols), 1.0));
        if (!perm.empty()) {
            Vector bp(b_tilde.size());
            for (std::size_t k = 0; k < perm.size(); ++k) bp[k] = b_tilde[static_cast<std::size_t>(perm[k])];
            b_tilde = std::move(bp);
        }
        if (mode == PreconMode::none) sys.b = std::move(b_tilde);
        else sys.b = static_cast<PreconditionedOperator*>(sys.op.get())->transform_rhs(b_tilde);
        sys.x0.assign(sys.b.size(), 0.0);
        return sys;
    }
    if (po.problem.empty()) throw CLI::ValidationError("--problem or --matrix is required");
    if (!catalog_known(po.problem))
        throw CLI::ValidationError("unknown problem '" + po.problem + "'");
    return catalog_system(po.problem, po.c1, po.c2, po.inv_h, mode, po.shift);
}

int status_code(const SolveOutcome& o) {
    switch (o.status) {
        case SolveStatus::converged: return 0;
        case SolveStatus::max_matvec: return 1;
        default: return 3;
    }
}

void report(const SolveOutcome& o, const Vector& b, Operator& op) {
    Blas quiet;
    Vector ax = op.apply_uncounted(o.x);
    Vector r = b;
    quiet.axpy(-1.0, ax, r);
    double tr = quiet.nrm2(r);
    double nb = quiet.nrm2(b);
    std::cout << "status=" << to_string(o.status);
    if (o.status == SolveStatus::breakdown) std::cout << " (" << to_string(o.breakdown) << ")";
    std::cout << " matvec=" << (o.trace.snapshots.empty() ? 0 : o.trace.snapshots.back().n_matvec)
              << " res_iter=" << o.final_beta << " res_true_rel=" << (nb > 0 ? tr / nb : tr)
              << "\n";
}

void maybe_write_trace(const SolveOutcome& o, const std::string& path) {
    if (path.empty()) return;
    write_trace_csv(o.trace, path);
    write_trace_json(o.trace, path + ".json");
}

int verify_suites(const std::string& suite, int n, std::uint64_t seed);

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"short-recurrence Krylov solvers (IDR/IDRstab/GMstab) with recycling"};
    app.set_help_flag("--help", "print help"); // frees -h / --h for the mesh size
    app.require_subcommand(1);

    // ---- solve
    auto* solve = app.add_subcommand("solve", "solve one linear system");
    solve->set_help_flag("--help", "print help");
    ProblemOpts po;
    add_problem_opts(solve, po);
    std::string solver = "gmstab";
    std::string variant;
    int s = 4, ell = 2;
    double tol = 1e-8, alpha = default_alpha();
    long long maxmv = 1000000;
    std::string omega = "stab";
    std::uint64_t seed = default_seed();
    std::string trace_path;
    bool no_z_treatment = false;
    solve->add_option("--solver", solver,
                      "gmstab | gmres | bicgstab | bicgstabl | idr_* | idrstab_*");
    solve->add_option("--variant", variant, "naive | ref | nodec | biortho | obio");
    solve->add_option("--s", s, "shadow-space dimension");
    solve->add_option("--ell", ell, "stability polynomial degree");
    solve->add_option("--tol", tol, "relative residual tolerance");
    solve->add_option("--maxmv", maxmv, "matrix-vector product budget");
    solve->add_option("--omega", omega, "argmin | stab")->check(CLI::IsMember({"argmin", "stab"}));
    solve->add_option("--alpha", alpha, "stability angle (radians)");
    solve->add_option("--seed", seed, "rng seed (default: IDRKIT_SEED or 1)");
    solve->add_option("--trace", trace_path, "trace CSV output (JSON sidecar alongside)");
    solve->add_flag("--no-z-treatment", no_z_treatment, "disable the Z recomputation attendum");

    // ---- sequence
    auto* seq = app.add_subcommand("sequence", "solve a sequence of systems with recycling");
    seq->set_help_flag("--help", "print help");
    ProblemOpts spo;
    add_problem_opts(seq, spo);
    int seq_s = 4;
    double seq_tol = 1e-8, tol2 = 1e-2;
    long long seq_maxmv = 1000000;
    std::uint64_t seq_seed = default_seed();
    std::string save_recycle_stem, seq_trace_prefix;
    seq->add_option("--s", seq_s, "shadow-space dimension");
    seq->add_option("--tol", seq_tol, "relative residual tolerance");
    seq->add_option("--tol2", tol2, "recycling snapshot threshold");
    seq->add_option("--maxmv", seq_maxmv, "matrix-vector budget per system");
    seq->add_option("--seed", seq_seed, "rng seed");
    seq->add_option("--save-recycle", save_recycle_stem, "persist U_hat under <stem>.recycle.*");
    seq->add_option("--trace", seq_trace_prefix, "per-system trace prefix");

    // ---- generate
    auto* gen = app.add_subcommand("generate", "write a catalog problem as .mtx files");
    gen->set_help_flag("--help", "print help");
    ProblemOpts gpo;
    add_problem_opts(gen, gpo);
    std::string out_a, out_b, out_x;
    gen->add_option("--out", out_a, "matrix output path")->required();
    gen->add_option("--rhs-out,--rhs_out", out_b, "right-hand side output path");
    gen->add_option("--xtrue-out", out_x, "manufactured solution output path");

    // ---- verify
    auto* ver = app.add_subcommand("verify", "run the brute-force theory oracles at toy scale");
    ver->set_help_flag("--help", "print help");
    std::string suite = "all";
    int ver_n = 12;
    std::uint64_t ver_seed = default_seed();
    ver->add_option("--suite", suite, "sonneveld | mspace | lsq | all")
        ->check(CLI::IsMember({"sonneveld", "mspace", "lsq", "all"}));
    ver->add_option("--n", ver_n, "toy dimension (<= 40)");
    ver->add_option("--seed", ver_seed, "rng seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*solve) {
            LinearSystem sys = build_system(po);
            SolverConfig cfg;
            cfg.s = s;
            cfg.ell = ell;
            cfg.tol_rel = tol;
            cfg.max_matvec = maxmv;
            cfg.rng_seed = seed;
            cfg.alpha = alpha;
            cfg.omega_strategy = omega == "argmin" ? OmegaStrategy::argmin : OmegaStrategy::stab_coeffs;
            cfg.z_treatment = !no_z_treatment;
            std::string name = solver;
            if (!variant.empty() && (name == "idr" || name == "idrstab")) name += "_" + variant;
            SolveOutcome o;
            if (name == "gmstab") {
                GmstabConfig gcfg;
                gcfg.s = s;
                gcfg.tol_rel = tol;
                gcfg.max_matvec = maxmv;
                gcfg.rng_seed = seed;
                gcfg.alpha = alpha;
                o = gmstab_solve(*sys.op, sys.b, sys.x0, gcfg);
            } else if (name == "gmres") {
                o = gmres_solve(*sys.op, sys.b, tol, maxmv);
            } else if (solver_name_known(name)) {
                o = solve_by_name(name, *sys.op, sys.b, cfg);
            } else {
                std::cerr << "unknown solver '" << name << "'\n";
                return 2;
            }
            o.trace.metadata["problem"] = sys.name;
            maybe_write_trace(o, trace_path);
            report(o, sys.b, *sys.op);
            return status_code(o);
        }
        if (*seq) {
            SequenceSpec sq;
            if (!spo.problem.empty() && (spo.problem == "cdr2dd_prec" || spo.problem == "cdr2d")) {
                sq = catalog_sequence(spo.problem, spo.c1, spo.c2, spo.inv_h, tol2);
            } else {
                std::cerr << "sequence requires --problem cdr2d or cdr2dd_prec\n";
                return 2;
            }
            GmstabConfig gcfg;
            gcfg.s = seq_s;
            gcfg.tol_rel = seq_tol;
            gcfg.max_matvec = seq_maxmv;
            gcfg.rng_seed = seq_seed;
            MstabSequenceResult res = mstab_solve_sequence(sq, gcfg);
            int worst = 0;
            for (std::size_t i = 0; i < res.outcomes.size(); ++i) {
                std::cout << "system " << (i + 1) << ": ";
                report(res.outcomes[i], sq.rhs[i], *sq.op);
                worst = std::max(worst, status_code(res.outcomes[i]));
                if (!seq_trace_prefix.empty())
                    maybe_write_trace(res.outcomes[i],
                                      seq_trace_prefix + "_" + std::to_string(i + 1) + ".csv");
            }
            if (!save_recycle_stem.empty() && !res.chain.empty() && res.chain[0].valid())
                save_recycle(save_recycle_stem, res.chain[0]);
            return worst;
        }
        if (*gen) {
            if (gpo.problem.empty() || !catalog_known(gpo.problem)) {
                std::cerr << "generate requires a known --problem\n";
                return 2;
            }
            LinearSystem sys = catalog_system(gpo.problem, gpo.c1, gpo.c2, gpo.inv_h);
            const auto* cop = dynamic_cast<const CsrOperator*>(sys.op.get());
            mm_write(out_a, cop->matrix());
            if (!out_b.empty()) mm_write_vector(out_b, sys.b);
            if (!out_x.empty() && sys.x_true) mm_write_vector(out_x, *sys.x_true);
            std::cout << "wrote " << out_a << " (N=" << cop->matrix().n_rows << ")\n";
            return 0;
        }
        if (*ver) return verify_suites(suite, ver_n, ver_seed);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 2;
}

namespace {

int verify_suites(const std::string& suite, int n, std::uint64_t seed) {
    bool ok = true;
    Rng rng(seed);
    auto check = [&](const char* name, bool pass) {
        std::cout << (pass ? "[pass] " : "[FAIL] ") << name << "\n";
        ok = ok && pass;
    };
    DenseMat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = rng.normal() + (i == j ? 2.0 : 0.0);
    Vector b = rng.normal_vector(static_cast<std::size_t>(n));
    int s = 2;
    Block p = rng.normal_block(static_cast<std::size_t>(n), static_cast<std::size_t>(s));
    Blas quiet;
    qr_mgs(p, quiet);

    if (suite == "sonneveld" || suite == "all") {
        SonneveldOracle g = SonneveldOracle::start(a, b, p);
        bool dims = g.dim() == n;
        int prev = g.dim();
        bool nested = true;
        for (int j = 1; j <= 3; ++j) {
            Block before = g.basis;
            g.advance_omega(0.7 + 0.1 * j);
            nested = nested && subspace_containment(before, g.basis) < 1e-8;
            dims = dims && g.dim() == std::max(0, prev - s);
            prev = g.dim();
        }
        check("sonneveld: dimension drop s per degree", dims);
        check("sonneveld: nesting G_{j+1} in G_j", nested);
        // Lemma: A (G_j cap N(P)) stays inside G_j
        SonneveldOracle g2 = SonneveldOracle::start(a, b, p);
        g2.advance_omega(0.9);
        Block inter = intersect_nullspace(g2.basis, p);
        bool lemma = true;
        for (const Vector& v : inter) lemma = lemma && g2.distance(a * v) < 1e-8;
        check("sonneveld: A-image of the projected slice stays inside", lemma);
        // general recursion == repeated single steps
        SonneveldOracle one = SonneveldOracle::start(a, b, p);
        one.advance_omega(0.5);
        one.advance_omega(0.25);
        SonneveldOracle two = SonneveldOracle::start(a, b, p);
        two.advance(Vector{0.75, -0.125}); // (1-0.5t)(1-0.25t)
        bool lem2 = subspace_containment(one.basis, two.basis) < 1e-9 &&
                    subspace_containment(two.basis, one.basis) < 1e-9;
        check("sonneveld: ell-step recursion matches single steps", lem2);
    }
    if (suite == "mspace" || suite == "all") {
        Vector b2 = rng.normal_vector(static_cast<std::size_t>(n));
        int J = 2;
        MspaceOracle m = MspaceOracle::start(a, b, b2, p, J);
        SonneveldOracle g = SonneveldOracle::start(a, b, p);
        bool drops = true, member = true;
        int prev = m.dim();
        for (int j = 1; j <= 3; ++j) {
            double w = 0.6 + 0.1 * j;
            m.advance_omega(w);
            g.advance_omega(w);
            int expect = std::max(0, prev - (j <= J ? s - 1 : s));
            drops = drops && m.dim() == expect;
            prev = m.dim();
            if (j == J) {
                member = subspace_containment(m.basis, g.basis) < 1e-8 &&
                         m.distance(b2) < 1e-8;
            }
        }
        check("mspace: dimension drop s-1 then s", drops);
        check("mspace: G_J within M_J and b2 in M_J", member);
    }
    if (suite == "lsq" || suite == "all") {
        bool pass = true;
        for (int t = 0; t < 20; ++t) {
            DenseMat m(6, 3);
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 6; ++i) m(i, j) = rng.normal();
            Vector rhs = rng.normal_vector(6);
            Vector x1 = dense_lsq_oracle(m, rhs);
            Vector x2 = pinv_solve(m, rhs);
            for (int i = 0; i < 3; ++i)
                pass = pass && std::abs(x1[static_cast<std::size_t>(i)] - x2[static_cast<std::size_t>(i)]) < 1e-9;
        }
        check("lsq: normal-equation oracle matches pinv route", pass);
    }
    return ok ? 0 : 1;
}

} // namespace

} // namespace idrkit
