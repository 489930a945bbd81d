#include <limits>

#include "solver_common.hpp"

namespace idrkit {

namespace {

enum class StabKind { naive, ref, biortho, obio };

const char* stab_name(StabKind k) {
    switch (k) {
        case StabKind::naive: return "idrstab_naive";
        case StabKind::ref: return "idrstab_ref";
        case StabKind::biortho: return "idrstab_biortho";
        default: return "idrstab_obio";
    }
}

SolveOutcome idrstab_driver(StabKind kind, Operator& op, const Vector& b,
                            const SolverConfig& cfg) {
    int s = cfg.s;
    int ell = cfg.ell;
    SolveShell sh(op, b, stab_name(kind), cfg.rng_seed);
    Blas& blas = sh.blas;
    double tolabs = cfg.tol_rel * blas.nrm2(b);

    Vector x(b.size(), 0.0);
    Vector r0;
    double beta;
    Block p;
    // stacks[0] = V^(-1), stacks[g+1] = V^(g), g = 0..ell
    std::vector<Block> stacks(static_cast<std::size_t>(ell) + 2);
    DenseMat z;

    if (kind == StabKind::naive) {
        r0 = b;
        p = sh.rng.normal_block(b.size(), static_cast<std::size_t>(s));
        qr_mgs(p, blas);
        for (auto& st : stacks) st.assign(static_cast<std::size_t>(s), Vector());
        stacks[0][0] = b;
        stacks[1][0] = op.apply(stacks[0][0]);
        for (int q = 1; q < s; ++q) {
            stacks[0][static_cast<std::size_t>(q)] = stacks[1][static_cast<std::size_t>(q) - 1];
            stacks[1][static_cast<std::size_t>(q)] = op.apply(stacks[0][static_cast<std::size_t>(q)]);
        }
        z = block_tdot(p, stacks[1], blas);
        beta = blas.nrm2(r0);
    } else {
        InitResult init = initialisation(op, b, s, tolabs, sh.rng, blas);
        if (init.converged) {
            sh.in.trace.annotate(sh.in.pc.n_matvec, "converged_at", "init");
            return sh.take(SolveStatus::converged, BreakdownKind::none, std::move(init.x),
                           init.beta);
        }
        x = std::move(init.x);
        r0 = std::move(init.r);
        beta = init.beta;
        p = std::move(init.proj.p);
        stacks[0] = std::move(init.proj.vm1);
        stacks[1] = std::move(init.proj.v0);
        for (int g = 1; g <= ell; ++g)
            stacks[static_cast<std::size_t>(g) + 1].assign(static_cast<std::size_t>(s), Vector());
        z = std::move(init.proj.z);
    }

    std::vector<Vector> r(static_cast<std::size_t>(ell) + 1);
    r[0] = std::move(r0);
    sh.in.snapshot(beta, [&]() { return x; });
    sh.keep_best(x, beta);

    while (beta > tolabs) {
        if (sh.in.pc.n_matvec + static_cast<long long>(ell) * (s + 1) > cfg.max_matvec)
            return sh.take_best(SolveStatus::max_matvec, BreakdownKind::none);
        for (int k = 0; k <= ell - 1; ++k) {
            std::vector<Block*> kstacks;
            for (int g = -1; g <= k + 1; ++g) kstacks.push_back(&stacks[static_cast<std::size_t>(g) + 1]);
            std::vector<Vector*> rp;
            for (int g = 0; g <= k + 1; ++g) rp.push_back(&r[static_cast<std::size_t>(g)]);

            if (kind == StabKind::naive) {
                // the naive scheme biorthogonalises r^(k) up front
                Vector etak = block_tdot_vec(p, r[static_cast<std::size_t>(k)], blas);
                Vector xi = pinv_solve_scaled(z, etak);
                for (int g = 0; g <= k; ++g)
                    for (int q = 0; q < s; ++q)
                        blas.axpy(-xi[static_cast<std::size_t>(q)],
                                  stacks[static_cast<std::size_t>(g) + 1][static_cast<std::size_t>(q)],
                                  r[static_cast<std::size_t>(g)]);
                for (int q = 0; q < s; ++q)
                    blas.axpy(xi[static_cast<std::size_t>(q)], stacks[0][static_cast<std::size_t>(q)], x);
            }
            r[static_cast<std::size_t>(k) + 1] = op.apply(r[static_cast<std::size_t>(k)]);
            Vector eta = block_tdot_vec(p, r[static_cast<std::size_t>(k) + 1], blas);

            for (int q = 1; q <= s; ++q) {
                if (kind == StabKind::naive || kind == StabKind::ref) {
                    Vector xi = pinv_solve_scaled(z, eta);
                    // new column for every stack, g = -1..k
                    std::vector<Vector> fresh(static_cast<std::size_t>(k) + 2);
                    for (int g = -1; g <= k; ++g)
                        fresh[static_cast<std::size_t>(g) + 1] =
                            mixed_combo(r[static_cast<std::size_t>(g) + 1],
                                        stacks[static_cast<std::size_t>(g) + 2],
                                        stacks[static_cast<std::size_t>(g) + 1], q, xi, blas);
                    for (int g = -1; g <= k; ++g)
                        stacks[static_cast<std::size_t>(g) + 1][static_cast<std::size_t>(q) - 1] =
                            std::move(fresh[static_cast<std::size_t>(g) + 1]);
                    stacks[static_cast<std::size_t>(k) + 2][static_cast<std::size_t>(q) - 1] =
                        op.apply(stacks[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(q) - 1]);
                    z.set_col(q - 1, block_tdot_vec(p, stacks[static_cast<std::size_t>(k) + 2][static_cast<std::size_t>(q) - 1], blas));
                } else {
                    DenseMat zsub = z.block(q - 1, q - 1, s - q + 1, s - q + 1);
                    Vector esub(static_cast<std::size_t>(s - q + 1));
                    for (int i = q - 1; i < s; ++i) esub[static_cast<std::size_t>(i - q + 1)] = eta[static_cast<std::size_t>(i)];
                    Vector xi = solve_z(zsub, esub);
                    for (int g = -1; g <= k; ++g) {
                        Vector vq = r[static_cast<std::size_t>(g) + 1];
                        Block& stk = stacks[static_cast<std::size_t>(g) + 1];
                        for (int j = q - 1; j < s; ++j)
                            blas.axpy(-xi[static_cast<std::size_t>(j - q + 1)], stk[static_cast<std::size_t>(j)], vq);
                        stk[static_cast<std::size_t>(q) - 1] = std::move(vq);
                    }
                    stacks[static_cast<std::size_t>(k) + 2][static_cast<std::size_t>(q) - 1] =
                        op.apply(stacks[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(q) - 1]);
                    BioStatus vb = kind == StabKind::biortho ? it_vbio(q, p, kstacks, z, blas)
                                                             : it_vobio(q, p, kstacks, z, blas);
                    if (!vb.ok) return sh.take_best(SolveStatus::breakdown, vb.kind);
                    if (vb.lucky_collinearity)
                        return sh.take_best(SolveStatus::breakdown, BreakdownKind::pivot);
                    BioStatus rb = it_rbio(q, kstacks, z, x, rp, eta, blas);
                    if (!rb.ok) return sh.take_best(SolveStatus::breakdown, rb.kind);
                }
            }
            if (kind == StabKind::ref) {
                dir_rbio(kstacks, z, x, rp, eta, blas);
            }
        }

        beta = blas.nrm2(r[0]);
        std::vector<const Vector*> powers;
        for (int g = 0; g <= ell; ++g) powers.push_back(&r[static_cast<std::size_t>(g)]);
        StabResult sr = omega_coeffs(powers, beta, blas, cfg);
        if (!sr.annihilation && omega_breakdown(sr))
            return sh.take_best(SolveStatus::breakdown, BreakdownKind::omega_zero);
        for (int k = 1; k <= ell; ++k) blas.axpy(sr.tau[static_cast<std::size_t>(k) - 1], r[static_cast<std::size_t>(k) - 1], x);
        for (int k = 1; k <= ell; ++k) blas.axpy(-sr.tau[static_cast<std::size_t>(k) - 1], r[static_cast<std::size_t>(k)], r[0]);
        for (int q = 0; q < s; ++q)
            for (int k = 1; k <= ell; ++k)
                blas.axpy(-sr.tau[static_cast<std::size_t>(k) - 1], stacks[static_cast<std::size_t>(k)][static_cast<std::size_t>(q)],
                          stacks[0][static_cast<std::size_t>(q)]);
        for (int q = 0; q < s; ++q)
            for (int k = 1; k <= ell; ++k)
                blas.axpy(-sr.tau[static_cast<std::size_t>(k) - 1], stacks[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(q)],
                          stacks[1][static_cast<std::size_t>(q)]);

        if (cfg.z_treatment && kind == StabKind::ref) {
            z = block_tdot(p, stacks[1], blas); // recompute instead of -tau_ell scaling
        } else if (cfg.z_treatment && (kind == StabKind::biortho || kind == StabKind::obio)) {
            std::vector<Block*> base = {&stacks[0], &stacks[1]};
            for (int q = 1; q <= s; ++q) {
                BioStatus vb = kind == StabKind::biortho ? it_vbio(q, p, base, z, blas)
                                                         : it_vobio(q, p, base, z, blas);
                if (!vb.ok) return sh.take_best(SolveStatus::breakdown, vb.kind);
                if (vb.lucky_collinearity)
                    return sh.take_best(SolveStatus::breakdown, BreakdownKind::pivot);
            }
        } else {
            z = -sr.tau.back() * z;
        }

        beta = blas.nrm2(r[0]);
        sh.in.trace.annotate(sh.in.pc.n_matvec, "poly", "", sr.tau);
        sh.in.snapshot(beta, [&]() { return x; });
        sh.keep_best(x, beta);
        if (!all_finite(r[0])) return sh.take_best(SolveStatus::breakdown, BreakdownKind::nonfinite);
    }
    return sh.take(SolveStatus::converged, BreakdownKind::none, std::move(x), beta);
}

} // namespace

SolveOutcome idrstab_naive(Operator& op, const Vector& b, const SolverConfig& cfg) {
    return idrstab_driver(StabKind::naive, op, b, cfg);
}
SolveOutcome idrstab_ref(Operator& op, const Vector& b, const SolverConfig& cfg) {
    return idrstab_driver(StabKind::ref, op, b, cfg);
}
SolveOutcome idrstab_biortho(Operator& op, const Vector& b, const SolverConfig& cfg) {
    return idrstab_driver(StabKind::biortho, op, b, cfg);
}
SolveOutcome idrstab_obio(Operator& op, const Vector& b, const SolverConfig& cfg) {
    return idrstab_driver(StabKind::obio, op, b, cfg);
}

} // namespace idrkit
