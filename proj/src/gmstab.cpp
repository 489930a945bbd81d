#include <limits>

#include "idrkit/gmstab.hpp"

namespace idrkit {

namespace {

Vector padded(const Vector& v, std::size_t len) {
    Vector out(len, 0.0);
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

DenseMat pad_rows(const DenseMat& A, int extra) {
    DenseMat out(A.rows() + extra, A.cols());
    out.set_block(0, 0, A);
    return out;
}

// R^{-1} column by column, pseudo-inverse when the triangle collapsed.
DenseMat tri_inverse_or_pinv(const DenseMat& R, bool* deficient) {
    int n = R.rows();
    double dmax = R.max_abs();
    for (int i = 0; i < n; ++i)
        if (std::abs(R(i, i)) <= kRankTol * std::max(dmax, 1e-300)) {
            if (deficient) *deficient = true;
            return pinv(R);
        }
    DenseMat inv(n, n);
    for (int j = 0; j < n; ++j) {
        Vector e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(j)] = 1.0;
        inv.set_col(j, solve_upper(R, e));
    }
    return inv;
}

DenseMat solve_z_mat(const DenseMat& z, const DenseMat& M, bool* deficient = nullptr) {
    DenseMat out(z.cols(), M.cols());
    for (int j = 0; j < M.cols(); ++j) out.set_col(j, solve_z(z, M.col(j), deficient));
    return out;
}

} // namespace

CycleResult gmstab1_cycle(Operator& op, GmstabState& st, double tolabs, const Blas& blas,
                          const GmstabConfig& cfg, const InnerHook& hook) {
    CycleResult res;
    int s = st.proj.s();
    std::size_t su = static_cast<std::size_t>(s);

    // ---- 1) move the residual one Sonneveld degree ahead
    Vector r1 = op.apply(st.r);
    std::vector<const Vector*> powers = {&st.r, &r1};
    StabResult sr = stab_coeffs(powers, st.beta, blas, OmegaStrategy::stab_coeffs, cfg.alpha,
                                cfg.delta_variant);
    res.stab = sr;
    double tau = sr.tau[0];
    blas.axpy(tau, st.r, st.x);
    blas.axpy(-tau, r1, st.r);
    st.beta = sr.beta_new;
    if (st.beta <= tolabs) {
        res.outcome = CycleOutcome::converged;
        res.converged_site = "step1";
        return res;
    }
    if (tau == 0.0) {
        res.outcome = CycleOutcome::breakdown;
        res.kind = BreakdownKind::omega_zero;
        return res;
    }

    // ---- 2) modify the projector: V^(-1) := (1/tau V^(-1) - V^(0)) R_F^+ Q_Z
    // V^(0) is orthonormal, so the triangular factor of [V^(0), V^(-1)] only
    // needs Gram data; an explicit MGS pass is the fallback when the
    // Cholesky pivot collapses.
    DenseMat C = block_tdot(st.proj.v0, st.proj.vm1, blas);
    DenseMat G = block_gram(st.proj.vm1, blas);
    DenseMat S = G - C.transposed() * C;
    CholResult ch = cholesky(S);
    DenseMat R;
    if (ch.ok) {
        R = ch.r;
    } else {
        Block tail = st.proj.vm1;
        SplitQr sq = qr_against(st.proj.v0, tail, blas);
        C = sq.c;
        R = sq.r;
    }
    DenseMat F(2 * s, s);
    for (int j = 0; j < s; ++j) {
        for (int i = 0; i < s; ++i) F(i, j) = C(i, j) / tau - (i == j ? 1.0 : 0.0);
        for (int i = 0; i < s; ++i) F(s + i, j) = R(i, j) / tau;
    }
    QrSmall qf = qr_mgs(F);
    res.deficiency = qf.rank_deficient;
    DenseMat rf_inv = tri_inverse_or_pinv(qf.r, &res.deficiency);
    DenseMat z1 = -1.0 * (st.proj.z * rf_inv);
    LqSmall zl = lq(z1);
    if (zl.rank_deficient) res.deficiency = true;
    DenseMat M = rf_inv * zl.q; // the same gauge applied to Z and V^(-1)
    st.proj.z = z1 * zl.q;      // = -Z R_F^+ Q_Z, lower triangular
    {
        Block vm1_new = zeros_block(st.x.size(), su);
        for (int j = 0; j < s; ++j) {
            Vector& col = vm1_new[static_cast<std::size_t>(j)];
            for (int i = 0; i < s; ++i) {
                blas.axpy(M(i, j) / tau, st.proj.vm1[static_cast<std::size_t>(i)], col);
                blas.axpy(-M(i, j), st.proj.v0[static_cast<std::size_t>(i)], col);
            }
        }
        st.proj.vm1 = std::move(vm1_new);
    }

    // ---- 3) new basis vectors from the projected Arnoldi sweep
    GmresResult g = pgmres_m(op, st.proj.p, st.proj.z, st.proj.vm1, st.x, st.r, st.beta, s,
                             tolabs, blas, hook);
    res.gamma_history = g.gamma_history;
    if (g.converged) {
        st.x = std::move(g.x);
        st.beta = g.beta;
        res.outcome = CycleOutcome::converged;
        res.converged_site = "pgmres";
        return res;
    }

    // ---- 4) biorthogonalise the residual in W coordinates
    const Block& W = g.bundle.w;       // s+1 columns
    const DenseMat& Y = g.bundle.y;    // s x (s+1)
    const DenseMat& H = g.bundle.h;    // (s+1) x s
    const DenseMat& Qh = g.bundle.q_h; // (s+1) x s
    const DenseMat& Rh = g.bundle.r_h; // s x s
    double beta = st.beta;
    Vector eta(su);
    for (int i = 0; i < s; ++i) eta[static_cast<std::size_t>(i)] = beta * Y(i, 0);
    LqSmall z2 = lq(Y * Qh);
    if (z2.rank_deficient) res.deficiency = true;
    Vector t = solve_z(z2.l, eta, &res.deficiency);
    Vector u = z2.q * t;
    DenseMat rh_inv = tri_inverse_or_pinv(Rh, &res.deficiency);
    Vector xi = rh_inv * u;

    Vector ysum(su, 0.0);
    for (int i = 0; i < s; ++i)
        for (int k = 0; k < s; ++k)
            ysum[static_cast<std::size_t>(i)] += Y(i, k) * xi[static_cast<std::size_t>(k)];
    Vector u2 = solve_z(st.proj.z, ysum, &res.deficiency);
    for (int k = 0; k < s; ++k) blas.axpy(xi[static_cast<std::size_t>(k)], W[static_cast<std::size_t>(k)], st.x);
    for (int q = 0; q < s; ++q) blas.axpy(-u2[static_cast<std::size_t>(q)], st.proj.vm1[static_cast<std::size_t>(q)], st.x);

    Vector c0(su + 1, 0.0);
    {
        Vector hxi = H * xi;
        c0[0] = beta - hxi[0];
        for (int i = 1; i <= s; ++i) c0[static_cast<std::size_t>(i)] = -hxi[static_cast<std::size_t>(i)];
    }
    {
        Blas quiet;
        st.beta = quiet.nrm2(c0);
    }

    // ---- 5) next projector pair; both parts are rebuilt from W and the
    // current V^(-1), so the entry decoupling does not propagate
    DenseMat M1 = rh_inv * z2.q;
    DenseMat N1 = solve_z_mat(st.proj.z, Y.block(0, 0, s, s) * M1, &res.deficiency);
    Block vm1_next = zeros_block(st.x.size(), su);
    for (int j = 0; j < s; ++j) {
        Vector& col = vm1_next[static_cast<std::size_t>(j)];
        for (int i = 0; i < s; ++i) blas.axpy(M1(i, j), W[static_cast<std::size_t>(i)], col);
        for (int i = 0; i < s; ++i) blas.axpy(-N1(i, j), st.proj.vm1[static_cast<std::size_t>(i)], col);
    }
    Block v0_next = block_mul(W, Qh * z2.q, blas);
    st.r = block_mul_vec(W, c0, blas);
    st.proj.vm1 = std::move(vm1_next);
    st.proj.v0 = std::move(v0_next);
    st.proj.z = z2.l;
    return res;
}

CycleResult gmstab2_cycle(Operator& op, GmstabState& st, double tolabs, const Blas& blas,
                          const GmstabConfig& cfg, const InnerHook& hook) {
    CycleResult res;
    int s = st.proj.s();
    std::size_t su = static_cast<std::size_t>(s);
    int m = 2 * s + 2;

    // ---- 1) augmented Arnoldi sweep into the storage of the old stacks
    GmresResult g = auggmres_m(op, st.proj.p, st.proj.z, st.proj.vm1, st.proj.v0, st.x, st.r,
                               st.beta, m, tolabs, blas, hook);
    res.gamma_history = g.gamma_history;
    if (g.converged) {
        st.x = std::move(g.x);
        st.beta = g.beta;
        res.outcome = CycleOutcome::converged;
        res.converged_site = "auggmres";
        return res;
    }
    const Block& W = g.bundle.w;      // 2s+3 columns
    const DenseMat& Hhh = g.bundle.h; // (2s+3) x (2s+2)
    const DenseMat& Y = g.bundle.y;   // s x (2s+2)
    DenseMat H = Hhh.block(0, 0, 2 * s + 1, 2 * s);
    DenseMat Hh = Hhh.block(0, 0, 2 * s + 2, 2 * s + 1);
    DenseMat Qh = g.bundle.q_h.block(0, 0, 2 * s + 1, 2 * s);
    DenseMat Rh = g.bundle.r_h.block(0, 0, 2 * s, 2 * s);

    // ---- 2) biorthogonalisation coefficients: Y c^(0) = 0 and Y c^(1) = 0,
    // with row-orthonormalised Y blocks for the stacked system
    Vector gamma(static_cast<std::size_t>(2 * s + 1), 0.0);
    gamma[0] = st.beta;
    OrthResult qy = roworth(Y.block(0, 0, s, 2 * s + 1));
    OrthResult qyh = roworth(Y.block(0, 0, s, 2 * s + 2));
    res.deficiency = qy.rank_deficient || qyh.rank_deficient;
    DenseMat Msys(2 * s, 2 * s);
    Msys.set_block(0, 0, qy.q * Qh);
    Msys.set_block(s, 0, qyh.q * (Hh * Qh));
    Vector rhs(static_cast<std::size_t>(2 * s));
    {
        Vector top = qy.q * gamma;
        Vector bot = qyh.q * (Hh * gamma);
        for (int i = 0; i < s; ++i) {
            rhs[static_cast<std::size_t>(i)] = top[static_cast<std::size_t>(i)];
            rhs[static_cast<std::size_t>(s + i)] = bot[static_cast<std::size_t>(i)];
        }
    }
    Vector wsol = pinv_solve(Msys, rhs);
    DenseMat rh_inv = tri_inverse_or_pinv(Rh, &res.deficiency);
    Vector xi = rh_inv * wsol;

    Vector c0 = gamma;
    {
        Vector hxi = H * xi;
        for (int i = 0; i <= 2 * s; ++i) c0[static_cast<std::size_t>(i)] -= hxi[static_cast<std::size_t>(i)];
    }
    Vector c1 = Hh * c0;
    Vector c2 = Hhh * c1;
    double beta0;
    {
        Blas quiet;
        beta0 = quiet.nrm2(c0);
    }

    // ---- 3) polynomial step computed on the coefficient vectors
    std::vector<Vector> cpow = {padded(c0, static_cast<std::size_t>(2 * s + 3)),
                                padded(c1, static_cast<std::size_t>(2 * s + 3)), c2};
    StabResult sr = stab_coeffs_small(cpow, beta0, OmegaStrategy::stab_coeffs, cfg.alpha,
                                      cfg.delta_variant);
    res.stab = sr;
    double tau1 = sr.tau[0], tau2 = sr.tau[1];
    {
        Vector coef = padded(xi, static_cast<std::size_t>(2 * s + 2));
        for (int i = 0; i <= 2 * s; ++i) coef[static_cast<std::size_t>(i)] += tau1 * c0[static_cast<std::size_t>(i)];
        for (int i = 0; i < 2 * s + 2; ++i) coef[static_cast<std::size_t>(i)] += tau2 * c1[static_cast<std::size_t>(i)];
        for (int k = 0; k < 2 * s + 2; ++k)
            blas.axpy(coef[static_cast<std::size_t>(k)], W[static_cast<std::size_t>(k)], st.x);
        Vector ysum(su, 0.0);
        for (int i = 0; i < s; ++i)
            for (int k = 0; k < 2 * s; ++k)
                ysum[static_cast<std::size_t>(i)] += Y(i, k) * xi[static_cast<std::size_t>(k)];
        Vector u = solve_z(st.proj.z, ysum, &res.deficiency);
        for (int q = 0; q < s; ++q)
            blas.axpy(-u[static_cast<std::size_t>(q)], st.proj.vm1[static_cast<std::size_t>(q)], st.x);
    }
    // updated residual before any projector mutation: on gauge rank loss the
    // state keeps consistent (x, r) plus the old projectors
    {
        Vector cr = padded(c0, static_cast<std::size_t>(2 * s + 3));
        for (int i = 0; i < 2 * s + 2; ++i) cr[static_cast<std::size_t>(i)] -= tau1 * c1[static_cast<std::size_t>(i)];
        for (int i = 0; i < 2 * s + 3; ++i) cr[static_cast<std::size_t>(i)] -= tau2 * c2[static_cast<std::size_t>(i)];
        st.r = block_mul_vec(W, cr, blas);
    }
    st.beta = sr.beta_new;
    if (st.beta <= tolabs) {
        res.outcome = CycleOutcome::converged;
        res.converged_site = "step3";
        return res;
    }

    // ---- 4) gauge construction: G = Q_G R_F^+ Q_Z
    OrthResult qg = nullbasis((qy.q * H).transposed());
    if (qg.rank_deficient) {
        res.outcome = CycleOutcome::gauge_deficient;
        res.kind = BreakdownKind::deficiency;
        return res;
    }
    Block v0_tail = st.proj.v0;
    SplitQr sw = qr_against(W, v0_tail, blas); // [W, V^(0)] = Q_W R_W, W untouched
    DenseMat Rw(3 * s + 3, 3 * s + 3);
    for (int i = 0; i < 2 * s + 3; ++i) Rw(i, i) = 1.0;
    Rw.set_block(0, 2 * s + 3, sw.c);
    Rw.set_block(2 * s + 3, 2 * s + 3, sw.r);

    DenseMat HhH = Hh * H;                                // (2s+2) x 2s
    DenseMat ZiY = solve_z_mat(st.proj.z, Y, &res.deficiency); // s x (2s+2)
    DenseMat Cmat(3 * s + 3, 2 * s);
    {
        DenseMat b1 = pad_rows(H, 2);      // (2s+3) x 2s
        DenseMat b2 = pad_rows(Hh, 1) * H; // (2s+3) x 2s
        DenseMat b3top = Hhh * HhH;        // (2s+3) x 2s
        DenseMat b3bot = ZiY * HhH;        // s x 2s
        for (int j = 0; j < 2 * s; ++j) {
            for (int i = 0; i < 2 * s + 3; ++i)
                Cmat(i, j) = b1(i, j) - tau1 * b2(i, j) - tau2 * b3top(i, j);
            for (int i = 0; i < s; ++i) Cmat(2 * s + 3 + i, j) = -tau2 * b3bot(i, j);
        }
    }
    DenseMat F = Rw * (Cmat * qg.q); // (3s+3) x s
    QrSmall qf = qr_mgs(F);
    if (qf.rank_deficient) {
        res.outcome = CycleOutcome::gauge_deficient;
        res.kind = BreakdownKind::deficiency;
        return res;
    }
    bool rf_def = false;
    DenseMat rf_inv = tri_inverse_or_pinv(qf.r, &rf_def);
    if (rf_def) {
        res.outcome = CycleOutcome::gauge_deficient;
        res.kind = BreakdownKind::deficiency;
        return res;
    }
    DenseMat T = qg.q * rf_inv;                   // 2s x s
    DenseMat zraw = -tau2 * (Y * (Hh * (H * T))); // s x s
    LqSmall zl = lq(zraw);
    if (zl.rank_deficient) {
        res.outcome = CycleOutcome::gauge_deficient;
        res.kind = BreakdownKind::deficiency;
        return res;
    }

    // V^(-1) coefficients over [W_{:,1:(2s+2)}, V^(-1)]
    DenseMat Kv(3 * s + 2, 2 * s);
    for (int j = 0; j < 2 * s; ++j) {
        for (int i = 0; i < 2 * s + 2; ++i) {
            double v = (i == j ? 1.0 : 0.0);
            if (i < 2 * s + 1) v -= tau1 * H(i, j);
            v -= tau2 * HhH(i, j);
            Kv(i, j) = v;
        }
        for (int i = 0; i < s; ++i) Kv(2 * s + 2 + i, j) = -ZiY(i, j);
    }
    DenseMat Mv = Kv * (qg.q * (rf_inv * zl.q)); // (3s+2) x s
    Block vm1_next = zeros_block(st.x.size(), su);
    for (int j = 0; j < s; ++j) {
        Vector& col = vm1_next[static_cast<std::size_t>(j)];
        for (int i = 0; i < 2 * s + 2; ++i) blas.axpy(Mv(i, j), W[static_cast<std::size_t>(i)], col);
        for (int i = 0; i < s; ++i)
            blas.axpy(Mv(2 * s + 2 + i, j), st.proj.vm1[static_cast<std::size_t>(i)], col);
    }
    DenseMat Mq = qf.q * zl.q; // (3s+3) x s
    Block v0_next = zeros_block(st.x.size(), su);
    for (int j = 0; j < s; ++j) {
        Vector& col = v0_next[static_cast<std::size_t>(j)];
        for (int i = 0; i < 2 * s + 3; ++i) blas.axpy(Mq(i, j), W[static_cast<std::size_t>(i)], col);
        for (int i = 0; i < s; ++i)
            blas.axpy(Mq(2 * s + 3 + i, j), v0_tail[static_cast<std::size_t>(i)], col);
    }
    st.proj.vm1 = std::move(vm1_next);
    st.proj.v0 = std::move(v0_next);
    st.proj.z = zl.l;
    return res;
}

SolveOutcome gmstab_solve_with_init(Operator& op, const Vector& b, const Vector& x0,
                                    const GmstabConfig& cfg, const GmstabHooks* hooks,
                                    const InitProvider& provider) {
    Instrument in(op, b);
    Blas blas{&in.pc};
    Rng rng(cfg.rng_seed);
    SolveOutcome out;
    out.trace.metadata["solver"] = "gmstab";
    out.trace.metadata["seed"] = std::to_string(cfg.rng_seed);
    out.trace.metadata["rng"] = Rng::identity();
    in.start();

    double tolabs = cfg.tol_rel * blas.nrm2(b);
    Vector x_global = x0;
    Vector b_local = b;
    {
        bool zero_guess = true;
        for (double v : x0)
            if (v != 0.0) {
                zero_guess = false;
                break;
            }
        if (!zero_guess) {
            Vector ax = op.apply(x0);
            blas.axpy(-1.0, ax, b_local);
        }
    }

    GmstabState st;
    InnerHook inner = [&](int, double gbeta, const std::function<Vector()>& mk) {
        in.snapshot(gbeta, [&]() {
            Blas quiet;
            Vector x = x_global;
            quiet.axpy(1.0, mk(), x);
            return x;
        });
    };

    InitResult init = provider ? provider(op, b_local, tolabs, rng, blas, inner)
                               : initialisation(op, b_local, cfg.s, tolabs, rng, blas, inner);
    if (init.converged) {
        Vector x = x_global;
        blas.axpy(1.0, init.x, x);
        in.trace.annotate(in.pc.n_matvec, "converged_at", "init");
        in.snapshot(init.beta, [&]() { return x; });
        out.status = SolveStatus::converged;
        out.x = std::move(x);
        out.final_beta = init.beta;
        in.finish();
        out.trace = std::move(in.trace);
        return out;
    }
    st.proj = std::move(init.proj);
    st.x = std::move(init.x);
    st.r = std::move(init.r);
    st.beta = init.beta;

    double beta_local = blas.nrm2(b_local);
    double beta_max = std::max(st.beta, beta_local);
    int n2 = 0;
    int cycle_index = 0;
    Vector x_best;
    double beta_best = std::numeric_limits<double>::infinity();

    auto global_x = [&]() {
        Blas quiet;
        Vector x = x_global;
        quiet.axpy(1.0, st.x, x);
        return x;
    };
    auto keep_best = [&]() {
        if (st.beta < beta_best) {
            beta_best = st.beta;
            x_best = global_x();
        }
    };
    in.snapshot(st.beta, global_x);
    keep_best();

    auto bail = [&](SolveStatus stt, BreakdownKind k) {
        out.status = stt;
        out.breakdown = k;
        if (k != BreakdownKind::none)
            in.trace.annotate(in.pc.n_matvec, "breakdown", to_string(k));
        out.x = std::move(x_best);
        out.final_beta = beta_best;
        in.finish();
        out.trace = std::move(in.trace);
        return std::move(out);
    };

    while (st.beta > tolabs) {
        // entry orthogonality guard: cycles assume r perp P; re-biorthogonalise
        // if drift ever exceeds 1e-8 * beta
        {
            Vector eta = block_tdot_vec(st.proj.p, st.r, blas);
            double drift = 0.0;
            for (double e : eta) drift = std::max(drift, std::abs(e));
            if (drift > 1e-8 * st.beta) {
                std::vector<Block*> stacks = {&st.proj.vm1, &st.proj.v0};
                std::vector<Vector*> rp = {&st.r};
                dir_rbio(stacks, st.proj.z, st.x, rp, eta, blas);
                st.beta = blas.nrm2(st.r);
                in.trace.annotate(in.pc.n_matvec, "entry_rebio");
            }
        }

        // ---- 1) plan flying restart and cycle type
        bool t_restart = st.beta <= cfg.c_restart * beta_local;
        bool t_replace = false;
        if (!t_restart) {
            if (st.beta < cfg.c_recompute * beta_max) t_replace = true;
            else beta_max = std::max(st.beta, beta_max);
        }
        int ell = (t_restart || t_replace || n2 >= cfg.max_consecutive_ell2) ? 1 : 2;
        long long cost = (ell == 1 ? cfg.s + 1 : 2 * (cfg.s + 1)) +
                         ((t_restart || t_replace) ? 1 : 0);
        if (in.pc.n_matvec + cost > cfg.max_matvec)
            return bail(SolveStatus::max_matvec, BreakdownKind::none);

        // ---- 2) perform the cycle
        CycleResult cr;
        if (ell == 1) {
            cr = gmstab1_cycle(op, st, tolabs, blas, cfg, inner);
            n2 = 0;
        } else {
            cr = gmstab2_cycle(op, st, tolabs, blas, cfg, inner);
            if (cr.outcome == CycleOutcome::gauge_deficient) {
                in.trace.annotate(in.pc.n_matvec, "fallback", "gmstab2 gauge deficiency");
                ell = 1;
                cr = gmstab1_cycle(op, st, tolabs, blas, cfg, inner);
                n2 = 0;
            } else {
                ++n2;
            }
        }
        in.trace.annotate(in.pc.n_matvec, "cycle", "ell=" + std::to_string(ell), cr.stab.tau);
        if (cr.outcome == CycleOutcome::converged) {
            in.trace.annotate(in.pc.n_matvec, "converged_at", cr.converged_site);
            in.snapshot(st.beta, global_x);
            if (hooks && hooks->after_cycle) hooks->after_cycle(cycle_index, ell, st, cr);
            out.status = SolveStatus::converged;
            out.x = global_x();
            out.final_beta = st.beta;
            in.finish();
            out.trace = std::move(in.trace);
            return out;
        }
        if (cr.outcome == CycleOutcome::breakdown) return bail(SolveStatus::breakdown, cr.kind);

        // ---- 3) flying restart / residual recomputation
        if (t_restart || t_replace) {
            Vector ax = op.apply(st.x);
            st.r = b_local;
            blas.axpy(-1.0, ax, st.r);
            Vector eta = block_tdot_vec(st.proj.p, st.r, blas);
            std::vector<Block*> stacks = {&st.proj.vm1, &st.proj.v0};
            std::vector<Vector*> rp = {&st.r};
            dir_rbio(stacks, st.proj.z, st.x, rp, eta, blas);
            st.beta = blas.nrm2(st.r);
            beta_max = st.beta;
            in.trace.annotate(in.pc.n_matvec, "replace");
        }
        if (t_restart) {
            b_local = st.r;
            blas.axpy(1.0, st.x, x_global);
            std::fill(st.x.begin(), st.x.end(), 0.0);
            beta_local = st.beta;
            in.trace.annotate(in.pc.n_matvec, "restart");
        }
        in.snapshot(st.beta, global_x);
        keep_best();
        if (hooks && hooks->after_cycle) hooks->after_cycle(cycle_index, ell, st, cr);
        if (hooks && hooks->after_restart && (t_restart || t_replace))
            hooks->after_restart(cycle_index, st);
        if (!all_finite(st.r)) return bail(SolveStatus::breakdown, BreakdownKind::nonfinite);
        ++cycle_index;
    }
    out.status = SolveStatus::converged;
    out.x = global_x();
    out.final_beta = st.beta;
    in.finish();
    out.trace = std::move(in.trace);
    return out;
}

SolveOutcome gmstab_solve(Operator& op, const Vector& b, const Vector& x0,
                          const GmstabConfig& cfg, const GmstabHooks* hooks) {
    return gmstab_solve_with_init(op, b, x0, cfg, hooks, nullptr);
}

} // namespace idrkit
