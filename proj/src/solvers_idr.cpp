#include <limits>

#include "solver_common.hpp"

namespace idrkit {

// Self-contained basis buildup, kept as a test reference.
SolveOutcome idr_naive(Operator& op, const Vector& b, const SolverConfig& cfg) {
    int s = cfg.s;
    SolveShell sh(op, b, "idr_naive", cfg.rng_seed);
    Blas& blas = sh.blas;
    double tolabs = cfg.tol_rel * blas.nrm2(b);

    Vector r0 = b;
    Vector x(b.size(), 0.0);
    Block p = sh.rng.normal_block(b.size(), static_cast<std::size_t>(s));
    qr_mgs(p, blas);
    Block vm1(static_cast<std::size_t>(s)), v0(static_cast<std::size_t>(s)),
        v1(static_cast<std::size_t>(s));
    vm1[0] = b;
    v0[0] = op.apply(vm1[0]);
    for (int q = 1; q < s; ++q) {
        vm1[static_cast<std::size_t>(q)] = v0[static_cast<std::size_t>(q) - 1];
        v0[static_cast<std::size_t>(q)] = op.apply(vm1[static_cast<std::size_t>(q)]);
    }
    DenseMat z = block_tdot(p, v0, blas);
    double beta = blas.nrm2(r0);
    sh.in.snapshot(beta, [&]() { return x; });
    sh.keep_best(x, beta);

    while (beta > tolabs) {
        if (sh.in.pc.n_matvec + s + 1 > cfg.max_matvec)
            return sh.take_best(SolveStatus::max_matvec, BreakdownKind::none);
        Vector eta = block_tdot_vec(p, r0, blas);
        Vector xi = pinv_solve_scaled(z, eta);
        for (int q = 0; q < s; ++q) blas.axpy(-xi[static_cast<std::size_t>(q)], v0[static_cast<std::size_t>(q)], r0);
        for (int q = 0; q < s; ++q) blas.axpy(xi[static_cast<std::size_t>(q)], vm1[static_cast<std::size_t>(q)], x);
        Vector r1 = op.apply(r0);
        Vector eta1 = block_tdot_vec(p, r1, blas);
        for (int q = 1; q <= s; ++q) {
            xi = pinv_solve_scaled(z, eta1);
            Vector v0q = mixed_combo(r1, v1, v0, q, xi, blas);
            Vector vm1q = mixed_combo(r0, v0, vm1, q, xi, blas);
            v0[static_cast<std::size_t>(q) - 1] = std::move(v0q);
            vm1[static_cast<std::size_t>(q) - 1] = std::move(vm1q);
            v1[static_cast<std::size_t>(q) - 1] = op.apply(v0[static_cast<std::size_t>(q) - 1]);
            Vector zq = block_tdot_vec(p, v1[static_cast<std::size_t>(q) - 1], blas);
            z.set_col(q - 1, zq);
        }
        std::vector<const Vector*> powers = {&r0, &r1};
        StabResult sr = omega_coeffs(powers, blas.nrm2(r0), blas, cfg);
        if (!sr.annihilation && omega_breakdown(sr))
            return sh.take_best(SolveStatus::breakdown, BreakdownKind::omega_zero);
        double tau = sr.tau[0];
        blas.axpy(tau, r0, x);
        blas.axpy(-tau, r1, r0);
        for (int q = 0; q < s; ++q) blas.axpy(-tau, v0[static_cast<std::size_t>(q)], vm1[static_cast<std::size_t>(q)]);
        for (int q = 0; q < s; ++q) blas.axpy(-tau, v1[static_cast<std::size_t>(q)], v0[static_cast<std::size_t>(q)]);
        z = -tau * z;
        beta = blas.nrm2(r0);
        sh.in.trace.annotate(sh.in.pc.n_matvec, "poly", "", {tau});
        sh.in.snapshot(beta, [&]() { return x; });
        sh.keep_best(x, beta);
        if (!all_finite(r0)) return sh.take_best(SolveStatus::breakdown, BreakdownKind::nonfinite);
    }
    return sh.take(SolveStatus::converged, BreakdownKind::none, std::move(x), beta);
}

namespace {

// Shared driver for the reference (Alg.-9-style) and decoupling-free
// variants; they differ only in how the new auxiliary column is generated.
enum class IdrKind { ref, nodec, biortho, obio };

SolveOutcome idr_driver(IdrKind kind, Operator& op, const Vector& b, const SolverConfig& cfg) {
    int s = cfg.s;
    const char* name = kind == IdrKind::ref ? "idr_ref"
                       : kind == IdrKind::nodec ? "idr_nodec"
                       : kind == IdrKind::biortho ? "idr_biortho"
                                                  : "idr_obio";
    SolveShell sh(op, b, name, cfg.rng_seed);
    Blas& blas = sh.blas;
    double tolabs = cfg.tol_rel * blas.nrm2(b);

    InitResult init = initialisation(op, b, s, tolabs, sh.rng, blas);
    if (init.converged) {
        sh.in.trace.annotate(sh.in.pc.n_matvec, "converged_at", "init");
        return sh.take(SolveStatus::converged, BreakdownKind::none, std::move(init.x), init.beta);
    }
    Vector x = std::move(init.x);
    Vector r0 = std::move(init.r);
    double beta = init.beta;
    Block p = std::move(init.proj.p);
    Block vm1 = std::move(init.proj.vm1);
    Block v0 = std::move(init.proj.v0);
    DenseMat z = std::move(init.proj.z);
    Block v1;
    if (kind == IdrKind::ref) v1.assign(static_cast<std::size_t>(s), Vector());

    sh.in.snapshot(beta, [&]() { return x; });
    sh.keep_best(x, beta);

    while (beta > tolabs) {
        if (sh.in.pc.n_matvec + s + 1 > cfg.max_matvec)
            return sh.take_best(SolveStatus::max_matvec, BreakdownKind::none);
        Vector r1 = op.apply(r0);
        std::vector<const Vector*> powers = {&r0, &r1};

        if (kind == IdrKind::ref) {
            Vector eta = block_tdot_vec(p, r1, blas);
            StabResult sr = omega_coeffs(powers, beta, blas, cfg);
            if (!sr.annihilation && omega_breakdown(sr))
                return sh.take_best(SolveStatus::breakdown, BreakdownKind::omega_zero);
            double tau = sr.tau[0];
            for (int q = 1; q <= s; ++q) {
                Vector xi = pinv_solve_scaled(z, eta);
                Vector vm1q = mixed_combo(r0, v0, vm1, q, xi, blas);
                Vector v0q = mixed_combo(r1, v1, v0, q, xi, blas);
                vm1[static_cast<std::size_t>(q) - 1] = std::move(vm1q);
                v0[static_cast<std::size_t>(q) - 1] = std::move(v0q);
                v1[static_cast<std::size_t>(q) - 1] = op.apply(v0[static_cast<std::size_t>(q) - 1]);
                z.set_col(q - 1, block_tdot_vec(p, v1[static_cast<std::size_t>(q) - 1], blas));
            }
            blas.axpy(tau, r0, x);
            blas.axpy(-tau, r1, r0);
            for (int q = 0; q < s; ++q) blas.axpy(-tau, v0[static_cast<std::size_t>(q)], vm1[static_cast<std::size_t>(q)]);
            for (int q = 0; q < s; ++q) blas.axpy(-tau, v1[static_cast<std::size_t>(q)], v0[static_cast<std::size_t>(q)]);
            z = -tau * z;
            for (double& e : eta) e *= -tau;
            std::vector<Block*> stacks = {&vm1, &v0};
            std::vector<Vector*> rp = {&r0};
            dir_rbio(stacks, z, x, rp, eta, blas);
            beta = blas.nrm2(r0);
            sh.in.trace.annotate(sh.in.pc.n_matvec, "poly", "", {tau});
        } else if (kind == IdrKind::nodec) {
            StabResult sr = omega_coeffs(powers, beta, blas, cfg);
            if (!sr.annihilation && omega_breakdown(sr))
                return sh.take_best(SolveStatus::breakdown, BreakdownKind::omega_zero);
            double tau = sr.tau[0];
            blas.axpy(tau, r0, x);
            blas.axpy(-tau, r1, r0);
            Vector eta = block_tdot_vec(p, r0, blas);
            for (int q = 1; q <= s; ++q) {
                Vector xi = pinv_solve_scaled(z, eta);
                // v_q^(-1) := V^(-1) xi + tau (r^(0) - V^(0) xi), cf. the
                // decoupling-free auxiliary-vector recursion
                Vector vq(b.size(), 0.0);
                blas.axpy(tau, r0, vq);
                for (int j = 0; j < s; ++j) {
                    double c = xi[static_cast<std::size_t>(j)];
                    blas.axpy(-tau * c, v0[static_cast<std::size_t>(j)], vq);
                    blas.axpy(c, vm1[static_cast<std::size_t>(j)], vq);
                }
                vm1[static_cast<std::size_t>(q) - 1] = std::move(vq);
                v0[static_cast<std::size_t>(q) - 1] = op.apply(vm1[static_cast<std::size_t>(q) - 1]);
                z.set_col(q - 1, block_tdot_vec(p, v0[static_cast<std::size_t>(q) - 1], blas));
            }
            std::vector<Block*> stacks = {&vm1, &v0};
            std::vector<Vector*> rp = {&r0};
            dir_rbio(stacks, z, x, rp, eta, blas);
            beta = blas.nrm2(r0);
            sh.in.trace.annotate(sh.in.pc.n_matvec, "poly", "", {tau});
        } else {
            // biortho / obio: iterative biorthogonalisation keeps Z lower
            // triangular (and V^(0) orthonormal for obio)
            StabResult sr = omega_coeffs(powers, beta, blas, cfg);
            if (!sr.annihilation && omega_breakdown(sr))
                return sh.take_best(SolveStatus::breakdown, BreakdownKind::omega_zero);
            double tau = sr.tau[0];
            blas.axpy(tau, r0, x);
            blas.axpy(-tau, r1, r0);
            Vector eta = block_tdot_vec(p, r0, blas);
            std::vector<Block*> stacks = {&vm1, &v0};
            std::vector<Vector*> rp = {&r0};
            for (int q = 1; q <= s; ++q) {
                DenseMat zsub = z.block(q - 1, q - 1, s - q + 1, s - q + 1);
                Vector esub(static_cast<std::size_t>(s - q + 1));
                for (int i = q - 1; i < s; ++i) esub[static_cast<std::size_t>(i - q + 1)] = eta[static_cast<std::size_t>(i)];
                Vector xi = solve_z(zsub, esub);
                Vector vq(b.size(), 0.0);
                blas.axpy(tau, r0, vq);
                for (int j = q - 1; j < s; ++j) {
                    double c = xi[static_cast<std::size_t>(j - q + 1)];
                    blas.axpy(-tau * c, v0[static_cast<std::size_t>(j)], vq);
                    blas.axpy(c, vm1[static_cast<std::size_t>(j)], vq);
                }
                vm1[static_cast<std::size_t>(q) - 1] = std::move(vq);
                v0[static_cast<std::size_t>(q) - 1] = op.apply(vm1[static_cast<std::size_t>(q) - 1]);
                BioStatus vb = kind == IdrKind::biortho ? it_vbio(q, p, stacks, z, blas)
                                                        : it_vobio(q, p, stacks, z, blas);
                if (!vb.ok) return sh.take_best(SolveStatus::breakdown, vb.kind);
                if (vb.lucky_collinearity)
                    return sh.take_best(SolveStatus::breakdown, BreakdownKind::pivot);
                BioStatus rb = it_rbio(q, stacks, z, x, rp, eta, blas);
                if (!rb.ok) return sh.take_best(SolveStatus::breakdown, rb.kind);
            }
            beta = blas.nrm2(r0);
            sh.in.trace.annotate(sh.in.pc.n_matvec, "poly", "", {tau});
        }
        sh.in.snapshot(beta, [&]() { return x; });
        sh.keep_best(x, beta);
        if (!all_finite(r0)) return sh.take_best(SolveStatus::breakdown, BreakdownKind::nonfinite);
    }
    return sh.take(SolveStatus::converged, BreakdownKind::none, std::move(x), beta);
}

} // namespace

SolveOutcome idr_ref(Operator& op, const Vector& b, const SolverConfig& cfg) {
    return idr_driver(IdrKind::ref, op, b, cfg);
}
SolveOutcome idr_nodec(Operator& op, const Vector& b, const SolverConfig& cfg) {
    return idr_driver(IdrKind::nodec, op, b, cfg);
}
SolveOutcome idr_biortho(Operator& op, const Vector& b, const SolverConfig& cfg) {
    return idr_driver(IdrKind::biortho, op, b, cfg);
}
SolveOutcome idr_obio(Operator& op, const Vector& b, const SolverConfig& cfg) {
    return idr_driver(IdrKind::obio, op, b, cfg);
}

} // namespace idrkit
