#include <map>
#include "idrkit/solvers.hpp"

namespace idrkit {

namespace {

StabResult omega_step(const std::vector<const Vector*>& powers, double beta,
                      const Blas& blas, const SolverConfig& cfg) {
    return stab_coeffs(powers, beta, blas, cfg.omega_strategy, cfg.alpha, cfg.delta_variant);
}

} // namespace

// 7-vector storage: x, r^(0), r^(1), v^(-1), v^(0), v^(1), p.
SolveOutcome bicgstab(Operator& op, const Vector& b, const SolverConfig& cfg) {
    Instrument in(op, b);
    Blas blas{&in.pc};
    Rng rng(cfg.rng_seed);
    SolveOutcome out;
    out.trace.metadata["solver"] = "bicgstab";
    out.trace.metadata["seed"] = std::to_string(cfg.rng_seed);
    out.trace.metadata["rng"] = Rng::identity();
    in.start();

    double tolabs = cfg.tol_rel * blas.nrm2(b);
    Vector r0 = b;
    Vector x(b.size(), 0.0);
    Vector vm1 = b;
    Block p = rng.normal_block(b.size(), 1);
    qr_mgs(p, blas);
    Vector v0 = op.apply(vm1);
    double z = blas.dot(p[0], v0); // Z is 1 x 1
    double beta = blas.nrm2(r0);

    Vector x_best = x;
    double beta_best = beta;
    auto keep_best = [&]() {
        if (beta < beta_best) {
            beta_best = beta;
            x_best = x;
        }
    };
    in.snapshot(beta, [&]() { return x; });

    auto bail = [&](SolveStatus st, BreakdownKind k) {
        out.status = st;
        out.breakdown = k;
        if (k != BreakdownKind::none)
            in.trace.annotate(in.pc.n_matvec, "breakdown", to_string(k));
        out.x = std::move(x_best);
        out.final_beta = beta_best;
        in.finish();
        out.trace = std::move(in.trace);
        return std::move(out);
    };

    while (beta > tolabs) {
        if (in.pc.n_matvec + 2 > cfg.max_matvec)
            return bail(SolveStatus::max_matvec, BreakdownKind::none);
        // biorthogonalisation: residual, then auxiliary vector
        double xi = z != 0.0 ? blas.dot(p[0], r0) / z : 0.0;
        blas.axpy(-xi, v0, r0);
        blas.axpy(xi, vm1, x);
        Vector r1 = op.apply(r0);
        xi = z != 0.0 ? blas.dot(p[0], r1) / z : 0.0;
        Vector v0_new = r1;
        blas.axpy(-xi, v0, v0_new);
        Vector vm1_new = r0;
        blas.axpy(-xi, vm1, vm1_new);
        v0 = std::move(v0_new);
        vm1 = std::move(vm1_new);
        Vector v1 = op.apply(v0);
        z = blas.dot(p[0], v1);

        // polynomial step
        StabResult sr;
        if (cfg.omega_strategy == OmegaStrategy::argmin) {
            double num = blas.dot(r1, r0);
            double den = blas.dot(r1, r1);
            sr.tau = {den > 0.0 ? num / den : 0.0};
            sr.kappa0 = blas.nrm2(r0);
            sr.kappa_ell = std::sqrt(den);
        } else {
            std::vector<const Vector*> powers = {&r0, &r1};
            sr = omega_step(powers, blas.nrm2(r0), blas, cfg);
        }
        if (!sr.annihilation && omega_breakdown(sr))
            return bail(SolveStatus::breakdown, BreakdownKind::omega_zero);
        double tau = sr.tau[0];
        blas.axpy(tau, r0, x);
        blas.axpy(-tau, r1, r0);
        blas.axpy(-tau, v0, vm1);
        blas.axpy(-tau, v1, v0);
        z = -tau * z;
        beta = blas.nrm2(r0);
        in.trace.annotate(in.pc.n_matvec, "poly", "", {tau});
        in.snapshot(beta, [&]() { return x; });
        keep_best();
        if (!all_finite(r0)) return bail(SolveStatus::breakdown, BreakdownKind::nonfinite);
    }
    out.status = SolveStatus::converged;
    out.x = std::move(x);
    out.final_beta = beta;
    in.finish();
    out.trace = std::move(in.trace);
    return out;
}

// storage: x, r^(0..ell), v^(-1..ell), p
SolveOutcome bicgstab_ell(Operator& op, const Vector& b, const SolverConfig& cfg) {
    Instrument in(op, b);
    Blas blas{&in.pc};
    Rng rng(cfg.rng_seed);
    SolveOutcome out;
    out.trace.metadata["solver"] = "bicgstab_ell";
    out.trace.metadata["seed"] = std::to_string(cfg.rng_seed);
    in.start();

    std::size_t ell = static_cast<std::size_t>(cfg.ell);
    double tolabs = cfg.tol_rel * blas.nrm2(b);
    std::vector<Vector> r(ell + 1);
    std::vector<Vector> v(ell + 2); // v[g+1] holds v^(g)
    r[0] = b;
    Vector x(b.size(), 0.0);
    v[0] = b;
    Block p = rng.normal_block(b.size(), 1);
    qr_mgs(p, blas);
    v[1] = op.apply(v[0]);
    double z = blas.dot(p[0], v[1]);
    double beta = blas.nrm2(r[0]);

    Vector x_best = x;
    double beta_best = beta;
    in.snapshot(beta, [&]() { return x; });

    auto bail = [&](SolveStatus st, BreakdownKind k) {
        out.status = st;
        out.breakdown = k;
        if (k != BreakdownKind::none)
            in.trace.annotate(in.pc.n_matvec, "breakdown", to_string(k));
        out.x = std::move(x_best);
        out.final_beta = beta_best;
        in.finish();
        out.trace = std::move(in.trace);
        return std::move(out);
    };

    while (beta > tolabs) {
        if (in.pc.n_matvec + 2 * static_cast<long long>(ell) > cfg.max_matvec)
            return bail(SolveStatus::max_matvec, BreakdownKind::none);
        for (std::size_t k = 0; k < ell; ++k) {
            double xi = z != 0.0 ? blas.dot(p[0], r[k]) / z : 0.0;
            for (std::size_t g = 0; g <= k; ++g) blas.axpy(-xi, v[g + 1], r[g]);
            blas.axpy(xi, v[0], x);
            r[k + 1] = op.apply(r[k]);
            xi = z != 0.0 ? blas.dot(p[0], r[k + 1]) / z : 0.0;
            for (std::size_t gi = 0; gi <= k + 1; ++gi) {
                // v^(g) := r^(g+1) - v^(g) xi for g = -1..k
                Vector vn = r[gi];
                blas.axpy(-xi, v[gi], vn);
                v[gi] = std::move(vn);
            }
            v[k + 2] = op.apply(v[k + 1]);
            z = blas.dot(p[0], v[k + 2]);
        }
        std::vector<const Vector*> powers;
        for (std::size_t g = 0; g <= ell; ++g) powers.push_back(&r[g]);
        beta = blas.nrm2(r[0]);
        StabResult sr = omega_step(powers, beta, blas, cfg);
        if (!sr.annihilation && omega_breakdown(sr))
            return bail(SolveStatus::breakdown, BreakdownKind::omega_zero);
        for (std::size_t k = 1; k <= ell; ++k) blas.axpy(sr.tau[k - 1], r[k - 1], x);
        for (std::size_t k = 1; k <= ell; ++k) blas.axpy(-sr.tau[k - 1], r[k], r[0]);
        for (std::size_t k = 1; k <= ell; ++k) blas.axpy(-sr.tau[k - 1], v[k], v[0]);
        for (std::size_t k = 1; k <= ell; ++k) blas.axpy(-sr.tau[k - 1], v[k + 1], v[1]);
        z = -sr.tau.back() * z;
        beta = blas.nrm2(r[0]);
        in.trace.annotate(in.pc.n_matvec, "poly", "", sr.tau);
        in.snapshot(beta, [&]() { return x; });
        if (beta < beta_best) {
            beta_best = beta;
            x_best = x;
        }
        if (!all_finite(r[0])) return bail(SolveStatus::breakdown, BreakdownKind::nonfinite);
    }
    out.status = SolveStatus::converged;
    out.x = std::move(x);
    out.final_beta = beta;
    in.finish();
    out.trace = std::move(in.trace);
    return out;
}

SolveOutcome gmres_solve(Operator& op, const Vector& b, double tol_rel, long long max_matvec) {
    Instrument in(op, b);
    Blas blas{&in.pc};
    SolveOutcome out;
    out.trace.metadata["solver"] = "gmres";
    in.start();
    double beta = blas.nrm2(b);
    double tolabs = tol_rel * beta;
    Vector x(b.size(), 0.0);
    int m = static_cast<int>(std::min<long long>(max_matvec, op.dim()));
    GmresResult g = gmres_m(op, x, b, beta, m, tolabs, blas,
                            [&](int, double gamma, const std::function<Vector()>& mk) {
                                in.snapshot(gamma, mk);
                            });
    out.status = g.converged ? SolveStatus::converged : SolveStatus::max_matvec;
    out.x = g.converged ? std::move(g.x) : std::move(x);
    out.final_beta = g.beta;
    in.finish();
    out.trace = std::move(in.trace);
    return out;
}

} // namespace idrkit

namespace idrkit {

namespace {

const std::map<std::string, SolveOutcome (*)(Operator&, const Vector&, const SolverConfig&)>&
solver_table() {
    static const std::map<std::string, SolveOutcome (*)(Operator&, const Vector&, const SolverConfig&)>
        table = {
            {"bicgstab", &bicgstab},
            {"bicgstab_ell", &bicgstab_ell},
            {"bicgstabl", &bicgstab_ell},
            {"idr_naive", &idr_naive},
            {"idr_ref", &idr_ref},
            {"idr_nodec", &idr_nodec},
            {"idr_biortho", &idr_biortho},
            {"idr_obio", &idr_obio},
            {"idrstab_naive", &idrstab_naive},
            {"idrstab_ref", &idrstab_ref},
            {"idrstab_biortho", &idrstab_biortho},
            {"idrstab_obio", &idrstab_obio},
        };
    return table;
}

} // namespace

bool solver_name_known(const std::string& name) {
    return solver_table().count(name) > 0;
}

SolveOutcome solve_by_name(const std::string& name, Operator& op, const Vector& b,
                           const SolverConfig& cfg) {
    auto it = solver_table().find(name);
    if (it == solver_table().end())
        throw std::invalid_argument("unknown solver '" + name + "'");
    return it->second(op, b, cfg);
}

} // namespace idrkit
