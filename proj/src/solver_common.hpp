#ifndef IDRKIT_SOLVER_COMMON_HPP
#define IDRKIT_SOLVER_COMMON_HPP

#include "idrkit/solvers.hpp"

namespace idrkit {

/// Boilerplate shared by the solver drivers: instrumentation, best-iterate
/// tracking and outcome assembly.
struct SolveShell {
    Instrument in;
    Blas blas;
    Rng rng;
    SolveOutcome out;
    Vector x_best;
    double beta_best;

    SolveShell(Operator& op, const Vector& b, const std::string& name, std::uint64_t seed)
        : in(op, b), blas{&in.pc}, rng(seed), beta_best(std::numeric_limits<double>::infinity()) {
        out.trace.metadata["solver"] = name;
        out.trace.metadata["seed"] = std::to_string(seed);
        out.trace.metadata["rng"] = Rng::identity();
        in.start();
    }

    void keep_best(const Vector& x, double beta) {
        if (beta < beta_best) {
            beta_best = beta;
            x_best = x;
        }
    }

    SolveOutcome take(SolveStatus st, BreakdownKind k, Vector x, double beta) {
        out.status = st;
        out.breakdown = k;
        if (k != BreakdownKind::none)
            in.trace.annotate(in.pc.n_matvec, "breakdown", to_string(k));
        out.x = std::move(x);
        out.final_beta = beta;
        in.finish();
        out.trace = std::move(in.trace);
        return std::move(out);
    }

    SolveOutcome take_best(SolveStatus st, BreakdownKind k) {
        return take(st, k, std::move(x_best), beta_best);
    }
};

/// out := base - [head_{:,1:q-1}, tail_{:,q:s}] * xi   (s AXPYs, q 1-based)
inline Vector mixed_combo(const Vector& base, const Block& head, const Block& tail, int q,
                          const Vector& xi, const Blas& blas) {
    Vector out = base;
    for (int j = 0; j < q - 1; ++j) blas.axpy(-xi[static_cast<std::size_t>(j)], head[static_cast<std::size_t>(j)], out);
    for (int j = q - 1; j < static_cast<int>(tail.size()); ++j)
        blas.axpy(-xi[static_cast<std::size_t>(j)], tail[static_cast<std::size_t>(j)], out);
    return out;
}

inline StabResult omega_coeffs(const std::vector<const Vector*>& powers, double beta,
                               const Blas& blas, const SolverConfig& cfg) {
    return stab_coeffs(powers, beta, blas, cfg.omega_strategy, cfg.alpha, cfg.delta_variant);
}

} // namespace idrkit

#endif
