#ifndef IDRKIT_GMSTAB_HPP
#define IDRKIT_GMSTAB_HPP

#include "idrkit/blocks.hpp"
#include "idrkit/config.hpp"
#include "idrkit/solvers.hpp"

namespace idrkit {

/// Running state of the restarted-GMRES-based cycles (local system of the
/// flying-restart split).
struct GmstabState {
    ProjectorSet proj;
    Vector x;
    Vector r;
    double beta = 0.0;
};

enum class CycleOutcome { ok, converged, gauge_deficient, breakdown };

struct CycleResult {
    CycleOutcome outcome = CycleOutcome::ok;
    BreakdownKind kind = BreakdownKind::none;
    bool deficiency = false;
    StabResult stab;
    std::vector<double> gamma_history; // inner-GMRES |gamma| sequence
    std::string converged_site;        // "step1" | "pgmres" | "auggmres" | "step3"
};

/// One robust cycle advancing the Sonneveld degree by 1: polynomial step,
/// projector modification, projected GMRES(s), residual biorthogonalisation
/// and the construction of a fresh, fully recoupled projector pair.
CycleResult gmstab1_cycle(Operator& op, GmstabState& st, double tolabs, const Blas& blas,
                          const GmstabConfig& cfg, const InnerHook& hook = nullptr);

/// One robust cycle advancing the degree by 2 through an augmented
/// GMRES(2s+2) sweep; on gauge rank loss the state keeps consistent (x, r)
/// and the old projectors so the caller can fall back to gmstab1_cycle.
CycleResult gmstab2_cycle(Operator& op, GmstabState& st, double tolabs, const Blas& blas,
                          const GmstabConfig& cfg, const InnerHook& hook = nullptr);

struct GmstabHooks {
    /// after a completed cycle, before the flying-restart phase
    std::function<void(int cycle_index, int ell, const GmstabState&, const CycleResult&)>
        after_cycle;
    /// after the flying-restart / recomputation phase of a cycle
    std::function<void(int cycle_index, const GmstabState&)> after_restart;
};

/// Pluggable initialisation (the recycling layer substitutes its own).
using InitProvider = std::function<InitResult(Operator&, const Vector& b_local, double tolabs,
                                              Rng&, const Blas&, const InnerHook&)>;

/// Practical driver: flying restarts, residual recomputation and adaptive
/// ell in {1, 2}.
SolveOutcome gmstab_solve(Operator& op, const Vector& b, const Vector& x0,
                          const GmstabConfig& cfg, const GmstabHooks* hooks = nullptr);

/// Same driver with a caller-supplied initialisation routine.
SolveOutcome gmstab_solve_with_init(Operator& op, const Vector& b, const Vector& x0,
                                    const GmstabConfig& cfg, const GmstabHooks* hooks,
                                    const InitProvider& provider);

} // namespace idrkit

#endif
