#ifndef IDRKIT_SOLVERS_HPP
#define IDRKIT_SOLVERS_HPP

#include "idrkit/blocks.hpp"
#include "idrkit/config.hpp"
#include "idrkit/trace.hpp"

namespace idrkit {

// Classic short-recurrence family. All solvers place tolabs = tol_rel * ||b||
// once at entry, return the best iterate on breakdown / budget exhaustion,
// and record one snapshot per repetition of the main loop.

SolveOutcome bicgstab(Operator& op, const Vector& b, const SolverConfig& cfg);
SolveOutcome bicgstab_ell(Operator& op, const Vector& b, const SolverConfig& cfg);

SolveOutcome idr_naive(Operator& op, const Vector& b, const SolverConfig& cfg);
SolveOutcome idr_ref(Operator& op, const Vector& b, const SolverConfig& cfg);
SolveOutcome idr_nodec(Operator& op, const Vector& b, const SolverConfig& cfg);
SolveOutcome idr_biortho(Operator& op, const Vector& b, const SolverConfig& cfg);
SolveOutcome idr_obio(Operator& op, const Vector& b, const SolverConfig& cfg);

SolveOutcome idrstab_naive(Operator& op, const Vector& b, const SolverConfig& cfg);
SolveOutcome idrstab_ref(Operator& op, const Vector& b, const SolverConfig& cfg);
SolveOutcome idrstab_biortho(Operator& op, const Vector& b, const SolverConfig& cfg);
SolveOutcome idrstab_obio(Operator& op, const Vector& b, const SolverConfig& cfg);

/// Full/restart-free GMRES driver used as a termination-count yardstick.
SolveOutcome gmres_solve(Operator& op, const Vector& b, double tol_rel, long long max_matvec);

/// Dispatch by name ("bicgstab", "idr_biortho", "idrstab_ref", ...).
SolveOutcome solve_by_name(const std::string& name, Operator& op, const Vector& b,
                           const SolverConfig& cfg);
bool solver_name_known(const std::string& name);

} // namespace idrkit

#endif
