#ifndef IDRKIT_RECYCLING_HPP
#define IDRKIT_RECYCLING_HPP

#include "idrkit/gmstab.hpp"
#include "idrkit/problems.hpp"

namespace idrkit {

/// Auxiliary pre-images saved on the fly plus the shadow space that was in
/// use when they were produced.
struct RecycleData {
    Block u_hat; // N x s
    Block p;     // orthonormal
    int source_system = 0;
    int cycle = -1;  // cycle index of the snapshot
    int degree = -1; // Sonneveld degree reached at the snapshot
    double tol2 = 1e-2;
    int s = 0;
    std::uint64_t seed = 0;

    bool valid() const { return !u_hat.empty(); }
};

/// Persistence: `<stem>.recycle.mtx` (dense array, [U_hat | P]) plus
/// `<stem>.recycle.json` metadata.
void save_recycle(const std::string& stem, const RecycleData& rd);
RecycleData load_recycle(const std::string& stem);

/// Install the snapshot rule on a GMstab solve: U_hat is overwritten by
/// V^(-1) after every cycle whose residual norm still exceeds
/// tol2 * ||b||; the last qualifying snapshot wins.
GmstabHooks make_recycle_extractor(RecycleData& out, double tol2, double b_norm,
                                   int source_system, std::uint64_t seed);

/// Recycled initialisation: V^(-1) := U_hat, V^(0) := A V^(-1), then the
/// orthonormalisation / LQ / biorthogonalisation bring the state to the
/// cycle preconditions (V^(0) unitary, Z lower triangular, r perp P).
/// Deficiency of A U_hat is reported through the flag; callers fall back to
/// a fresh initialisation.
InitResult mstab_init(Operator& op, const Vector& b_local, double tolabs,
                      const RecycleData& rd, const Blas& blas);

struct MstabSequenceResult {
    std::vector<SolveOutcome> outcomes;
    std::vector<RecycleData> chain; // provenance per system (index 0: extraction)
};

/// System 1 by GMstab with extraction; systems >= 2 through mstab_init with
/// the same U_hat, falling back to a fresh initialisation when recycling is
/// unavailable. Failures stay isolated per system.
MstabSequenceResult mstab_solve_sequence(const SequenceSpec& spec, const GmstabConfig& cfg);

} // namespace idrkit

#endif
