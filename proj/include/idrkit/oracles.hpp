#ifndef IDRKIT_ORACLES_HPP
#define IDRKIT_ORACLES_HPP

#include "idrkit/block.hpp"
#include "idrkit/dense.hpp"

namespace idrkit {

// Dense brute-force subspace oracles for toy dimensions (N <= ~40). These
// are verification-only routes, deliberately independent of the solver
// implementations they cross-check.

/// Orthonormal basis of the full Krylov space K_inf(A; b) (rank-revealing
/// growth until stagnation).
Block krylov_basis(const DenseMat& a, const Vector& b);

/// Orthonormal basis of span(B) intersected with the null space of P^T.
Block intersect_nullspace(const Block& basis, const Block& p);

/// One generalised recursion step: q(A) (span(B) cap K_deg^perp(A^T; P))
/// with q(t) = 1 - sum tau_k t^k of degree tau.size().
Block sonneveld_step(const DenseMat& a, const Block& basis, const Block& p,
                     const Vector& tau);

struct SonneveldOracle {
    DenseMat a;
    Block p;
    Block basis; // current G_j
    int degree = 0;

    static SonneveldOracle start(const DenseMat& a, const Vector& b, const Block& p);
    /// advance by tau.size() degrees with the polynomial coefficients tau
    void advance(const Vector& tau);
    /// advance by one degree with a single relaxation omega
    void advance_omega(double omega) { advance(Vector{omega}); }
    int dim() const { return static_cast<int>(basis.size()); }
    /// relative distance of v from the current space
    double distance(const Vector& v) const { return subspace_residual(basis, v); }
};

struct MspaceOracle {
    DenseMat a;
    Block p;
    Vector b2;
    int cap_degree = 0; // J: b2 is appended for degrees 1..J
    Block basis;        // current M_j
    int degree = 0;

    static MspaceOracle start(const DenseMat& a, const Vector& b1, const Vector& b2,
                              const Block& p, int J);
    void advance_omega(double omega);
    int dim() const { return static_cast<int>(basis.size()); }
    double distance(const Vector& v) const { return subspace_residual(basis, v); }
};

/// max over the columns of `inner` of the distance from span(outer):
/// ~0 iff span(inner) is contained in span(outer).
double subspace_containment(const Block& outer, const Block& inner);

/// Reference least-squares minimiser of ||rhs - M chi|| by normal equations
/// with one round of iterative refinement.
Vector dense_lsq_oracle(const DenseMat& m, const Vector& rhs);

/// Minimal residual norm over K_i(A; b) (dense enumeration route).
double dense_gmres_oracle(const DenseMat& a, const Vector& b, int i);

} // namespace idrkit

#endif
