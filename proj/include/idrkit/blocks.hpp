#ifndef IDRKIT_BLOCKS_HPP
#define IDRKIT_BLOCKS_HPP

#include "idrkit/block.hpp"
#include "idrkit/config.hpp"
#include "idrkit/core.hpp"
#include "idrkit/dense.hpp"
#include "idrkit/operator.hpp"

namespace idrkit {

/// Oblique-projection bundle: shadow space P (orthonormal), auxiliary
/// pre-images V^(-1), images V^(0), and Z = P^T V^(0).
struct ProjectorSet {
    Block p;
    Block vm1;
    Block v0;
    DenseMat z;

    int s() const { return static_cast<int>(p.size()); }
};

// ---------------------------------------------------------------- stability

struct StabResult {
    Vector tau;            // ell coefficients of q(t) = 1 - sum tau_k t^k
    double beta_new = 0.0; // predicted norm of the updated residual
    double kappa0 = 0.0;   // ||r_hat^(0)||
    double kappa_ell = 0.0;
    double rho = 0.0;
    double delta = 0.0;
    bool stressed_branch = false;
    bool annihilation = false; // rank-deficient power stack, exact annihilation
};

/// Core routine on the Gram matrix S = [r^(0..ell)]^T [r^(0..ell)],
/// S(0,0) = beta^2. The residual update convention is
/// r := r^(0) - sum_k tau_k r^(k).
StabResult stab_coeffs_gram(const DenseMat& S, double beta, double alpha,
                            DeltaVariant variant);

/// Plain least-squares coefficients (argmin route) from the same Gram data.
StabResult argmin_coeffs_gram(const DenseMat& S, double beta);

/// Build S from length-N power vectors (counted: (ell+1)(ell+2)/2 - 1 DOTs)
/// and dispatch on the strategy.
StabResult stab_coeffs(const std::vector<const Vector*>& powers, double beta,
                       const Blas& blas, OmegaStrategy strategy, double alpha,
                       DeltaVariant variant);

/// Coefficient-space entry point (orthonormal basis): the Gram of the padded
/// coefficient vectors equals the Gram of the represented vectors.
StabResult stab_coeffs_small(const std::vector<Vector>& padded_coeffs, double beta,
                             OmegaStrategy strategy, double alpha, DeltaVariant variant);

/// tau_ell too close to zero for the polynomial step to shrink the space.
bool omega_breakdown(const StabResult& sr);

// ------------------------------------------------------- biorthogonalisation

struct BioStatus {
    bool ok = true;
    BreakdownKind kind = BreakdownKind::none;
    bool deficiency = false;
    bool lucky_collinearity = false;
};

/// stacks[0] = V^(-1), stacks[g+1] = V^(g). r_powers holds r^(0..f) with
/// eta = P^T r^(f); all powers and x are updated with the same xi = Z^+ eta.
BioStatus dir_rbio(const std::vector<Block*>& stacks, const DenseMat& z, Vector& x,
                   const std::vector<Vector*>& r_powers, Vector& eta, const Blas& blas);

/// One iterative step: make r^(f) orthogonal to p_q using column q (1-based).
BioStatus it_rbio(int q, const std::vector<Block*>& stacks, const DenseMat& z, Vector& x,
                  const std::vector<Vector*>& r_powers, Vector& eta, const Blas& blas);

/// Biorthogonalise column q of the top stack against p_1..p_{q-1}; writes
/// Z(q-1.., q-1) = P_{q..s}^T v_q^(top) and exact zeros above.
BioStatus it_vbio(int q, const Block& p, const std::vector<Block*>& stacks, DenseMat& z,
                  const Blas& blas);

/// Orthonormalise column q of V^(0) against columns 1..q-1 (same combination
/// applied to every stack), then normalise.
BioStatus it_vorth(int q, const std::vector<Block*>& stacks, const Blas& blas);

/// it_vorth followed by right-applied plane rotations that restore the lower
/// triangular shape of Z without touching cond(V^(0)).
BioStatus it_vobio(int q, const Block& p, const std::vector<Block*>& stacks, DenseMat& z,
                   const Blas& blas);

/// Lower-triangular solve with silent pseudo-inverse fallback on a collapsed
/// diagonal; `deficient` reports that the fallback was taken.
Vector solve_z(const DenseMat& z, const Vector& rhs, bool* deficient = nullptr);

// ------------------------------------------------------------------ Arnoldi

struct ArnoldiBundle {
    Block w;      // iters+1 orthonormal columns
    DenseMat h;   // (iters+1) x iters upper Hessenberg
    DenseMat q_h; // (iters+1) x iters, H = Q_H R_H
    DenseMat r_h; // iters x iters upper triangular
    DenseMat y;   // projected coefficients (empty for plain GMRES)
};

/// Hook invoked after every Arnoldi step: (step, |gamma_{i+1}|, lazy x).
using InnerHook = std::function<void(int, double, const std::function<Vector()>&)>;

struct GmresResult {
    bool converged = false;
    Vector x;          // updated solution (converged path)
    double beta = 0.0; // |gamma_{iters+1}|
    int iters = 0;
    bool happy_breakdown = false;
    std::vector<double> gamma_history; // |gamma_{i+1}| per step, non-increasing
    ArnoldiBundle bundle;
};

/// Restarted-GMRES building block: MGS Arnoldi with Givens-updated least
/// squares. Returns the minimal-residual solution on early convergence,
/// otherwise the Arnoldi factorization after m steps.
GmresResult gmres_m(Operator& op, const Vector& x, const Vector& r, double beta, int m,
                    double tolabs, const Blas& blas, const InnerHook& hook = nullptr);

/// Projected Arnoldi: A (W_{:,1:m} - V^(-1) Z^+ Y_{:,1:m}) = W_{:,1:(m+1)} H
/// with Y_{:,i} = P^T w_i (Y gets s x (m+1)).
GmresResult pgmres_m(Operator& op, const Block& p, const DenseMat& z, const Block& vm1,
                     const Vector& x, const Vector& r, double beta, int m, double tolabs,
                     const Blas& blas, const InnerHook& hook = nullptr);

/// Augmented Arnoldi: A W_{:,1:m} = [V^(0), W_{:,1:(m+1)}] [Z^+ Y; H] with
/// Y_{:,i} = P^T A w_i (Y gets s x m).
GmresResult auggmres_m(Operator& op, const Block& p, const DenseMat& z, const Block& vm1,
                       const Block& v0, const Vector& x, const Vector& r, double beta, int m,
                       double tolabs, const Blas& blas, const InnerHook& hook = nullptr);

// ------------------------------------------------------------ initialisation

struct InitResult {
    bool converged = false;
    Vector x;
    Vector r;
    double beta = 0.0;
    ProjectorSet proj;
    bool deficiency = false;
};

/// Embedded s-step GMRES, then projectors with A V^(-1) = V^(0), V^(0)
/// unitary, Z = P^T V^(0) lower triangular, and r both consistent and
/// perpendicular to P. P is drawn from `rng` and orthonormalised.
InitResult initialisation(Operator& op, const Vector& b, int s, double tolabs, Rng& rng,
                          const Blas& blas, const InnerHook& hook = nullptr);

/// Variant starting from a caller-supplied residual state (recycling path).
InitResult initialisation_from(Operator& op, const Vector& x0, const Vector& r0, double beta,
                               int s, double tolabs, Rng& rng, const Blas& blas,
                               const InnerHook& hook = nullptr);

} // namespace idrkit

#endif
