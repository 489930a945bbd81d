#ifndef IDRKIT_BLOCK_HPP
#define IDRKIT_BLOCK_HPP

#include "idrkit/core.hpp"
#include "idrkit/dense.hpp"

namespace idrkit {

// Counted operations on tall N x k column blocks. One AXPY is charged per
// two-term length-N update (scaled copies and scalings included), one DOT
// per length-N inner product.

inline Block zeros_block(std::size_t n, std::size_t k) {
    return Block(k, Vector(n, 0.0));
}

/// X^T * Y as a small matrix; |X| * |Y| DOTs.
DenseMat block_tdot(const Block& X, const Block& Y, const Blas& blas);

/// X^T * v; |X| DOTs.
Vector block_tdot_vec(const Block& X, const Vector& v, const Blas& blas);

/// Upper triangle of X^T X (symmetric Gram), k(k+1)/2 DOTs.
DenseMat block_gram(const Block& X, const Blas& blas);

/// X * M as a fresh block; one AXPY-class op per (column, term) pair.
Block block_mul(const Block& X, const DenseMat& M, const Blas& blas);

/// X * m as a fresh vector.
Vector block_mul_vec(const Block& X, const Vector& m, const Blas& blas);

/// y += X * m (|m| AXPYs).
void block_accum_vec(const Block& X, const Vector& m, Vector& y, const Blas& blas);

/// In-place reduced QR by modified Gram-Schmidt; returns upper-triangular R.
struct BlockQr {
    DenseMat r;
    bool rank_deficient = false;
};
BlockQr qr_mgs(Block& B, const Blas& blas);

/// Orthonormalise the columns of `tail` against the orthonormal block `head`
/// and against themselves (MGS). Returns C = head^T tail and the triangular
/// factor of the remainder, i.e. [head, tail_in] = [head, tail_out] [[I, C],[0, R]].
struct SplitQr {
    DenseMat c;
    DenseMat r;
    bool rank_deficient = false;
};
SplitQr qr_against(const Block& head, Block& tail, const Blas& blas);

double subspace_residual(const Block& basis, const Vector& v); // uncounted helper

} // namespace idrkit

#endif
