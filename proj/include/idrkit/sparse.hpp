#ifndef IDRKIT_SPARSE_HPP
#define IDRKIT_SPARSE_HPP

#include <array>
#include <optional>

#include "idrkit/core.hpp"
#include "idrkit/dense.hpp"

namespace idrkit {

struct CsrMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<int> row_offsets; // length n_rows + 1
    std::vector<int> col_indices; // strictly increasing within each row
    std::vector<double> values;

    int nnz() const { return row_offsets.empty() ? 0 : row_offsets.back(); }
    double at(int i, int j) const; // 0 if not stored

    static CsrMatrix identity(int n);
    static CsrMatrix diag(const Vector& d);
    /// Build from unsorted triplets; duplicates are summed.
    static CsrMatrix from_triplets(int n_rows, int n_cols,
                                   std::vector<std::array<double, 3>> ijv);

    DenseMat to_dense() const;
};

/// Exact sparse product; dimension mismatch is a hard error.
Vector csr_matvec(const CsrMatrix& A, const Vector& v);

/// A + lambda * I with the diagonal made structurally present.
CsrMatrix add_shift(const CsrMatrix& A, double lambda);

/// Apply a symmetric permutation: B = A(p, p), p given as new_order[k] = old index.
CsrMatrix permute_symmetric(const CsrMatrix& A, const std::vector<int>& perm);

/// Unit-lower / upper pair sharing the source pattern (zero-fill ILU).
struct TriFactor {
    CsrMatrix lower; // strictly lower part stored, unit diagonal implied
    CsrMatrix upper; // includes the diagonal, nonzero entries required
};

enum class TriSide { lower, upper };

/// Forward/backward substitution. Throws std::runtime_error on a zero
/// diagonal in the upper factor.
Vector tri_solve(const CsrMatrix& T, const Vector& rhs, TriSide side);

struct Ilu0Result {
    TriFactor factor;
    bool ok = true;
    int failed_row = -1; // zero pivot row when !ok
};

/// Zero-fill ILU, IKJ ordering over the fixed pattern of A. Requires a
/// structurally nonzero diagonal (apply add_shift first if needed).
Ilu0Result ilu0(const CsrMatrix& A);

} // namespace idrkit

#endif
