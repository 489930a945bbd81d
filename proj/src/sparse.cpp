#include "idrkit/sparse.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <map>

namespace idrkit {

double CsrMatrix::at(int i, int j) const {
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
        if (col_indices[k] == j) return values[k];
    return 0.0;
}

CsrMatrix CsrMatrix::identity(int n) {
    return diag(Vector(n, 1.0));
}

CsrMatrix CsrMatrix::diag(const Vector& d) {
    CsrMatrix A;
    A.n_rows = A.n_cols = static_cast<int>(d.size());
    A.row_offsets.resize(d.size() + 1);
    for (std::size_t i = 0; i <= d.size(); ++i) A.row_offsets[i] = static_cast<int>(i);
    A.col_indices.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) A.col_indices[i] = static_cast<int>(i);
    A.values = d;
    return A;
}

CsrMatrix CsrMatrix::from_triplets(int n_rows, int n_cols,
                                   std::vector<std::array<double, 3>> ijv) {
    std::map<std::pair<int, int>, double> acc;
    for (const auto& t : ijv)
        acc[{static_cast<int>(t[0]), static_cast<int>(t[1])}] += t[2];
    CsrMatrix A;
    A.n_rows = n_rows;
    A.n_cols = n_cols;
    A.row_offsets.assign(n_rows + 1, 0);
    for (const auto& [ij, v] : acc) ++A.row_offsets[ij.first + 1];
    for (int i = 0; i < n_rows; ++i) A.row_offsets[i + 1] += A.row_offsets[i];
    A.col_indices.resize(acc.size());
    A.values.resize(acc.size());
    std::vector<int> fill(A.row_offsets.begin(), A.row_offsets.end() - 1);
    for (const auto& [ij, v] : acc) {
        int k = fill[ij.first]++;
        A.col_indices[k] = ij.second;
        A.values[k] = v;
    }
    return A;
}

DenseMat CsrMatrix::to_dense() const {
    DenseMat D(n_rows, n_cols);
    for (int i = 0; i < n_rows; ++i)
        for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
            D(i, col_indices[k]) = values[k];
    return D;
}

Vector csr_matvec(const CsrMatrix& A, const Vector& v) {
    if (static_cast<int>(v.size()) != A.n_cols)
        throw std::invalid_argument("csr_matvec: dimension mismatch");
    Vector y(A.n_rows, 0.0);
    for (int i = 0; i < A.n_rows; ++i) {
        double s = 0.0;
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            s += A.values[k] * v[A.col_indices[k]];
        y[i] = s;
    }
    return y;
}

CsrMatrix add_shift(const CsrMatrix& A, double lambda) {
    std::vector<std::array<double, 3>> ijv;
    ijv.reserve(A.nnz() + A.n_rows);
    for (int i = 0; i < A.n_rows; ++i)
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            ijv.push_back({static_cast<double>(i), static_cast<double>(A.col_indices[k]),
                           A.values[k]});
    for (int i = 0; i < A.n_rows; ++i)
        ijv.push_back({static_cast<double>(i), static_cast<double>(i), lambda});
    return CsrMatrix::from_triplets(A.n_rows, A.n_cols, std::move(ijv));
}

CsrMatrix permute_symmetric(const CsrMatrix& A, const std::vector<int>& perm) {
    assert(static_cast<int>(perm.size()) == A.n_rows);
    std::vector<int> inv(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<int>(k);
    std::vector<std::array<double, 3>> ijv;
    ijv.reserve(A.nnz());
    for (int i = 0; i < A.n_rows; ++i)
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            ijv.push_back({static_cast<double>(inv[i]),
                           static_cast<double>(inv[A.col_indices[k]]), A.values[k]});
    return CsrMatrix::from_triplets(A.n_rows, A.n_cols, std::move(ijv));
}

Vector tri_solve(const CsrMatrix& T, const Vector& rhs, TriSide side) {
    int n = T.n_rows;
    Vector x(rhs);
    if (side == TriSide::lower) {
        // strictly lower stored, unit diagonal implied
        for (int i = 0; i < n; ++i) {
            double s = x[i];
            for (int k = T.row_offsets[i]; k < T.row_offsets[i + 1]; ++k) {
                int j = T.col_indices[k];
                if (j < i) s -= T.values[k] * x[j];
            }
            x[i] = s;
        }
    } else {
        for (int i = n - 1; i >= 0; --i) {
            double s = x[i];
            double d = 0.0;
            for (int k = T.row_offsets[i]; k < T.row_offsets[i + 1]; ++k) {
                int j = T.col_indices[k];
                if (j > i) s -= T.values[k] * x[j];
                else if (j == i) d = T.values[k];
            }
            if (d == 0.0)
                throw std::runtime_error("tri_solve: singular preconditioner, zero diagonal at row " +
                                         std::to_string(i));
            x[i] = s / d;
        }
    }
    return x;
}

Ilu0Result ilu0(const CsrMatrix& A) {
    assert(A.n_rows == A.n_cols);
    int n = A.n_rows;
    Ilu0Result res;

    // working copy of the values, pattern fixed
    std::vector<double> lu(A.values);
    std::vector<int> diag_pos(n, -1);
    for (int i = 0; i < n; ++i)
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            if (A.col_indices[k] == i) diag_pos[i] = k;
    for (int i = 0; i < n; ++i)
        if (diag_pos[i] < 0) {
            res.ok = false;
            res.failed_row = i;
            return res;
        }

    std::vector<int> pos_in_row(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            pos_in_row[A.col_indices[k]] = k;
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            int kcol = A.col_indices[k];
            if (kcol >= i) break;
            double piv = lu[diag_pos[kcol]];
            if (piv == 0.0) {
                res.ok = false;
                res.failed_row = i;
                return res;
            }
            double factor = lu[k] / piv;
            lu[k] = factor;
            for (int kk = diag_pos[kcol] + 1; kk < A.row_offsets[kcol + 1]; ++kk) {
                int j = A.col_indices[kk];
                int p = pos_in_row[j];
                if (p >= 0 && p >= A.row_offsets[i] && p < A.row_offsets[i + 1])
                    lu[p] -= factor * lu[kk];
            }
        }
        if (lu[diag_pos[i]] == 0.0) {
            res.ok = false;
            res.failed_row = i;
            return res;
        }
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            pos_in_row[A.col_indices[k]] = -1;
    }

    // split into strictly-lower L and upper U over the same pattern
    std::vector<std::array<double, 3>> lt, ut;
    for (int i = 0; i < n; ++i)
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            int j = A.col_indices[k];
            if (j < i) lt.push_back({static_cast<double>(i), static_cast<double>(j), lu[k]});
            else ut.push_back({static_cast<double>(i), static_cast<double>(j), lu[k]});
        }
    res.factor.lower = CsrMatrix::from_triplets(n, n, std::move(lt));
    res.factor.upper = CsrMatrix::from_triplets(n, n, std::move(ut));
    return res;
}

} // namespace idrkit
