#include "idrkit/dense.hpp"

#include <algorithm>
#include <cassert>

namespace idrkit {

DenseMat DenseMat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    int m = static_cast<int>(rows.size());
    int n = m > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    DenseMat A(m, n);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) A(i, j++) = v;
        ++i;
    }
    return A;
}

DenseMat operator*(const DenseMat& A, const DenseMat& B) {
    assert(A.cols() == B.rows());
    DenseMat C(A.rows(), B.cols());
    for (int j = 0; j < B.cols(); ++j)
        for (int k = 0; k < A.cols(); ++k) {
            double b = B(k, j);
            if (b == 0.0) continue;
            for (int i = 0; i < A.rows(); ++i) C(i, j) += A(i, k) * b;
        }
    return C;
}

DenseMat operator*(double alpha, const DenseMat& A) {
    DenseMat C(A.rows(), A.cols());
    for (int j = 0; j < A.cols(); ++j)
        for (int i = 0; i < A.rows(); ++i) C(i, j) = alpha * A(i, j);
    return C;
}

DenseMat operator+(const DenseMat& A, const DenseMat& B) {
    DenseMat C(A.rows(), A.cols());
    for (int j = 0; j < A.cols(); ++j)
        for (int i = 0; i < A.rows(); ++i) C(i, j) = A(i, j) + B(i, j);
    return C;
}

DenseMat operator-(const DenseMat& A, const DenseMat& B) {
    DenseMat C(A.rows(), A.cols());
    for (int j = 0; j < A.cols(); ++j)
        for (int i = 0; i < A.rows(); ++i) C(i, j) = A(i, j) - B(i, j);
    return C;
}

Vector operator*(const DenseMat& A, const Vector& x) {
    assert(static_cast<int>(x.size()) == A.cols());
    Vector y(A.rows(), 0.0);
    for (int j = 0; j < A.cols(); ++j) {
        double xj = x[j];
        if (xj == 0.0) continue;
        for (int i = 0; i < A.rows(); ++i) y[i] += A(i, j) * xj;
    }
    return y;
}

Vector mat_t_vec(const DenseMat& A, const Vector& x) {
    assert(static_cast<int>(x.size()) == A.rows());
    Vector y(A.cols(), 0.0);
    for (int j = 0; j < A.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < A.rows(); ++i) s += A(i, j) * x[i];
        y[j] = s;
    }
    return y;
}

QrSmall qr_mgs(const DenseMat& B) {
    int m = B.rows(), n = B.cols();
    assert(m >= n);
    QrSmall res;
    res.q = B;
    res.r = DenseMat(n, n);
    double scale = B.frobenius();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            double rij = 0.0;
            for (int k = 0; k < m; ++k) rij += res.q(k, i) * res.q(k, j);
            res.r(i, j) = rij;
            for (int k = 0; k < m; ++k) res.q(k, j) -= rij * res.q(k, i);
        }
        double nrm = 0.0;
        for (int k = 0; k < m; ++k) nrm += res.q(k, j) * res.q(k, j);
        nrm = std::sqrt(nrm);
        res.r(j, j) = nrm;
        if (nrm <= kRankTol * std::max(scale, 1e-300)) {
            res.rank_deficient = true;
            for (int k = 0; k < m; ++k) res.q(k, j) = 0.0;
        } else {
            double inv = 1.0 / nrm;
            for (int k = 0; k < m; ++k) res.q(k, j) *= inv;
        }
    }
    return res;
}

LqSmall lq(const DenseMat& B) {
    QrSmall qr = qr_mgs(B.transposed());
    LqSmall res;
    res.l = qr.r.transposed();
    res.q = qr.q;
    res.rank_deficient = qr.rank_deficient;
    return res;
}

GivensRotation givens(double a, double b) {
    GivensRotation g;
    if (b == 0.0 && a == 0.0) return g; // identity convention
    double r = std::hypot(a, b);
    g.c = a / r;
    g.s = b / r;
    return g;
}

OrthResult orth(const DenseMat& B) {
    QrSmall qr = qr_mgs(B);
    return {qr.q, qr.rank_deficient};
}

OrthResult roworth(const DenseMat& B) {
    QrSmall qr = qr_mgs(B.transposed());
    return {qr.q.transposed(), qr.rank_deficient};
}

namespace {

// Unreduced Householder QR with optional column pivoting.
// Returns the full Q (m x m) and R (m x n) in place; perm holds the column
// permutation (pivoting) and rank the number of accepted diagonal entries.
struct HouseholderQr {
    DenseMat q; // m x m orthogonal
    DenseMat r; // m x n
    std::vector<int> perm;
    int rank = 0;
};

HouseholderQr householder_qr(const DenseMat& A, bool pivot, double rtol = kRankTol) {
    int m = A.rows(), n = A.cols();
    HouseholderQr h;
    h.q = DenseMat::identity(m);
    h.r = A;
    h.perm.resize(n);
    for (int j = 0; j < n; ++j) h.perm[j] = j;

    int steps = std::min(m, n);
    double scale = A.max_abs();
    for (int k = 0; k < steps; ++k) {
        if (pivot) {
            int best = k;
            double bestnorm = -1.0;
            for (int j = k; j < n; ++j) {
                double s = 0.0;
                for (int i = k; i < m; ++i) s += h.r(i, j) * h.r(i, j);
                if (s > bestnorm) {
                    bestnorm = s;
                    best = j;
                }
            }
            if (best != k) {
                for (int i = 0; i < m; ++i) std::swap(h.r(i, k), h.r(i, best));
                std::swap(h.perm[k], h.perm[best]);
            }
        }
        double sigma = 0.0;
        for (int i = k; i < m; ++i) sigma += h.r(i, k) * h.r(i, k);
        sigma = std::sqrt(sigma);
        if (sigma <= kRankTol * std::max(scale, 1e-300)) continue;
        double alpha = h.r(k, k) >= 0.0 ? -sigma : sigma;
        Vector v(m, 0.0);
        v[k] = h.r(k, k) - alpha;
        for (int i = k + 1; i < m; ++i) v[i] = h.r(i, k);
        double vtv = 0.0;
        for (int i = k; i < m; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        double beta = 2.0 / vtv;
        // R := (I - beta v v^T) R
        for (int j = k; j < n; ++j) {
            double w = 0.0;
            for (int i = k; i < m; ++i) w += v[i] * h.r(i, j);
            w *= beta;
            for (int i = k; i < m; ++i) h.r(i, j) -= w * v[i];
        }
        // Q := Q (I - beta v v^T)
        for (int i = 0; i < m; ++i) {
            double w = 0.0;
            for (int l = k; l < m; ++l) w += h.q(i, l) * v[l];
            w *= beta;
            for (int l = k; l < m; ++l) h.q(i, l) -= w * v[l];
        }
        h.r(k, k) = alpha;
        for (int i = k + 1; i < m; ++i) h.r(i, k) = 0.0;
    }
    double dmax = 0.0;
    for (int k = 0; k < steps; ++k) dmax = std::max(dmax, std::abs(h.r(k, k)));
    h.rank = 0;
    for (int k = 0; k < steps; ++k)
        if (std::abs(h.r(k, k)) > rtol * std::max(dmax, 1e-300)) ++h.rank;
        else break;
    return h;
}

} // namespace

OrthResult nullbasis(const DenseMat& M) {
    int m = M.rows(), n = M.cols();
    assert(m > n);
    HouseholderQr h = householder_qr(M, false);
    OrthResult res;
    res.q = h.q.block(0, n, m, m - n);
    // deficiency of M itself (null space larger than returned basis)
    double dmax = 0.0;
    for (int k = 0; k < n; ++k) dmax = std::max(dmax, std::abs(h.r(k, k)));
    for (int k = 0; k < n; ++k)
        if (std::abs(h.r(k, k)) <= kRankTol * std::max(dmax, 1e-300)) res.rank_deficient = true;
    return res;
}

DenseMat nullspace(const DenseMat& M, double rtol) {
    int m = M.rows(), n = M.cols();
    if (m == 0) return DenseMat::identity(n);
    HouseholderQr h = householder_qr(M.transposed(), true, rtol);
    int r = h.rank;
    return h.q.block(0, r, n, n - r);
}

DenseMat pinv_solve(const DenseMat& M, const DenseMat& rhs, int* rank_out) {
    [[maybe_unused]] int m = M.rows();
    int n = M.cols();
    assert(rhs.rows() == m);
    HouseholderQr h = householder_qr(M, true);
    int r = h.rank;
    if (rank_out) *rank_out = r;
    DenseMat X(n, rhs.cols());
    if (r == 0) return X;
    // top block T = R(0:r, 0:n); complete the decomposition with an LQ of T
    DenseMat T = h.r.block(0, 0, r, n);
    QrSmall tq = qr_mgs(T.transposed()); // T^T = Q2 R2  =>  T = R2^T Q2^T
    // c = (Q^T rhs)(0:r)
    DenseMat QtR = h.q.transposed() * rhs;
    for (int jc = 0; jc < rhs.cols(); ++jc) {
        Vector c(r);
        for (int i = 0; i < r; ++i) c[i] = QtR(i, jc);
        // solve R2^T z = c (lower triangular r x r)
        Vector z = solve_lower(tq.r.transposed(), c);
        // y = Q2 z; x = perm(y)
        Vector y(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = 0; k < r; ++k) s += tq.q(i, k) * z[k];
            y[i] = s;
        }
        for (int i = 0; i < n; ++i) X(h.perm[i], jc) = y[i];
    }
    return X;
}

Vector pinv_solve(const DenseMat& M, const Vector& rhs, int* rank_out) {
    DenseMat B(M.rows(), 1);
    B.set_col(0, rhs);
    return pinv_solve(M, B, rank_out).col(0);
}

DenseMat pinv(const DenseMat& M) {
    return pinv_solve(M, DenseMat::identity(M.rows()));
}

Vector pinv_solve_scaled(const DenseMat& M, const Vector& rhs, int* rank_out) {
    int m = M.rows(), n = M.cols();
    DenseMat Ms(m, n);
    std::vector<double> scale(static_cast<std::size_t>(n), 1.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += M(i, j) * M(i, j);
        s = std::sqrt(s);
        if (s > 0.0) scale[static_cast<std::size_t>(j)] = s;
        for (int i = 0; i < m; ++i) Ms(i, j) = M(i, j) / scale[static_cast<std::size_t>(j)];
    }
    Vector y = pinv_solve(Ms, rhs, rank_out);
    for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(j)] /= scale[static_cast<std::size_t>(j)];
    return y;
}

Vector solve_upper(const DenseMat& R, const Vector& b) {
    int n = R.cols();
    Vector x(b);
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= R(i, j) * x[j];
        x[i] = s / R(i, i);
    }
    return x;
}

Vector solve_lower(const DenseMat& L, const Vector& b) {
    int n = L.cols();
    Vector x(b);
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= L(i, j) * x[j];
        x[i] = s / L(i, i);
    }
    return x;
}

CholResult cholesky(const DenseMat& S) {
    int n = S.rows();
    CholResult res;
    res.r = DenseMat(n, n);
    double dmax = S.max_abs();
    for (int j = 0; j < n; ++j) {
        double d = S(j, j);
        for (int k = 0; k < j; ++k) d -= res.r(k, j) * res.r(k, j);
        if (d <= kRankTol * std::max(dmax, 1e-300)) {
            res.ok = false;
            return res;
        }
        double rjj = std::sqrt(d);
        res.r(j, j) = rjj;
        for (int i = j + 1; i < n; ++i) {
            double s = S(j, i);
            for (int k = 0; k < j; ++k) s -= res.r(k, j) * res.r(k, i);
            res.r(j, i) = s / rjj;
        }
    }
    return res;
}

} // namespace idrkit
