#ifndef IDRKIT_DENSE_HPP
#define IDRKIT_DENSE_HPP

#include <initializer_list>
#include <utility>

#include "idrkit/core.hpp"

namespace idrkit {

/// Small dense matrix (dimensions <= 3s+3 in all solver paths),
/// column-major storage.
class DenseMat {
public:
    DenseMat() = default;
    DenseMat(int m, int n) : m_(m), n_(n), a_(static_cast<std::size_t>(m) * n, 0.0) {}

    static DenseMat identity(int n) {
        DenseMat I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }
    static DenseMat from_rows(std::initializer_list<std::initializer_list<double>> rows);

    int rows() const { return m_; }
    int cols() const { return n_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(j) * m_ + i]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(j) * m_ + i]; }

    Vector col(int j) const {
        Vector c(m_);
        for (int i = 0; i < m_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_col(int j, const Vector& c) {
        for (int i = 0; i < m_; ++i) (*this)(i, j) = c[i];
    }

    DenseMat block(int i0, int j0, int mm, int nn) const {
        DenseMat B(mm, nn);
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < mm; ++i) B(i, j) = (*this)(i0 + i, j0 + j);
        return B;
    }
    void set_block(int i0, int j0, const DenseMat& B) {
        for (int j = 0; j < B.cols(); ++j)
            for (int i = 0; i < B.rows(); ++i) (*this)(i0 + i, j0 + j) = B(i, j);
    }

    DenseMat transposed() const {
        DenseMat T(n_, m_);
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < m_; ++i) T(j, i) = (*this)(i, j);
        return T;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }
    double max_abs() const {
        double s = 0.0;
        for (double v : a_) s = std::max(s, std::abs(v));
        return s;
    }

private:
    int m_ = 0, n_ = 0;
    std::vector<double> a_;
};

DenseMat operator*(const DenseMat& A, const DenseMat& B);
DenseMat operator*(double alpha, const DenseMat& A);
DenseMat operator+(const DenseMat& A, const DenseMat& B);
DenseMat operator-(const DenseMat& A, const DenseMat& B);
Vector operator*(const DenseMat& A, const Vector& x);
Vector mat_t_vec(const DenseMat& A, const Vector& x); // A^T x

/// Relative rank tolerance used by every rank decision on small matrices.
inline constexpr double kRankTol = 1e-13;

struct QrSmall {
    DenseMat q; // m x n, orthonormal columns
    DenseMat r; // n x n upper triangular
    bool rank_deficient = false;
};

struct LqSmall {
    DenseMat l; // b x b lower triangular
    DenseMat q; // a x b, orthonormal columns, L = B * Q
    bool rank_deficient = false;
};

/// Reduced QR by modified Gram-Schmidt (m >= n).
QrSmall qr_mgs(const DenseMat& B);

/// LQ via QR of the transpose: L = B * Q.
LqSmall lq(const DenseMat& B);

/// 2x2 rotation with G*v = (||v||, 0); v = (0,0) yields the identity.
struct GivensRotation {
    double c = 1.0, s = 0.0; // G = [[c, s], [-s, c]]
    void apply(double& a, double& b) const {
        double t0 = c * a + s * b;
        double t1 = -s * a + c * b;
        a = t0;
        b = t1;
    }
};
GivensRotation givens(double a, double b);

/// Orthonormal basis of range(B); cond(result) = 1.
struct OrthResult {
    DenseMat q;
    bool rank_deficient = false;
};
OrthResult orth(const DenseMat& B);

/// Orthonormalised rows: same null space as B, cond = 1. (b <= a rows.)
OrthResult roworth(const DenseMat& B);

/// Orthonormal columns spanning the null space of M^T, for M (a x b, a > b):
/// M^T * Q_G = 0. Built from the unreduced Householder QR of M.
OrthResult nullbasis(const DenseMat& M);

/// Orthonormal basis of the null space of M (rank-revealing full QR of M^T);
/// works for any shape including rank-deficient input.
DenseMat nullspace(const DenseMat& M, double rtol = kRankTol);

/// Minimum-norm least-squares solve through a complete orthogonal
/// decomposition (column-pivoted Householder QR + LQ of the top block).
/// `rank_out`, when given, receives the detected numerical rank.
Vector pinv_solve(const DenseMat& M, const Vector& rhs, int* rank_out = nullptr);
DenseMat pinv_solve(const DenseMat& M, const DenseMat& rhs, int* rank_out = nullptr);

/// Explicit pseudo-inverse (small matrices only).
DenseMat pinv(const DenseMat& M);

/// Column-equilibrated least-squares solve: columns are scaled to unit norm
/// before the pseudo-inverse so that rank decisions stay per-column
/// relative. The oblique-projection systems Z xi = eta need this because the
/// bookkeeping mixes columns whose scales differ by powers of ||A||.
Vector pinv_solve_scaled(const DenseMat& M, const Vector& rhs, int* rank_out = nullptr);

/// Triangular solves; `unit_diag` treats the diagonal as ones.
Vector solve_upper(const DenseMat& R, const Vector& b);
Vector solve_lower(const DenseMat& L, const Vector& b);

struct CholResult {
    DenseMat r; // upper triangular, S = R^T R
    bool ok = true;
};
CholResult cholesky(const DenseMat& S);

} // namespace idrkit

#endif
