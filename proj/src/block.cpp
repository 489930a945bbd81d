#include "idrkit/block.hpp"

#include <cassert>

namespace idrkit {

DenseMat block_tdot(const Block& X, const Block& Y, const Blas& blas) {
    DenseMat M(static_cast<int>(X.size()), static_cast<int>(Y.size()));
    for (std::size_t j = 0; j < Y.size(); ++j)
        for (std::size_t i = 0; i < X.size(); ++i)
            M(static_cast<int>(i), static_cast<int>(j)) = blas.dot(X[i], Y[j]);
    return M;
}

Vector block_tdot_vec(const Block& X, const Vector& v, const Blas& blas) {
    Vector y(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) y[i] = blas.dot(X[i], v);
    return y;
}

DenseMat block_gram(const Block& X, const Blas& blas) {
    int k = static_cast<int>(X.size());
    DenseMat G(k, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i <= j; ++i) {
            double d = blas.dot(X[i], X[j]);
            G(i, j) = d;
            G(j, i) = d;
        }
    return G;
}

Block block_mul(const Block& X, const DenseMat& M, const Blas& blas) {
    assert(static_cast<int>(X.size()) == M.rows());
    std::size_t n = X.empty() ? 0 : X[0].size();
    Block Y(static_cast<std::size_t>(M.cols()));
    for (int j = 0; j < M.cols(); ++j) {
        Vector& y = Y[static_cast<std::size_t>(j)];
        y.assign(n, 0.0);
        for (int i = 0; i < M.rows(); ++i)
            blas.axpy(M(i, j), X[static_cast<std::size_t>(i)], y);
    }
    return Y;
}

Vector block_mul_vec(const Block& X, const Vector& m, const Blas& blas) {
    assert(X.size() == m.size());
    std::size_t n = X.empty() ? 0 : X[0].size();
    Vector y(n, 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) blas.axpy(m[i], X[i], y);
    return y;
}

void block_accum_vec(const Block& X, const Vector& m, Vector& y, const Blas& blas) {
    assert(X.size() == m.size());
    for (std::size_t i = 0; i < X.size(); ++i) blas.axpy(m[i], X[i], y);
}

BlockQr qr_mgs(Block& B, const Blas& blas) {
    int k = static_cast<int>(B.size());
    BlockQr res;
    res.r = DenseMat(k, k);
    double scale = 0.0;
    {
        Blas quiet; // scale estimate is not part of the counted work
        for (const Vector& c : B) scale += quiet.dot(c, c);
        scale = std::sqrt(scale);
    }
    for (int j = 0; j < k; ++j) {
        Vector& q = B[static_cast<std::size_t>(j)];
        for (int i = 0; i < j; ++i) {
            double rij = blas.dot(B[static_cast<std::size_t>(i)], q);
            res.r(i, j) = rij;
            blas.axpy(-rij, B[static_cast<std::size_t>(i)], q);
        }
        double nrm = blas.nrm2(q);
        res.r(j, j) = nrm;
        if (nrm <= kRankTol * std::max(scale, 1e-300)) {
            res.rank_deficient = true;
            std::fill(q.begin(), q.end(), 0.0);
        } else {
            blas.scal(1.0 / nrm, q);
        }
    }
    return res;
}

SplitQr qr_against(const Block& head, Block& tail, const Blas& blas) {
    int h = static_cast<int>(head.size());
    int t = static_cast<int>(tail.size());
    SplitQr res;
    res.c = DenseMat(h, t);
    res.r = DenseMat(t, t);
    double scale = 0.0;
    {
        Blas quiet;
        for (const Vector& c : tail) scale += quiet.dot(c, c);
        scale = std::sqrt(scale);
    }
    for (int j = 0; j < t; ++j) {
        Vector& q = tail[static_cast<std::size_t>(j)];
        for (int i = 0; i < h; ++i) {
            double cij = blas.dot(head[static_cast<std::size_t>(i)], q);
            res.c(i, j) = cij;
            blas.axpy(-cij, head[static_cast<std::size_t>(i)], q);
        }
        for (int i = 0; i < j; ++i) {
            double rij = blas.dot(tail[static_cast<std::size_t>(i)], q);
            res.r(i, j) = rij;
            blas.axpy(-rij, tail[static_cast<std::size_t>(i)], q);
        }
        double nrm = blas.nrm2(q);
        res.r(j, j) = nrm;
        if (nrm <= kRankTol * std::max(scale, 1e-300)) {
            res.rank_deficient = true;
            std::fill(q.begin(), q.end(), 0.0);
        } else {
            blas.scal(1.0 / nrm, q);
        }
    }
    return res;
}

double subspace_residual(const Block& basis, const Vector& v) {
    Blas quiet;
    Vector w = v;
    for (const Vector& q : basis) {
        double c = quiet.dot(q, w);
        quiet.axpy(-c, q, w);
    }
    double nv = quiet.nrm2(v);
    if (nv == 0.0) return 0.0;
    return quiet.nrm2(w) / nv;
}

} // namespace idrkit
