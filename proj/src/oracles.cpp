#include "idrkit/oracles.hpp"

namespace idrkit {

namespace {

constexpr double kOracleTol = 1e-11; // rank decisions inside the dense oracles

// append v to the orthonormal basis if it sticks out; returns true if grown
bool grow(Block& basis, Vector v, double scale) {
    Blas quiet;
    for (int pass = 0; pass < 2; ++pass)
        for (const Vector& q : basis) {
            double c = quiet.dot(q, v);
            quiet.axpy(-c, q, v);
        }
    double n = quiet.nrm2(v);
    if (n <= kOracleTol * std::max(scale, 1e-300)) return false;
    quiet.scal(1.0 / n, v);
    basis.push_back(std::move(v));
    return true;
}

Vector dense_apply(const DenseMat& a, const Vector& v) { return a * v; }

} // namespace

Block krylov_basis(const DenseMat& a, const Vector& b) {
    Block basis;
    Blas quiet;
    double scale = quiet.nrm2(b);
    if (!grow(basis, b, scale)) return basis;
    for (;;) {
        Vector t = dense_apply(a, basis.back());
        if (!grow(basis, std::move(t), scale + a.frobenius())) break;
        if (static_cast<int>(basis.size()) >= a.rows()) break;
    }
    // saturate: keep multiplying until no direction sticks out any more
    bool grew = true;
    while (grew && static_cast<int>(basis.size()) < a.rows()) {
        grew = false;
        std::size_t sz = basis.size();
        for (std::size_t k = 0; k < sz; ++k) {
            Vector t = dense_apply(a, basis[k]);
            if (grow(basis, std::move(t), a.frobenius())) grew = true;
        }
    }
    return basis;
}

Block intersect_nullspace(const Block& basis, const Block& p) {
    int g = static_cast<int>(basis.size());
    int s = static_cast<int>(p.size());
    if (g == 0) return {};
    Blas quiet;
    DenseMat c(s, g); // C = P^T B
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < s; ++i)
            c(i, j) = quiet.dot(p[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
    DenseMat q = nullspace(c, kOracleTol);
    Block out;
    for (int j = 0; j < q.cols(); ++j) {
        Vector coef = q.col(j);
        Vector v(basis[0].size(), 0.0);
        for (int i = 0; i < g; ++i)
            quiet.axpy(coef[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(i)], v);
        grow(out, std::move(v), 1.0);
    }
    return out;
}

Block sonneveld_step(const DenseMat& a, const Block& basis, const Block& p,
                     const Vector& tau) {
    int ell = static_cast<int>(tau.size());
    int g = static_cast<int>(basis.size());
    int s = static_cast<int>(p.size());
    if (g == 0) return {};
    Blas quiet;
    // constraints P^T A^k x = 0 for k = 0..ell-1 (the ell-step recursion
    // intersects with K_ell^perp(A^T; P))
    DenseMat c(ell * s, g);
    Block pw = basis;
    for (int k = 0; k < ell; ++k) {
        for (int j = 0; j < g; ++j)
            for (int i = 0; i < s; ++i)
                c(k * s + i, j) = quiet.dot(p[static_cast<std::size_t>(i)], pw[static_cast<std::size_t>(j)]);
        if (k + 1 < ell)
            for (Vector& v : pw) v = dense_apply(a, v);
    }
    DenseMat q = nullspace(c, kOracleTol);
    Block inter;
    for (int j = 0; j < q.cols(); ++j) {
        Vector coef = q.col(j);
        Vector v(basis[0].size(), 0.0);
        for (int i = 0; i < g; ++i)
            quiet.axpy(coef[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(i)], v);
        grow(inter, std::move(v), 1.0);
    }
    Block out;
    for (const Vector& v : inter) {
        // q(A) v = v - sum tau_k A^k v
        Vector acc = v;
        Vector apow = v;
        for (std::size_t k = 0; k < tau.size(); ++k) {
            apow = dense_apply(a, apow);
            quiet.axpy(-tau[k], apow, acc);
        }
        grow(out, std::move(acc), 1.0);
    }
    return out;
}

SonneveldOracle SonneveldOracle::start(const DenseMat& a, const Vector& b, const Block& p) {
    SonneveldOracle o;
    o.a = a;
    o.p = p;
    o.basis = krylov_basis(a, b);
    return o;
}

void SonneveldOracle::advance(const Vector& tau) {
    basis = sonneveld_step(a, basis, p, tau);
    degree += static_cast<int>(tau.size());
}

MspaceOracle MspaceOracle::start(const DenseMat& a, const Vector& b1, const Vector& b2,
                                 const Block& p, int J) {
    MspaceOracle o;
    o.a = a;
    o.p = p;
    o.b2 = b2;
    o.cap_degree = J;
    o.basis = krylov_basis(a, b1);
    Block k2 = krylov_basis(a, b2);
    for (const Vector& v : k2) grow(o.basis, Vector(v), 1.0);
    return o;
}

void MspaceOracle::advance_omega(double omega) {
    basis = sonneveld_step(a, basis, p, Vector{omega});
    ++degree;
    if (degree <= cap_degree) grow(basis, Vector(b2), 1.0);
}

double subspace_containment(const Block& outer, const Block& inner) {
    double worst = 0.0;
    for (const Vector& v : inner) worst = std::max(worst, subspace_residual(outer, v));
    return worst;
}

Vector dense_lsq_oracle(const DenseMat& m, const Vector& rhs) {
    // normal equations with one refinement sweep
    DenseMat mt = m.transposed();
    DenseMat g = mt * m;
    Vector c = mat_t_vec(m, rhs);
    Vector x = pinv_solve(g, c);
    Vector res = rhs;
    Blas quiet;
    Vector mx = m * x;
    quiet.axpy(-1.0, mx, res);
    Vector corr = pinv_solve(g, mat_t_vec(m, res));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += corr[i];
    return x;
}

double dense_gmres_oracle(const DenseMat& a, const Vector& b, int i) {
    // minimise ||b - A x|| over x in K_i(A; b)
    Block basis;
    Blas quiet;
    Vector v = b;
    basis.push_back(v);
    for (int k = 1; k < i; ++k) basis.push_back(dense_apply(a, basis.back()));
    // orthonormalise the (power) basis for stability
    Block q = basis;
    BlockQr bq = qr_mgs(q, quiet);
    int rank = 0;
    for (int k = 0; k < bq.r.rows(); ++k)
        if (bq.r(k, k) > 0.0) ++rank;
    DenseMat m(a.rows(), rank);
    int c = 0;
    for (int k = 0; k < static_cast<int>(q.size()); ++k) {
        if (bq.r(k, k) == 0.0) continue;
        Vector av = dense_apply(a, q[static_cast<std::size_t>(k)]);
        m.set_col(c++, av);
    }
    Vector chi = dense_lsq_oracle(m, b);
    Vector res = b;
    Vector mchi = m * chi;
    quiet.axpy(-1.0, mchi, res);
    return quiet.nrm2(res);
}

} // namespace idrkit
