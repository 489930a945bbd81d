#include "idrkit/blocks.hpp"

#include <cassert>

namespace idrkit {

namespace {

double quad_form(const DenseMat& S, const Vector& y) {
    double acc = 0.0;
    for (int i = 0; i < S.rows(); ++i) {
        double row = 0.0;
        for (int j = 0; j < S.cols(); ++j) row += S(i, j) * y[j];
        acc += y[i] * row;
    }
    return acc;
}

double s_norm(const DenseMat& S, const Vector& y) {
    return std::sqrt(std::max(0.0, quad_form(S, y)));
}

double sign_plus(double x) { return x < 0.0 ? -1.0 : 1.0; } // sign(0) := +1

// y^(0), y^(ell) of the stability step: unit head/tail entry, middle block
// solved against the interior powers.
void head_tail_vectors(const DenseMat& S, Vector& y0, Vector& yell) {
    int ell = S.rows() - 1;
    y0.assign(ell + 1, 0.0);
    yell.assign(ell + 1, 0.0);
    y0[0] = 1.0;
    yell[ell] = 1.0;
    if (ell >= 2) {
        DenseMat mid = S.block(1, 1, ell - 1, ell - 1);
        DenseMat rhs(ell - 1, 2);
        for (int i = 0; i < ell - 1; ++i) {
            rhs(i, 0) = S(1 + i, 0);
            rhs(i, 1) = S(1 + i, ell);
        }
        DenseMat sol = pinv_solve(mid, rhs);
        for (int i = 0; i < ell - 1; ++i) {
            y0[1 + i] = -sol(i, 0);
            yell[1 + i] = -sol(i, 1);
        }
    }
}

StabResult annihilation_result(const DenseMat& S) {
    int ell = S.rows() - 1;
    StabResult res;
    res.annihilation = true;
    DenseMat Spow = S.block(1, 1, ell, ell);
    Vector rhs(ell);
    for (int i = 0; i < ell; ++i) rhs[i] = S(1 + i, 0);
    res.tau = pinv_solve(Spow, rhs);
    Vector y(ell + 1, 0.0);
    y[0] = 1.0;
    for (int k = 0; k < ell; ++k) y[k + 1] = -res.tau[k];
    res.beta_new = s_norm(S, y);
    return res;
}

} // namespace

StabResult stab_coeffs_gram(const DenseMat& S, double beta, double alpha,
                            DeltaVariant variant) {
    int ell = S.rows() - 1;
    assert(ell >= 1);
    Vector y0, yell;
    head_tail_vectors(S, y0, yell);
    double kappa0 = s_norm(S, y0);
    double kappa_ell = s_norm(S, yell);

    if (kappa_ell <= 1e-14 * std::sqrt(std::max(S(ell, ell), 0.0)) ||
        kappa0 <= 1e-14 * std::max(beta, 0.0)) {
        return annihilation_result(S);
    }

    StabResult res;
    res.kappa0 = kappa0;
    res.kappa_ell = kappa_ell;
    double rho = 0.0;
    {
        Vector Sy0(ell + 1, 0.0);
        for (int i = 0; i <= ell; ++i)
            for (int j = 0; j <= ell; ++j) Sy0[i] += S(i, j) * y0[j];
        for (int i = 0; i <= ell; ++i) rho += yell[i] * Sy0[i];
        rho /= kappa0 * kappa_ell;
    }
    rho = std::min(1.0, std::max(-1.0, rho));
    res.rho = rho;

    double sa = std::sin(alpha);
    double delta;
    if (std::abs(rho) >= sa) {
        delta = -(kappa0 / kappa_ell) * rho;
    } else {
        res.stressed_branch = true;
        if (variant == DeltaVariant::stressed) {
            double arg = alpha + (M_PI / 4.0) * (sign_plus(rho) + 1.0) - std::acos(rho);
            delta = -(kappa0 / kappa_ell) * sa / std::sin(arg);
        } else {
            delta = -(kappa0 / kappa_ell) * sign_plus(rho) * sa;
        }
    }
    res.delta = delta;

    Vector y(ell + 1);
    for (int i = 0; i <= ell; ++i) y[i] = y0[i] + delta * yell[i];
    res.tau.resize(ell);
    for (int k = 0; k < ell; ++k) res.tau[k] = -y[k + 1];
    res.beta_new = s_norm(S, y);
    return res;
}

StabResult argmin_coeffs_gram(const DenseMat& S, double beta) {
    int ell = S.rows() - 1;
    Vector y0, yell;
    head_tail_vectors(S, y0, yell);
    double kappa0 = s_norm(S, y0);
    double kappa_ell = s_norm(S, yell);
    if (kappa_ell <= 1e-14 * std::sqrt(std::max(S(ell, ell), 0.0)) ||
        kappa0 <= 1e-14 * std::max(beta, 0.0)) {
        return annihilation_result(S);
    }
    StabResult res;
    res.kappa0 = kappa0;
    res.kappa_ell = kappa_ell;
    DenseMat Spow = S.block(1, 1, ell, ell);
    Vector rhs(ell);
    for (int i = 0; i < ell; ++i) rhs[i] = S(1 + i, 0);
    res.tau = pinv_solve(Spow, rhs);
    Vector y(ell + 1, 0.0);
    y[0] = 1.0;
    for (int k = 0; k < ell; ++k) y[k + 1] = -res.tau[k];
    res.beta_new = s_norm(S, y);
    return res;
}

StabResult stab_coeffs(const std::vector<const Vector*>& powers, double beta,
                       const Blas& blas, OmegaStrategy strategy, double alpha,
                       DeltaVariant variant) {
    int np = static_cast<int>(powers.size());
    DenseMat S(np, np);
    S(0, 0) = beta * beta; // exploit S_{1,1} = beta^2
    for (int j = 0; j < np; ++j)
        for (int i = 0; i <= j; ++i) {
            if (i == 0 && j == 0) continue;
            double d = blas.dot(*powers[i], *powers[j]);
            S(i, j) = d;
            S(j, i) = d;
        }
    return strategy == OmegaStrategy::argmin ? argmin_coeffs_gram(S, beta)
                                             : stab_coeffs_gram(S, beta, alpha, variant);
}

StabResult stab_coeffs_small(const std::vector<Vector>& padded_coeffs, double beta,
                             OmegaStrategy strategy, double alpha, DeltaVariant variant) {
    int np = static_cast<int>(padded_coeffs.size());
    DenseMat S(np, np);
    Blas quiet;
    for (int j = 0; j < np; ++j)
        for (int i = 0; i <= j; ++i) {
            double d = quiet.dot(padded_coeffs[i], padded_coeffs[j]);
            S(i, j) = d;
            S(j, i) = d;
        }
    S(0, 0) = beta * beta;
    return strategy == OmegaStrategy::argmin ? argmin_coeffs_gram(S, beta)
                                             : stab_coeffs_gram(S, beta, alpha, variant);
}

bool omega_breakdown(const StabResult& sr) {
    if (sr.annihilation) return false;
    double scale = sr.kappa0 / std::max(sr.kappa_ell, 1e-300);
    return std::abs(sr.tau.back()) <= 1e-14 * scale;
}

// ------------------------------------------------------- biorthogonalisation

Vector solve_z(const DenseMat& z, const Vector& rhs, bool* deficient) {
    int n = z.rows();
    double scale = z.frobenius();
    for (int i = 0; i < n; ++i) {
        if (std::abs(z(i, i)) <= 1e-14 * std::max(scale, 1e-300)) {
            if (deficient) *deficient = true;
            return pinv_solve(z, rhs);
        }
    }
    return solve_lower(z, rhs);
}

BioStatus dir_rbio(const std::vector<Block*>& stacks, const DenseMat& z, Vector& x,
                   const std::vector<Vector*>& r_powers, Vector& eta, const Blas& blas) {
    BioStatus st;
    int rank = 0;
    Vector xi = pinv_solve_scaled(z, eta, &rank);
    if (rank < z.cols()) st.deficiency = true;
    for (std::size_t g = 0; g < r_powers.size(); ++g)
        for (std::size_t q = 0; q < xi.size(); ++q)
            blas.axpy(-xi[q], (*stacks[g + 1])[q], *r_powers[g]);
    for (std::size_t q = 0; q < xi.size(); ++q) blas.axpy(xi[q], (*stacks[0])[q], x);
    std::fill(eta.begin(), eta.end(), 0.0);
    return st;
}

BioStatus it_rbio(int q, const std::vector<Block*>& stacks, const DenseMat& z, Vector& x,
                  const std::vector<Vector*>& r_powers, Vector& eta, const Blas& blas) {
    BioStatus st;
    double piv = z(q - 1, q - 1);
    if (std::abs(piv) < 1e-14 * std::max(z.frobenius(), 1e-300)) {
        st.ok = false;
        st.kind = BreakdownKind::pivot;
        return st;
    }
    double xi = eta[q - 1] / piv;
    for (std::size_t g = 0; g < r_powers.size(); ++g)
        blas.axpy(-xi, (*stacks[g + 1])[q - 1], *r_powers[g]);
    blas.axpy(xi, (*stacks[0])[q - 1], x);
    for (int i = 0; i < z.rows(); ++i) eta[i] -= z(i, q - 1) * xi;
    return st;
}

BioStatus it_vbio(int q, const Block& p, const std::vector<Block*>& stacks, DenseMat& z,
                  const Blas& blas) {
    BioStatus st;
    int s = static_cast<int>(p.size());
    Block& top = *stacks.back();
    double zscale = z.frobenius();
    for (int i = 1; i <= q - 1; ++i) {
        double piv = z(i - 1, i - 1);
        if (std::abs(piv) < 1e-14 * std::max(zscale, 1e-300)) {
            st.ok = false;
            st.kind = BreakdownKind::pivot;
            return st;
        }
        double xi = blas.dot(p[i - 1], top[q - 1]) / piv;
        for (Block* stk : stacks) blas.axpy(-xi, (*stk)[i - 1], (*stk)[q - 1]);
    }
    for (int i = q; i <= s; ++i) z(i - 1, q - 1) = blas.dot(p[i - 1], top[q - 1]);
    for (int i = 0; i < q - 1; ++i) z(i, q - 1) = 0.0;
    return st;
}

BioStatus it_vorth(int q, const std::vector<Block*>& stacks, const Blas& blas) {
    BioStatus st;
    Block& v0 = *stacks[1]; // V^(0) drives the coefficients
    Blas quiet;
    double initial = quiet.nrm2(v0[q - 1]);
    for (int i = 1; i <= q - 1; ++i) {
        double xi = blas.dot(v0[i - 1], v0[q - 1]);
        for (Block* stk : stacks) blas.axpy(-xi, (*stk)[i - 1], (*stk)[q - 1]);
    }
    double nrm = blas.nrm2(v0[q - 1]);
    if (nrm < 1e-14 * std::max(initial, 1e-300)) {
        st.lucky_collinearity = true;
        return st;
    }
    double inv = 1.0 / nrm;
    for (Block* stk : stacks) blas.scal(inv, (*stk)[q - 1]);
    return st;
}

BioStatus it_vobio(int q, const Block& p, const std::vector<Block*>& stacks, DenseMat& z,
                   const Blas& blas) {
    BioStatus st = it_vorth(q, stacks, blas);
    if (st.lucky_collinearity || !st.ok) return st;
    int s = static_cast<int>(p.size());
    Block& top = *stacks.back();
    for (int i = 1; i <= s; ++i) z(i - 1, q - 1) = blas.dot(p[i - 1], top[q - 1]);
    // right-applied rotations on column pairs [i, q]: 2x2 LQ of the pivot
    // block, executed as a plane rotation so cond(V^(0)) is untouched
    for (int i = 1; i <= q - 1; ++i) {
        double a = z(i - 1, i - 1);
        double b = z(i - 1, q - 1);
        if (a == 0.0 && b == 0.0) continue;
        double r = std::hypot(a, b);
        double c = a / r, sn = b / r; // Q = [[c, -sn], [sn, c]], row * Q = (r, 0)
        for (int row = 0; row < z.rows(); ++row) {
            double zi = z(row, i - 1), zq = z(row, q - 1);
            z(row, i - 1) = c * zi + sn * zq;
            z(row, q - 1) = -sn * zi + c * zq;
        }
        z(i - 1, q - 1) = 0.0;
        for (Block* stk : stacks) {
            if (stk->size() < static_cast<std::size_t>(q)) continue;
            Vector& vi = (*stk)[i - 1];
            Vector& vq = (*stk)[q - 1];
            if (blas.pc) blas.pc->n_axpy += 2;
            for (std::size_t k = 0; k < vi.size(); ++k) {
                double a0 = vi[k], b0 = vq[k];
                vi[k] = c * a0 + sn * b0;
                vq[k] = -sn * a0 + c * b0;
            }
        }
    }
    for (int i = 0; i < q - 1; ++i) z(i, q - 1) = 0.0;
    return st;
}

// ------------------------------------------------------------------ Arnoldi

namespace {

enum class ArnMode { plain, projected, augmented };

GmresResult arnoldi_driver(ArnMode mode, Operator& op, const Block* p, const DenseMat* z,
                           const Block* vm1, const Block* v0, const Vector& x_in,
                           const Vector& r, double beta, int m, double tolabs,
                           const Blas& blas, const InnerHook& hook) {
    int s = p ? static_cast<int>(p->size()) : 0;
    GmresResult res;
    Block w;
    w.reserve(static_cast<std::size_t>(m) + 1);
    {
        Vector w1;
        blas.scaled_copy(1.0 / beta, r, w1);
        w.push_back(std::move(w1));
    }
    DenseMat H(m + 1, m), R(m + 1, m);
    DenseMat Y;
    if (mode == ArnMode::projected) Y = DenseMat(s, m + 1);
    if (mode == ArnMode::augmented) Y = DenseMat(s, m);
    Vector gamma(static_cast<std::size_t>(m) + 1, 0.0);
    gamma[0] = beta;
    DenseMat Qacc = DenseMat::identity(m + 1);
    std::vector<GivensRotation> rots;
    double h_scale = 0.0;
    bool happy = false;

    auto solve_zeta = [&](int i) {
        DenseMat Ri = R.block(0, 0, i, i);
        double dmax = Ri.max_abs();
        for (int k = 0; k < i; ++k)
            if (std::abs(Ri(k, k)) <= kRankTol * std::max(dmax, 1e-300)) {
                Vector g(i);
                for (int k2 = 0; k2 < i; ++k2) g[k2] = gamma[k2];
                return pinv_solve(Ri, g);
            }
        Vector g(i);
        for (int k = 0; k < i; ++k) g[k] = gamma[k];
        return solve_upper(Ri, g);
    };

    auto build_x = [&](int i, const Blas& b2) {
        Vector zeta = solve_zeta(i);
        Vector x = x_in;
        for (int k = 0; k < i; ++k) b2.axpy(zeta[k], w[static_cast<std::size_t>(k)], x);
        if (mode != ArnMode::plain) {
            Vector ysum(s, 0.0);
            for (int k = 0; k < i; ++k)
                for (int row = 0; row < s; ++row) ysum[row] += Y(row, k) * zeta[k];
            Vector u = solve_z(*z, ysum);
            for (int q = 0; q < static_cast<int>(vm1->size()); ++q)
                b2.axpy(-u[q], (*vm1)[q], x);
        }
        return x;
    };

    for (int i = 1; i <= m; ++i) {
        Vector wn;
        if (mode == ArnMode::projected) {
            Vector ycol = block_tdot_vec(*p, w[static_cast<std::size_t>(i - 1)], blas);
            Y.set_col(i - 1, ycol);
            Vector xi = solve_z(*z, ycol);
            Vector t = w[static_cast<std::size_t>(i - 1)];
            for (int q = 0; q < static_cast<int>(vm1->size()); ++q)
                blas.axpy(-xi[q], (*vm1)[q], t);
            wn = op.apply(t);
        } else {
            wn = op.apply(w[static_cast<std::size_t>(i - 1)]);
            if (mode == ArnMode::augmented) {
                Vector ycol = block_tdot_vec(*p, wn, blas);
                Y.set_col(i - 1, ycol);
                Vector xi = solve_z(*z, ycol);
                for (int q = 0; q < static_cast<int>(v0->size()); ++q)
                    blas.axpy(-xi[q], (*v0)[q], wn);
            }
        }
        for (int j = 0; j < i; ++j) {
            double hji = blas.dot(w[static_cast<std::size_t>(j)], wn);
            H(j, i - 1) = hji;
            blas.axpy(-hji, w[static_cast<std::size_t>(j)], wn);
            h_scale = std::max(h_scale, std::abs(hji));
        }
        double hnext = blas.nrm2(wn);
        H(i, i - 1) = hnext;
        h_scale = std::max(h_scale, hnext);
        happy = hnext <= 1e-14 * std::max(h_scale, 1e-300);
        if (!happy) blas.scal(1.0 / hnext, wn);
        else std::fill(wn.begin(), wn.end(), 0.0);
        w.push_back(std::move(wn));

        for (int k = 0; k <= i; ++k) R(k, i - 1) = H(k, i - 1);
        for (int j = 0; j < i - 1; ++j) {
            double a = R(j, i - 1), b = R(j + 1, i - 1);
            rots[static_cast<std::size_t>(j)].apply(a, b);
            R(j, i - 1) = a;
            R(j + 1, i - 1) = b;
        }
        GivensRotation g = givens(R(i - 1, i - 1), R(i, i - 1));
        {
            double a = R(i - 1, i - 1), b = R(i, i - 1);
            g.apply(a, b);
            R(i - 1, i - 1) = a;
            R(i, i - 1) = 0.0;
        }
        for (int col = 0; col <= m; ++col) {
            double a = Qacc(i - 1, col), b = Qacc(i, col);
            g.apply(a, b);
            Qacc(i - 1, col) = a;
            Qacc(i, col) = b;
        }
        {
            double a = gamma[static_cast<std::size_t>(i - 1)], b = gamma[static_cast<std::size_t>(i)];
            g.apply(a, b);
            gamma[static_cast<std::size_t>(i - 1)] = a;
            gamma[static_cast<std::size_t>(i)] = b;
        }
        rots.push_back(g);

        double gnext = std::abs(gamma[static_cast<std::size_t>(i)]);
        res.gamma_history.push_back(gnext);
        if (hook) {
            Blas quiet;
            hook(i, gnext, [&, i]() { return build_x(i, quiet); });
        }

        if (gnext <= tolabs || happy) {
            res.converged = true;
            res.happy_breakdown = happy;
            res.iters = i;
            res.beta = gnext;
            res.x = build_x(i, blas);
            res.bundle.w = std::move(w);
            res.bundle.h = H.block(0, 0, i + 1, i);
            res.bundle.r_h = R.block(0, 0, i, i);
            res.bundle.q_h = Qacc.block(0, 0, i, i + 1).transposed();
            if (mode != ArnMode::plain) res.bundle.y = Y;
            return res;
        }
    }

    if (mode == ArnMode::projected) {
        Vector ycol = block_tdot_vec(*p, w[static_cast<std::size_t>(m)], blas);
        Y.set_col(m, ycol);
    }
    res.iters = m;
    res.beta = std::abs(gamma[static_cast<std::size_t>(m)]);
    res.bundle.w = std::move(w);
    res.bundle.h = H;
    res.bundle.r_h = R.block(0, 0, m, m);
    res.bundle.q_h = Qacc.block(0, 0, m, m + 1).transposed();
    if (mode != ArnMode::plain) res.bundle.y = Y;
    return res;
}

} // namespace

GmresResult gmres_m(Operator& op, const Vector& x, const Vector& r, double beta, int m,
                    double tolabs, const Blas& blas, const InnerHook& hook) {
    return arnoldi_driver(ArnMode::plain, op, nullptr, nullptr, nullptr, nullptr, x, r, beta,
                          m, tolabs, blas, hook);
}

GmresResult pgmres_m(Operator& op, const Block& p, const DenseMat& z, const Block& vm1,
                     const Vector& x, const Vector& r, double beta, int m, double tolabs,
                     const Blas& blas, const InnerHook& hook) {
    return arnoldi_driver(ArnMode::projected, op, &p, &z, &vm1, nullptr, x, r, beta, m,
                          tolabs, blas, hook);
}

GmresResult auggmres_m(Operator& op, const Block& p, const DenseMat& z, const Block& vm1,
                       const Block& v0, const Vector& x, const Vector& r, double beta, int m,
                       double tolabs, const Blas& blas, const InnerHook& hook) {
    return arnoldi_driver(ArnMode::augmented, op, &p, &z, &vm1, &v0, x, r, beta, m, tolabs,
                          blas, hook);
}

// ------------------------------------------------------------ initialisation

InitResult initialisation_from(Operator& op, const Vector& x0, const Vector& r0, double beta,
                               int s, double tolabs, Rng& rng, const Blas& blas,
                               const InnerHook& hook) {
    InitResult res;
    if (beta <= tolabs) {
        res.converged = true;
        res.x = x0;
        res.r = r0;
        res.beta = beta;
        return res;
    }
    GmresResult g = gmres_m(op, x0, r0, beta, s, tolabs, blas, hook);
    if (g.converged) {
        res.converged = true;
        res.x = std::move(g.x);
        res.beta = g.beta;
        return res;
    }

    Block p = rng.normal_block(r0.size(), static_cast<std::size_t>(s));
    BlockQr pqr = qr_mgs(p, blas);
    res.deficiency = pqr.rank_deficient;

    DenseMat Y = block_tdot(p, g.bundle.w, blas); // s x (s+1)
    Vector eta(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) eta[static_cast<std::size_t>(i)] = beta * Y(i, 0);
    DenseMat Z0 = Y * g.bundle.q_h; // best available condition
    LqSmall zlq = lq(Z0);
    if (zlq.rank_deficient) res.deficiency = true;

    bool zdef = false;
    Vector t = solve_z(zlq.l, eta, &zdef);
    if (zdef) res.deficiency = true;
    Vector u = zlq.q * t;
    Vector xi = solve_upper(g.bundle.r_h, u);

    // c^(0) = beta e_1 - Q_H R_H xi, the biorthogonal residual in W coords
    Vector c0(static_cast<std::size_t>(s) + 1, 0.0);
    {
        Vector hxi = g.bundle.q_h * (g.bundle.r_h * xi);
        c0[0] = beta - hxi[0];
        for (int i = 1; i <= s; ++i) c0[static_cast<std::size_t>(i)] = -hxi[static_cast<std::size_t>(i)];
    }

    res.x = x0;
    Block w_head(g.bundle.w.begin(), g.bundle.w.begin() + s);
    block_accum_vec(w_head, xi, res.x, blas);
    res.r = block_mul_vec(g.bundle.w, c0, blas);
    {
        Blas quiet;
        res.beta = quiet.nrm2(c0);
    }

    // V^(-1) = W_{:,1:s} (R_H^{-1} Q_Z), V^(0) = W (Q_H Q_Z)
    DenseMat M1(s, s);
    for (int j = 0; j < s; ++j) M1.set_col(j, solve_upper(g.bundle.r_h, zlq.q.col(j)));
    res.proj.p = std::move(p);
    res.proj.vm1 = block_mul(w_head, M1, blas);
    res.proj.v0 = block_mul(g.bundle.w, g.bundle.q_h * zlq.q, blas);
    res.proj.z = zlq.l;
    return res;
}

InitResult initialisation(Operator& op, const Vector& b, int s, double tolabs, Rng& rng,
                          const Blas& blas, const InnerHook& hook) {
    double beta = blas.nrm2(b);
    Vector x0(b.size(), 0.0);
    return initialisation_from(op, x0, b, beta, s, tolabs, rng, blas, hook);
}

} // namespace idrkit
