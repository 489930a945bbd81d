#include "idrkit/recycling.hpp"

#include <fstream>

#include <json.hpp>

#include "idrkit/mm.hpp"

namespace idrkit {

void save_recycle(const std::string& stem, const RecycleData& rd) {
    int n = rd.u_hat.empty() ? 0 : static_cast<int>(rd.u_hat[0].size());
    DenseMat m(n, rd.s * 2);
    for (int j = 0; j < rd.s; ++j) {
        m.set_col(j, rd.u_hat[static_cast<std::size_t>(j)]);
        m.set_col(rd.s + j, rd.p[static_cast<std::size_t>(j)]);
    }
    mm_write_array(stem + ".recycle.mtx", m);
    nlohmann::json j;
    j["source_system"] = rd.source_system;
    j["cycle"] = rd.cycle;
    j["degree"] = rd.degree;
    j["tol2"] = rd.tol2;
    j["s"] = rd.s;
    j["seed"] = rd.seed;
    std::ofstream out(stem + ".recycle.json");
    if (!out) throw std::runtime_error("cannot open " + stem + ".recycle.json");
    out << j.dump(2) << '\n';
}

RecycleData load_recycle(const std::string& stem) {
    RecycleData rd;
    std::ifstream in(stem + ".recycle.json");
    if (!in) throw std::runtime_error("cannot open " + stem + ".recycle.json");
    nlohmann::json j;
    in >> j;
    rd.source_system = j.value("source_system", 0);
    rd.cycle = j.value("cycle", -1);
    rd.degree = j.value("degree", -1);
    rd.tol2 = j.value("tol2", 1e-2);
    rd.s = j.value("s", 0);
    rd.seed = j.value("seed", static_cast<std::uint64_t>(0));
    MmData m = mm_read(stem + ".recycle.mtx");
    if (!m.is_dense || m.array.cols() != 2 * rd.s)
        throw std::runtime_error(stem + ".recycle.mtx: unexpected shape");
    for (int c = 0; c < rd.s; ++c) rd.u_hat.push_back(m.array.col(c));
    for (int c = 0; c < rd.s; ++c) rd.p.push_back(m.array.col(rd.s + c));
    return rd;
}

GmstabHooks make_recycle_extractor(RecycleData& out, double tol2, double b_norm,
                                   int source_system, std::uint64_t seed) {
    GmstabHooks hooks;
    auto degree = std::make_shared<int>(0);
    hooks.after_cycle = [&out, tol2, b_norm, source_system, seed, degree](
                            int cycle, int ell, const GmstabState& st, const CycleResult&) {
        *degree += ell;
        if (st.beta > tol2 * b_norm) {
            out.u_hat = st.proj.vm1;
            out.p = st.proj.p;
            out.cycle = cycle;
            out.degree = *degree;
            out.tol2 = tol2;
            out.s = st.proj.s();
            out.seed = seed;
            out.source_system = source_system;
        }
    };
    return hooks;
}

InitResult mstab_init(Operator& op, const Vector& b_local, double tolabs,
                      const RecycleData& rd, const Blas& blas) {
    InitResult res;
    int s = rd.s;
    res.proj.p = rd.p;
    res.proj.vm1 = rd.u_hat;
    res.proj.v0.clear();
    for (int q = 0; q < s; ++q)
        res.proj.v0.push_back(op.apply(res.proj.vm1[static_cast<std::size_t>(q)]));

    // orthonormalise V^(0), apply the same gauge to the pre-images
    BlockQr qr = qr_mgs(res.proj.v0, blas);
    if (qr.rank_deficient) {
        res.deficiency = true;
        return res;
    }
    {
        // V^(-1) := V^(-1) R^{-1} (column-forward substitution)
        Block x(static_cast<std::size_t>(s));
        for (int j = 0; j < s; ++j) {
            Vector col = res.proj.vm1[static_cast<std::size_t>(j)];
            for (int i = 0; i < j; ++i) blas.axpy(-qr.r(i, j), x[static_cast<std::size_t>(i)], col);
            blas.scal(1.0 / qr.r(j, j), col);
            x[static_cast<std::size_t>(j)] = std::move(col);
        }
        res.proj.vm1 = std::move(x);
    }
    // Z := P^T V^(0) brought to lower triangular shape, rotation applied to
    // both stacks
    DenseMat z = block_tdot(res.proj.p, res.proj.v0, blas);
    LqSmall zl = lq(z);
    if (zl.rank_deficient) res.deficiency = true;
    res.proj.v0 = block_mul(res.proj.v0, zl.q, blas);
    res.proj.vm1 = block_mul(res.proj.vm1, zl.q, blas);
    res.proj.z = zl.l;

    // biorthogonalised residual state
    res.x.assign(b_local.size(), 0.0);
    res.r = b_local;
    Vector eta = block_tdot_vec(res.proj.p, res.r, blas);
    std::vector<Block*> stacks = {&res.proj.vm1, &res.proj.v0};
    std::vector<Vector*> rp = {&res.r};
    dir_rbio(stacks, res.proj.z, res.x, rp, eta, blas);
    res.beta = blas.nrm2(res.r);
    if (res.beta <= tolabs) res.converged = true;
    return res;
}

MstabSequenceResult mstab_solve_sequence(const SequenceSpec& spec, const GmstabConfig& cfg) {
    MstabSequenceResult result;
    if (spec.rhs.empty()) return result;
    Operator& op = *spec.op;
    Blas quiet;

    RecycleData rd;
    {
        GmstabHooks hooks = make_recycle_extractor(rd, spec.tol2, quiet.nrm2(spec.rhs[0]), 1,
                                                   cfg.rng_seed);
        SolveOutcome o = gmstab_solve(op, spec.rhs[0], spec.x0[0], cfg, &hooks);
        if (rd.valid())
            o.trace.annotate(0, "uhat", "cycle=" + std::to_string(rd.cycle) +
                                            " degree=" + std::to_string(rd.degree));
        result.outcomes.push_back(std::move(o));
        result.chain.push_back(rd);
    }

    for (std::size_t i = 1; i < spec.rhs.size(); ++i) {
        // reuse the U_hat that served the second system for all later ones
        InitProvider provider = [&](Operator& o, const Vector& b_local, double tolabs, Rng& rng,
                                    const Blas& blas, const InnerHook& hook) {
            if (rd.valid()) {
                InitResult r = mstab_init(o, b_local, tolabs, rd, blas);
                if (!r.deficiency) return r;
            }
            return initialisation(o, b_local, cfg.s, tolabs, rng, blas, hook);
        };
        SolveOutcome o = gmstab_solve_with_init(op, spec.rhs[i], spec.x0[i], cfg, nullptr,
                                                provider);
        o.trace.metadata["recycled_from"] = std::to_string(rd.source_system);
        result.outcomes.push_back(std::move(o));
        result.chain.push_back(rd);
    }
    return result;
}

} // namespace idrkit
