#ifndef IDRKIT_OPERATOR_HPP
#define IDRKIT_OPERATOR_HPP

#include <memory>

#include "idrkit/core.hpp"
#include "idrkit/sparse.hpp"

namespace idrkit {

/// Abstract real N x N linear map. The matrix is only reachable through
/// matrix-vector products; every counted apply increments the counter by
/// exactly one. A solver binds its PerfCounters before the run so that the
/// matvec count and time land in the solve's instrumentation.
class Operator {
public:
    virtual ~Operator() = default;

    virtual int dim() const = 0;
    virtual std::string kind() const = 0;

    Vector apply(const Vector& v);

    /// Instrumentation path: no counter increment, no stopwatch effect.
    Vector apply_uncounted(const Vector& v) const { return apply_impl(v); }

    long long matvec_count() const { return count_; }
    void reset_count() { count_ = 0; }

    void bind(PerfCounters* pc, Stopwatch* sw = nullptr) {
        pc_ = pc;
        sw_ = sw;
    }

protected:
    virtual Vector apply_impl(const Vector& v) const = 0;

private:
    long long count_ = 0;
    PerfCounters* pc_ = nullptr;
    Stopwatch* sw_ = nullptr;
};

class CsrOperator final : public Operator {
public:
    explicit CsrOperator(CsrMatrix a) : a_(std::move(a)) {}

    int dim() const override { return a_.n_rows; }
    std::string kind() const override { return "csr"; }
    const CsrMatrix& matrix() const { return a_; }

protected:
    Vector apply_impl(const Vector& v) const override { return csr_matvec(a_, v); }

private:
    CsrMatrix a_;
};

/// v -> L^{-1} (A (R^{-1} v)) with triangular factors from ILU(0).
class PreconditionedOperator final : public Operator {
public:
    PreconditionedOperator(CsrMatrix a, TriFactor f)
        : a_(std::move(a)), f_(std::move(f)) {}

    int dim() const override { return a_.n_rows; }
    std::string kind() const override { return "preconditioned"; }
    const CsrMatrix& matrix() const { return a_; }
    const TriFactor& factor() const { return f_; }

    /// b := L^{-1} b_tilde (right-hand side of the preconditioned system)
    Vector transform_rhs(const Vector& b_tilde) const {
        return tri_solve(f_.lower, b_tilde, TriSide::lower);
    }
    /// x_tilde := R^{-1} x (solution of the original system)
    Vector recover_solution(const Vector& x) const {
        return tri_solve(f_.upper, x, TriSide::upper);
    }

protected:
    Vector apply_impl(const Vector& v) const override {
        Vector t = tri_solve(f_.upper, v, TriSide::upper);
        t = csr_matvec(a_, t);
        return tri_solve(f_.lower, t, TriSide::lower);
    }

private:
    CsrMatrix a_;
    TriFactor f_;
};

} // namespace idrkit

#endif
