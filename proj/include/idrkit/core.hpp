#ifndef IDRKIT_CORE_HPP
#define IDRKIT_CORE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace idrkit {

using Vector = std::vector<double>;
using Block = std::vector<Vector>; // tall N x k matrix stored by columns

/// BLAS-1 / matvec counters plus stopwatch totals for one solve.
struct PerfCounters {
    long long n_matvec = 0;
    long long n_dot = 0;
    long long n_axpy = 0;
    double elapsed = 0.0;           // seconds inside the solver, stopwatch semantics
    double elapsed_in_matvec = 0.0; // seconds spent inside operator applies
};

/// Pausable stopwatch. True-residual evaluation pauses it so that
/// instrumentation never shows up in `elapsed`.
class Stopwatch {
public:
    void resume() {
        if (!running_) {
            t0_ = clock::now();
            running_ = true;
        }
    }
    void stop() {
        if (running_) {
            total_ += std::chrono::duration<double>(clock::now() - t0_).count();
            running_ = false;
        }
    }
    double seconds() const {
        double t = total_;
        if (running_)
            t += std::chrono::duration<double>(clock::now() - t0_).count();
        return t;
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point t0_{};
    double total_ = 0.0;
    bool running_ = false;
};

/// Counted length-N vector kernels. Small (<= 3s+3 dimensional) helper
/// arithmetic is deliberately not routed through here; the counters track
/// work on problem-sized vectors only.
struct Blas {
    PerfCounters* pc = nullptr;

    double dot(const Vector& a, const Vector& b) const {
        if (pc) ++pc->n_dot;
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    double nrm2(const Vector& a) const {
        return std::sqrt(dot(a, a));
    }
    void axpy(double alpha, const Vector& x, Vector& y) const {
        if (pc) ++pc->n_axpy;
        for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
    }
    void scal(double alpha, Vector& x) const {
        if (pc) ++pc->n_axpy;
        for (double& v : x) v *= alpha;
    }
    /// y := alpha * x, counted like an AXPY-class update
    void scaled_copy(double alpha, const Vector& x, Vector& y) const {
        if (pc) ++pc->n_axpy;
        y.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i];
    }
};

/// Seeded standard-normal generator. Reproducible bit-exactly within one
/// build (std::normal_distribution is implementation defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double normal() { return dist_(eng_); }

    Vector normal_vector(std::size_t n) {
        Vector v(n);
        for (double& x : v) x = normal();
        return v;
    }
    Block normal_block(std::size_t n, std::size_t cols) {
        Block b(cols);
        for (auto& c : b) c = normal_vector(n);
        return b;
    }
    static std::string identity() { return "mt19937_64+std::normal_distribution"; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

inline bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace idrkit

#endif
