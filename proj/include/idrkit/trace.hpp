#ifndef IDRKIT_TRACE_HPP
#define IDRKIT_TRACE_HPP

#include <functional>
#include <map>
#include <string>

#include "idrkit/core.hpp"
#include "idrkit/operator.hpp"

namespace idrkit {

struct Snapshot {
    long long n_matvec = 0;
    double time_s = 0.0;
    double res_iter = 0.0; // current beta
    double res_true = -1.0; // ||b - A x||, computed out-of-band
    PerfCounters counters;
};

struct Annotation {
    long long n_matvec = 0;
    std::string kind; // "cycle", "poly", "restart", "replace", "uhat", "breakdown", "converged_at", ...
    std::string text;
    std::vector<double> data; // e.g. stability coefficients tau
};

struct Trace {
    std::vector<Snapshot> snapshots;
    std::vector<Annotation> annotations;
    std::map<std::string, std::string> metadata;

    void annotate(long long n_matvec, std::string kind, std::string text = {},
                  std::vector<double> data = {}) {
        annotations.push_back({n_matvec, std::move(kind), std::move(text), std::move(data)});
    }
    const Annotation* find_last(const std::string& kind) const {
        for (auto it = annotations.rbegin(); it != annotations.rend(); ++it)
            if (it->kind == kind) return &*it;
        return nullptr;
    }
};

/// Per-solve instrumentation: counters, pausable stopwatch and the trace.
/// Snapshots pause the stopwatch while the true residual is evaluated with
/// an uncounted operator apply.
class Instrument {
public:
    Instrument(Operator& op, const Vector& b) : op_(&op), b_(&b) {
        op.bind(&pc, &sw);
    }
    ~Instrument() {
        if (op_) op_->bind(nullptr, nullptr);
    }
    Instrument(const Instrument&) = delete;
    Instrument& operator=(const Instrument&) = delete;

    PerfCounters pc;
    Stopwatch sw;
    Trace trace;

    void start() { sw.resume(); }
    void finish() { sw.stop(); pc.elapsed = sw.seconds(); }

    /// Record a snapshot; `make_x` lazily reconstructs the current global
    /// iterate for the true-residual audit.
    void snapshot(double res_iter, const std::function<Vector()>& make_x) {
        sw.stop();
        Snapshot s;
        s.n_matvec = pc.n_matvec;
        s.time_s = sw.seconds();
        s.res_iter = res_iter;
        if (make_x && b_) {
            Vector x = make_x();
            Vector r = op_->apply_uncounted(x);
            double acc = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                double d = (*b_)[i] - r[i];
                acc += d * d;
            }
            s.res_true = std::sqrt(acc);
        }
        s.counters = pc;
        s.counters.elapsed = s.time_s;
        trace.snapshots.push_back(std::move(s));
        sw.resume();
    }

    Operator& op() { return *op_; }
    const Vector& rhs() const { return *b_; }

private:
    Operator* op_;
    const Vector* b_;
};

/// CSV with header matvec,dot,axpy,time_s,res_iter,res_true.
void write_trace_csv(const Trace& t, const std::string& path);
/// JSON sidecar with metadata and annotations.
void write_trace_json(const Trace& t, const std::string& path);

} // namespace idrkit

#endif
