#include "idrkit/operator.hpp"

namespace idrkit {

Vector Operator::apply(const Vector& v) {
    ++count_;
    if (pc_) ++pc_->n_matvec;
    if (pc_ && sw_) {
        Stopwatch local;
        local.resume();
        Vector y = apply_impl(v);
        local.stop();
        pc_->elapsed_in_matvec += local.seconds();
        return y;
    }
    return apply_impl(v);
}

} // namespace idrkit
