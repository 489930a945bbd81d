#ifndef IDRKIT_CONFIG_HPP
#define IDRKIT_CONFIG_HPP

#include <cmath>
#include <string>

#include "idrkit/core.hpp"
#include "idrkit/trace.hpp"

namespace idrkit {

enum class OmegaStrategy {
    argmin,      // plain least-squares coefficients, Eq.-(6)-style
    stab_coeffs, // convergence-maintaining semi-optimal coefficients
};

/// Stressed-line formula is the default; the green-circle formula stays
/// selectable for A/B comparisons.
enum class DeltaVariant { stressed, green };

inline double default_alpha() { return std::atan(0.7); }

struct SolverConfig {
    int s = 4;
    int ell = 2;
    double tol_rel = 1e-8;
    long long max_matvec = 100000;
    OmegaStrategy omega_strategy = OmegaStrategy::stab_coeffs;
    double alpha = default_alpha();
    DeltaVariant delta_variant = DeltaVariant::stressed;
    bool z_treatment = true;
    std::uint64_t rng_seed = 1;
    std::string variant; // informational tag recorded in trace metadata
};

struct GmstabConfig {
    int s = 4;
    double alpha = default_alpha();
    double c_restart = 0.01;
    double c_recompute = 0.01;
    int max_consecutive_ell2 = 3;
    double tol_rel = 1e-8;
    long long max_matvec = 100000;
    std::uint64_t rng_seed = 1;
    DeltaVariant delta_variant = DeltaVariant::stressed;
};

enum class BreakdownKind {
    none,
    omega_zero,  // stability coefficient tau_ell vanished
    pivot,       // |Z_qq| collapsed (GCR-type unlucky breakdown)
    deficiency,  // rank loss in a gauge/projector factorization
    nonfinite,   // NaN/Inf detected
};

enum class SolveStatus { converged, max_matvec, breakdown };

struct SolveOutcome {
    Vector x;
    SolveStatus status = SolveStatus::breakdown;
    BreakdownKind breakdown = BreakdownKind::none;
    double final_beta = 0.0;
    Trace trace;

    bool converged() const { return status == SolveStatus::converged; }
};

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_matvec: return "max_matvec";
        default: return "breakdown";
    }
}

inline const char* to_string(BreakdownKind k) {
    switch (k) {
        case BreakdownKind::none: return "none";
        case BreakdownKind::omega_zero: return "omega_zero";
        case BreakdownKind::pivot: return "pivot";
        case BreakdownKind::deficiency: return "deficiency";
        default: return "nonfinite";
    }
}

} // namespace idrkit

#endif
