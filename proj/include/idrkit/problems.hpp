#ifndef IDRKIT_PROBLEMS_HPP
#define IDRKIT_PROBLEMS_HPP

#include <memory>
#include <optional>

#include "idrkit/operator.hpp"
#include "idrkit/sparse.hpp"

namespace idrkit {

/// Central finite-difference discretisation of
///   -eps * Lap(u) + alpha^T grad(u) - beta * u = f  on (0,1)^d,
/// Dirichlet values from the manufactured solution, uniform grid of mesh
/// size h = 1/inv_h, N = (inv_h - 1)^d interior unknowns.
struct PdeSpec {
    int d = 2;
    int inv_h = 21;
    double eps = 1.0;
    std::array<double, 3> alpha_vec{0.0, 0.0, 0.0};
    std::string alpha_field;  // "", "recirc2d" or "radial" (position dependent)
    double beta_react = 0.0;
    std::string solution_id = "bubble2d"; // bubble2d, sine13, expsine3d, ones

    int n() const {
        int n1 = inv_h - 1;
        int r = 1;
        for (int k = 0; k < d; ++k) r *= n1;
        return r;
    }
};

struct DiscretizedPde {
    CsrMatrix a;
    Vector b;      // assembled so that A x_true = b holds to machine precision
    Vector x_true; // manufactured solution sampled at the interior nodes
};

DiscretizedPde pde_discretize(const PdeSpec& spec);

struct LinearSystem {
    std::shared_ptr<Operator> op;
    Vector b;
    Vector x0;
    std::optional<Vector> x_true;
    std::string name;
};

struct SequenceSpec {
    std::shared_ptr<Operator> op;
    std::vector<Vector> rhs;
    std::vector<Vector> x0;
    double tol2 = 1e-2;
    std::string name;
};

enum class PreconMode { none, ilu0, ilu0_shift };

/// Wrap A (optionally symmetrically permuted) as v -> L^{-1}(A(R^{-1} v)).
/// Throws on an ILU zero pivot, pointing at the shift mode.
std::shared_ptr<Operator> make_preconditioned(const CsrMatrix& a, PreconMode mode,
                                              double shift = 0.0,
                                              const std::vector<int>* reorder = nullptr);

/// Named desk-scale constructions. inv_h = 0 picks the entry's default.
LinearSystem catalog_system(const std::string& name, double c1 = 1.0, double c2 = 1.0,
                            int inv_h = 0, PreconMode precon = PreconMode::none,
                            double shift = 0.0);
SequenceSpec catalog_sequence(const std::string& name, double c1 = 1.0, double c2 = 1.0,
                              int inv_h = 0, double tol2 = 1e-2);

bool catalog_known(const std::string& name);

} // namespace idrkit

#endif
