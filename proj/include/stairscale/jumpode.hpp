#pragma once

// Jump differential equations D_J y = chi_C(x) f(x, y). In the renormalized
// coordinate X = F(x) they become ordinary IVPs dy/dX = f(x(X), y), which are
// integrated with classical RK4 on a uniform X grid and mapped back through F.

#include <functional>
#include <variant>
#include <vector>

#include "stairscale/calculus.hpp"

namespace stairscale {

/// The degenerate coordinate X = x (no prolongation); reduces a jump ODE to
/// the ordinary IVP on [0,1].
class IdentityCoordinate {
public:
    [[nodiscard]] double operator()(double x) const noexcept { return x; }
    [[nodiscard]] double preimage(double X) const noexcept { return X; }
};

using Coordinate = std::variant<RenormalizedCoordinate, IdentityCoordinate>;

using OdeRhs = std::function<double(double x, double y)>;

struct JumpOdeProblem {
    OdeRhs rhs;
    Coordinate coordinate = IdentityCoordinate{};
    double y0 = 0.0;
    /// Number of RK4 steps; the X grid has steps + 1 uniform nodes on [0,1].
    int steps = 1000;
    /// Residual above which the solution is flagged as under-resolved.
    double tolerance = 1e-6;

    static JumpOdeProblem on_cantor_set(OdeRhs rhs, const CantorSpec& spec, double y0, int depth, int steps);
};

class JumpOdeSolution {
public:
    std::vector<double> x_grid;  // infimum preimages of the X nodes
    std::vector<double> X_grid;
    std::vector<double> y_values;
    std::vector<double> slopes;  // dy/dX at the nodes, for Hermite dense output
    double residual = 0.0;
    bool under_resolved = false;
    Coordinate coordinate = IdentityCoordinate{};

    /// y at a renormalized value X in [0,1].
    [[nodiscard]] double at_renormalized(double X) const;
    /// y(x) = y(F(x)); constant on every gap of the set.
    [[nodiscard]] double at(double x) const;
};

[[nodiscard]] JumpOdeSolution solve_jump_ode(const JumpOdeProblem& problem);

/// Max over consecutive nodes of |dy/dX - f~| at the interval midpoint.
[[nodiscard]] double residual_check(const JumpOdeSolution& solution, const JumpOdeProblem& problem);

}  // namespace stairscale
