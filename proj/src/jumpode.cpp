#include "stairscale/jumpode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stairscale/error.hpp"

namespace stairscale {

namespace {

double map_forward(const Coordinate& c, double x) {
    return std::visit([x](const auto& coord) { return coord(x); }, c);
}

double map_preimage(const Coordinate& c, double X) {
    return std::visit([X](const auto& coord) { return coord.preimage(X); }, c);
}

// f~(X, y) = f(x(X), y), with the infimum preimage x(X).
double renormalized_rhs(const JumpOdeProblem& p, double X, double y) {
    const double x = map_preimage(p.coordinate, std::clamp(X, 0.0, 1.0));
    const double value = p.rhs(x, y);
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os.precision(17);
        os << "non-finite right-hand side at X=" << X << " (x=" << x << ", y=" << y << ")";
        throw Error(ErrorCode::Solver, os.str());
    }
    return value;
}

void validate(const JumpOdeProblem& p) {
    if (!p.rhs) {
        throw Error(ErrorCode::Precondition, "jump ODE has no right-hand side");
    }
    if (p.steps < 2) {
        throw Error(ErrorCode::Precondition, "jump ODE needs at least 2 steps");
    }
    if (!std::isfinite(p.y0)) {
        throw Error(ErrorCode::Precondition, "initial value must be finite");
    }
}

}  // namespace

JumpOdeProblem JumpOdeProblem::on_cantor_set(OdeRhs rhs, const CantorSpec& spec, double y0, int depth,
                                             int steps) {
    JumpOdeProblem p;
    p.rhs = std::move(rhs);
    p.coordinate = RenormalizedCoordinate(spec, depth);
    p.y0 = y0;
    p.steps = steps;
    return p;
}

double JumpOdeSolution::at_renormalized(double X) const {
    if (X_grid.size() < 2) {
        throw Error(ErrorCode::Precondition, "empty solution");
    }
    if (!(X >= 0.0 && X <= 1.0)) {
        throw Error(ErrorCode::Domain, "renormalized value must lie in [0,1]");
    }
    const auto steps = X_grid.size() - 1;
    auto i = static_cast<std::size_t>(X * static_cast<double>(steps));
    i = std::min(i, steps - 1);
    const double h = X_grid[i + 1] - X_grid[i];
    const double t = (X - X_grid[i]) / h;
    // Cubic Hermite on [X_i, X_{i+1}].
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_values[i] + h10 * h * slopes[i] + h01 * y_values[i + 1] + h11 * h * slopes[i + 1];
}

double JumpOdeSolution::at(double x) const {
    return at_renormalized(map_forward(coordinate, x));
}

JumpOdeSolution solve_jump_ode(const JumpOdeProblem& problem) {
    validate(problem);
    const int n = problem.steps;
    const double h = 1.0 / n;

    JumpOdeSolution sol;
    sol.coordinate = problem.coordinate;
    sol.X_grid.resize(n + 1);
    sol.x_grid.resize(n + 1);
    sol.y_values.resize(n + 1);
    sol.slopes.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        sol.X_grid[i] = static_cast<double>(i) / n;
        sol.x_grid[i] = map_preimage(problem.coordinate, sol.X_grid[i]);
    }

    double y = problem.y0;
    sol.y_values[0] = y;
    for (int i = 0; i < n; ++i) {
        const double X = sol.X_grid[i];
        const double k1 = renormalized_rhs(problem, X, y);
        const double k2 = renormalized_rhs(problem, X + 0.5 * h, y + 0.5 * h * k1);
        const double k3 = renormalized_rhs(problem, X + 0.5 * h, y + 0.5 * h * k2);
        const double k4 = renormalized_rhs(problem, sol.X_grid[i + 1], y + h * k3);
        sol.slopes[i] = k1;
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        sol.y_values[i + 1] = y;
    }
    sol.slopes[n] = renormalized_rhs(problem, 1.0, y);
    sol.residual = residual_check(sol, problem);
    sol.under_resolved = sol.residual > problem.tolerance;
    return sol;
}

double residual_check(const JumpOdeSolution& solution, const JumpOdeProblem& problem) {
    validate(problem);
    const auto nodes = static_cast<std::size_t>(problem.steps) + 1;
    if (solution.X_grid.size() != nodes || solution.y_values.size() != nodes) {
        throw Error(ErrorCode::Precondition, "solution grid does not match the problem's step count");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        const double dX = solution.X_grid[i + 1] - solution.X_grid[i];
        if (!(dX > 0.0)) {
            throw Error(ErrorCode::Precondition, "solution X grid is not increasing");
        }
        const double slope = (solution.y_values[i + 1] - solution.y_values[i]) / dX;
        const double Xm = 0.5 * (solution.X_grid[i] + solution.X_grid[i + 1]);
        const double ym = 0.5 * (solution.y_values[i] + solution.y_values[i + 1]);
        worst = std::max(worst, std::fabs(slope - renormalized_rhs(problem, Xm, ym)));
    }
    return worst;
}

}  // namespace stairscale
