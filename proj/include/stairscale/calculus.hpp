#pragma once

// Calculus against the Cantor staircase: Stieltjes sums over the singular
// measure dF, the renormalized coordinate X = F(x), the jump derivative
// D_J f = df / dX, and continuation of a jump into a staircase ramp.

#include <functional>
#include <span>

#include "stairscale/fractal.hpp"

namespace stairscale {

inline constexpr int kDefaultStaircaseDepth = 40;

/// x -> X = F(x) on [0,1], with the infimum preimage as partial inverse.
class RenormalizedCoordinate {
public:
    explicit RenormalizedCoordinate(CantorSpec spec, int depth = kDefaultStaircaseDepth);

    [[nodiscard]] double operator()(double x) const { return to_renormalized(x); }
    [[nodiscard]] double to_renormalized(double x) const;
    [[nodiscard]] StaircaseValue evaluate(double x) const { return staircase_eval(spec_, x, depth_); }

    /// Left endpoint of the level-`depth` piece whose staircase rise contains
    /// X; F(preimage(X)) is X rounded down to the pieces^-depth grid.
    [[nodiscard]] double preimage(double X) const;

    [[nodiscard]] const CantorSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] int depth() const noexcept { return depth_; }
    [[nodiscard]] double error_bound() const noexcept { return error_bound_; }

private:
    CantorSpec spec_;
    int depth_;
    double error_bound_;
};

[[nodiscard]] inline double to_renormalized(double x, const RenormalizedCoordinate& coord) {
    return coord.to_renormalized(x);
}

struct Integral {
    double value = 0.0;
    double error = 0.0;
};

using RealFunction = std::function<double(double)>;

/// Midpoint Stieltjes sum of g against dF over the level-`depth` pieces. The
/// error estimate adds each piece's sampled oscillation times its mass.
[[nodiscard]] Integral stieltjes_integral(const RealFunction& g, const CantorSpec& spec, int depth);

struct JumpDerivativeEstimate {
    double value = 0.0;
    double window = 0.0;       // |x' - x| of the reported quotient
    double f_increment = 0.0;
    double F_increment = 0.0;
    bool defined = false;
    bool converged = false;
};

/// Quotient (f(x') - f(x)) / (F(x') - F(x)) with x' = x + base^-n for each n
/// in `depths`; the estimate plateaus as n grows. Where F is flat over the
/// deepest windows the point is off the set: the derivative is 0 if f is flat
/// too, and undefined (defined = false) otherwise.
[[nodiscard]] JumpDerivativeEstimate jump_derivative(const RealFunction& f, double x,
                                                     const RenormalizedCoordinate& coord,
                                                     std::span<const int> depths, double tol = 1e-9);

[[nodiscard]] JumpDerivativeEstimate jump_derivative(const RealFunction& f, double x, const CantorSpec& spec,
                                                     std::span<const int> depths, double tol = 1e-9);

/// A jump left -> right at x0 realized as a staircase ramp across
/// [x0 - w, x0 + w], w = delta * log(1/delta). The window is mapped affinely
/// onto [0,1] (scale factor 2w) before F is applied.
class ContinuedStep {
public:
    ContinuedStep(double x0, double left, double right, CantorSpec spec, double delta,
                  int depth = kDefaultStaircaseDepth);

    [[nodiscard]] double operator()(double x) const;

    [[nodiscard]] double window_lo() const noexcept { return lo_; }
    [[nodiscard]] double window_hi() const noexcept { return hi_; }
    [[nodiscard]] double half_width() const noexcept { return half_width_; }
    [[nodiscard]] double scale_factor() const noexcept { return hi_ - lo_; }

    /// eta such that |u(x) - u(y)| < eps whenever |x - y| < eta.
    [[nodiscard]] double continuity_modulus(double eps) const;

private:
    double x0_;
    double left_;
    double right_;
    double half_width_;
    double lo_;
    double hi_;
    RenormalizedCoordinate coord_;
};

[[nodiscard]] ContinuedStep asymptotic_continuation_step(double x0, double left, double right,
                                                         const CantorSpec& spec, double delta);

}  // namespace stairscale
