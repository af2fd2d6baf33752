#include "stairscale/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stairscale/error.hpp"

namespace stairscale {

RenormalizedCoordinate::RenormalizedCoordinate(CantorSpec spec, int depth)
    : spec_(std::move(spec)), depth_(depth),
      error_bound_(std::pow(static_cast<double>(spec_.pieces()), -depth)) {
    if (depth < 1) {
        throw Error(ErrorCode::Precondition, "coordinate depth must be at least 1");
    }
}

double RenormalizedCoordinate::to_renormalized(double x) const {
    return staircase_eval(spec_, x, depth_).value;
}

double RenormalizedCoordinate::preimage(double X) const {
    if (!(X >= 0.0 && X <= 1.0)) {
        throw Error(ErrorCode::Domain, "renormalized value must lie in [0,1]");
    }
    if (X == 1.0) {
        return 1.0;
    }
    const long double m = spec_.pieces();
    const long double b = spec_.base();
    long double rest = X;
    long double x = 0.0L;
    long double width = 1.0L;
    for (int k = 0; k < depth_; ++k) {
        rest *= m;
        auto digit = static_cast<int>(std::floor(rest));
        digit = std::clamp(digit, 0, spec_.pieces() - 1);
        rest -= digit;
        width /= b;
        x += static_cast<long double>(spec_.layout()[digit]) * width;
        if (rest == 0.0L) {
            break;
        }
    }
    return static_cast<double>(x);
}

namespace {

struct StieltjesAccumulator {
    const RealFunction& g;
    const CantorSpec& spec;
    int depth;

    static void require_finite(double v) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::Domain, "integrand returned a non-finite value");
        }
    }

    // Returns (sum of g(mid), sum of oscillation) over the subtree rooted at
    // [lo, lo + width]; recursion gives pairwise summation.
    std::pair<double, double> visit(double lo, double width, int level) const {
        if (level == depth) {
            const double a = g(lo);
            const double mid = g(lo + 0.5 * width);
            const double b = g(lo + width);
            require_finite(a);
            require_finite(mid);
            require_finite(b);
            return {mid, std::max(std::fabs(a - mid), std::fabs(b - mid))};
        }
        const double child = width / spec.base();
        double sum = 0.0;
        double osc = 0.0;
        for (const int d : spec.layout()) {
            const auto [s, o] = visit(lo + d * child, child, level + 1);
            sum += s;
            osc += o;
        }
        return {sum, osc};
    }
};

}  // namespace

Integral stieltjes_integral(const RealFunction& g, const CantorSpec& spec, int depth) {
    if (depth < 1) {
        throw Error(ErrorCode::Precondition, "integration depth must be at least 1");
    }
    const double count = std::pow(static_cast<double>(spec.pieces()), depth);
    if (count > 1e8) {
        throw Error(ErrorCode::Resource, "integration depth " + std::to_string(depth) + " exceeds the 1e8 piece cap");
    }
    const StieltjesAccumulator acc{g, spec, depth};
    const auto [sum, osc] = acc.visit(0.0, 1.0, 0);
    // Each piece carries mass 1/count exactly; dividing once keeps constants exact.
    return {sum / count, osc / count};
}

JumpDerivativeEstimate jump_derivative(const RealFunction& f, double x, const RenormalizedCoordinate& coord,
                                       std::span<const int> depths, double tol) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorCode::Domain, "jump derivative point must lie in [0,1]");
    }
    if (depths.empty()) {
        throw Error(ErrorCode::Precondition, "at least one depth is required");
    }
    std::vector<int> order(depths.begin(), depths.end());
    std::sort(order.begin(), order.end());

    struct Sample {
        double window;
        double df;
        double dF;
    };
    std::vector<Sample> samples;
    samples.reserve(order.size());
    const double fx = f(x);
    const double Fx = coord(x);
    for (const int n : order) {
        const double h = std::pow(static_cast<double>(coord.spec().base()), -n);
        double xp = x + h;
        bool backward = false;
        if (xp > 1.0) {
            xp = x - h;
            backward = true;
            if (xp < 0.0) {
                throw Error(ErrorCode::Domain, "difference window leaves [0,1] on both sides");
            }
        }
        double df = f(xp) - fx;
        double dF = coord(xp) - Fx;
        if (backward) {
            df = -df;
            dF = -dF;
        }
        if (!std::isfinite(df)) {
            throw Error(ErrorCode::Domain, "function returned a non-finite value");
        }
        samples.push_back({h, df, dF});
    }

    JumpDerivativeEstimate est;
    const std::size_t tail = std::min<std::size_t>(3, samples.size());
    const auto tail_begin = samples.end() - static_cast<std::ptrdiff_t>(tail);
    const bool flat_F = std::all_of(tail_begin, samples.end(), [](const Sample& s) { return s.dF == 0.0; });
    const Sample& last = samples.back();
    est.window = last.window;
    est.f_increment = last.df;
    est.F_increment = last.dF;
    if (flat_F) {
        const bool flat_f = std::all_of(tail_begin, samples.end(), [](const Sample& s) { return s.df == 0.0; });
        est.defined = flat_f;
        est.converged = flat_f;
        est.value = 0.0;
        return est;
    }

    std::vector<double> quotients;
    for (const auto& s : samples) {
        if (s.dF != 0.0) {
            quotients.push_back(s.df / s.dF);
        }
    }
    est.defined = last.dF != 0.0;
    if (!est.defined) {
        return est;
    }
    est.value = quotients.back();
    if (quotients.size() >= 3) {
        const auto n = quotients.size();
        const double scale = std::max(1.0, std::fabs(est.value));
        est.converged = std::fabs(quotients[n - 1] - quotients[n - 2]) <= tol * scale &&
                        std::fabs(quotients[n - 2] - quotients[n - 3]) <= tol * scale;
    }
    return est;
}

JumpDerivativeEstimate jump_derivative(const RealFunction& f, double x, const CantorSpec& spec,
                                       std::span<const int> depths, double tol) {
    return jump_derivative(f, x, RenormalizedCoordinate(spec), depths, tol);
}

ContinuedStep::ContinuedStep(double x0, double left, double right, CantorSpec spec, double delta, int depth)
    : x0_(x0), left_(left), right_(right), coord_(std::move(spec), depth) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw Error(ErrorCode::Parameter, "delta must lie in (0,1)");
    }
    if (left == right) {
        throw Error(ErrorCode::Precondition, "a step needs distinct left and right values");
    }
    half_width_ = delta * std::log(1.0 / delta);
    if (!(half_width_ < 1.0)) {
        throw Error(ErrorCode::Parameter, "degenerate prolongation window, delta*log(1/delta) >= 1");
    }
    lo_ = x0_ - half_width_;
    hi_ = x0_ + half_width_;
}

double ContinuedStep::operator()(double x) const {
    if (x <= lo_) {
        return left_;
    }
    if (x >= hi_) {
        return right_;
    }
    const double u = std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0);
    return left_ + (right_ - left_) * coord_(u);
}

double ContinuedStep::continuity_modulus(double eps) const {
    if (!(eps > 0.0)) {
        throw Error(ErrorCode::Precondition, "modulus needs a positive epsilon");
    }
    // A window of width base^-n meets at most two level-n cells, each of
    // staircase mass pieces^-n.
    const double jump = std::fabs(right_ - left_);
    const double m = coord_.spec().pieces();
    int n = 0;
    while (2.0 * jump * std::pow(m, -n) >= eps) {
        ++n;
    }
    return (hi_ - lo_) * std::pow(static_cast<double>(coord_.spec().base()), -n);
}

ContinuedStep asymptotic_continuation_step(double x0, double left, double right, const CantorSpec& spec,
                                           double delta) {
    return ContinuedStep(x0, left, right, spec, delta);
}

}  // namespace stairscale
