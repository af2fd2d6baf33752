#pragma once

// Visibility norms of asymptotic quantities measured against a privileged
// scale, sector classification, duality pairing and ultrametric diagnostics.
//
// Every norm here is a ratio of logarithms evaluated at a finite scale. The
// exact values are limits as the scale goes to zero; at finite delta the
// functions report the finite value and the known O(1 / log(1/delta)) slack.

#include <cmath>
#include <concepts>
#include <string_view>
#include <vector>

#include "stairscale/error.hpp"

namespace stairscale {

/// A privileged scale: either the geometric null sequence {a^n} or a small
/// real number delta. For sequence work a real-delta scale acts as {delta^n}.
class ScaleSpec {
public:
    enum class Kind { Geometric, RealDelta };

    static ScaleSpec geometric(double ratio);
    static ScaleSpec real_delta(double delta);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double value() const noexcept { return value_; }
    /// log of the per-step ratio; strictly negative.
    [[nodiscard]] long double log_ratio() const noexcept { return std::log(static_cast<long double>(value_)); }

private:
    ScaleSpec(Kind kind, double value) : kind_(kind), value_(value) {}

    Kind kind_;
    double value_;
};

/// One convergent branch of a (possibly multi-limit) null sequence. The branch
/// is `limit + deviation(n)`; deviations come from a closed-form generator so
/// that their logarithms never pass through an underflowed term.
struct SequenceBranch {
    enum class Generator { Geometric, ScaledGeometric, Power };

    Generator generator = Generator::Geometric;
    double ratio = 0.5;     // geometric ratio b
    double factor = 1.0;    // k in k * b^n
    double exponent = 1.0;  // p in n^(-p)
    double limit = 0.0;

    /// log |deviation(n)| for n >= 1.
    [[nodiscard]] long double log_deviation(long long n) const;
};

class SequenceSpec {
public:
    static SequenceSpec geometric(double b, double limit = 0.0);
    static SequenceSpec scaled_geometric(double k, double b, double limit = 0.0);
    static SequenceSpec power(double p, double limit = 0.0);
    /// Union of subsequences, each converging to its own limit point.
    static SequenceSpec union_of(const std::vector<SequenceSpec>& parts);

    [[nodiscard]] const std::vector<SequenceBranch>& branches() const noexcept { return branches_; }

private:
    std::vector<SequenceBranch> branches_;
};

struct VisibilityEstimate {
    double value = 0.0;
    long long n_used = 0;
    bool converged = false;
    double residual = 0.0;
};

enum class SectorLabel { Visible, Invisible, ScaleEquivalent, NonAsymptotic };

[[nodiscard]] std::string_view to_string(SectorLabel label) noexcept;

/// Default width of the scale-equivalent band (delta^2, lambda * delta].
inline constexpr double kDefaultScaleBand = 10.0;

/// Visibility norm of a null sequence relative to a scale, evaluated at
/// n_max terms. Unions report the supremum over their branches.
[[nodiscard]] VisibilityEstimate visibility_norm_seq(const SequenceSpec& seq, const ScaleSpec& scale,
                                                     long long n_max, double tol);

namespace detail {
inline void require_scale(long double delta) {
    if (!(delta > 0 && delta < 1)) {
        throw Error(ErrorCode::Domain, "scale delta must lie in (0,1)");
    }
}
}  // namespace detail

/// v(x) = |log(|x| / delta) / log(1/delta)| at finite delta; v(0) = 0.
template <std::floating_point Scalar>
[[nodiscard]] Scalar visibility_norm_real(Scalar x, Scalar delta) {
    detail::require_scale(static_cast<long double>(delta));
    if (x == Scalar(0)) {
        return Scalar(0);
    }
    using std::abs;
    using std::log;
    const Scalar log_delta = log(delta);
    return abs((log(abs(x)) - log_delta) / -log_delta);
}

/// Finite-delta slack of the asymptotic identities, 1 / log(1/delta).
template <std::floating_point Scalar>
[[nodiscard]] Scalar scale_slack(Scalar delta) {
    detail::require_scale(static_cast<long double>(delta));
    using std::log;
    return Scalar(1) / -log(delta);
}

[[nodiscard]] SectorLabel classify_sector(double x, double delta, double band = kDefaultScaleBand);

/// Coarse asymptotic band used for same-sector comparisons: visible means
/// delta <= |x| < 1, invisible means 0 < |x| <= delta^2.
enum class AsymptoticBand { Visible, Invisible, Other };

[[nodiscard]] AsymptoticBand asymptotic_band(double x, double delta);

struct DualPair {
    double dual = 0.0;
    /// v(x) * v(dual); the inverse-proportionality diagnostic at this delta.
    double norm_product = 0.0;
    SectorLabel dual_sector = SectorLabel::Invisible;
};

/// x -> lambda * delta^2 / x for a visible x.
[[nodiscard]] DualPair duality_pair(double x, double delta, double lambda = 1.0);

struct UltrametricCheck {
    double lhs = 0.0;  // v(x + y)
    double rhs = 0.0;  // max(v(x), v(y))
    double slack = 0.0;
    bool holds = false;
};

[[nodiscard]] UltrametricCheck ultrametric_check(double x, double y, double delta);

/// The asymptotic order, exposed only through the norms: b <=_a c iff v(b) <= v(c).
[[nodiscard]] bool asymptotically_le(double b, double c, double delta);

}  // namespace stairscale
