#include "stairscale/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace stairscale {

ScaleSpec ScaleSpec::geometric(double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error(ErrorCode::Domain, "geometric scale ratio must lie in (0,1)");
    }
    return ScaleSpec(Kind::Geometric, ratio);
}

ScaleSpec ScaleSpec::real_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw Error(ErrorCode::Domain, "scale delta must lie in (0,1)");
    }
    return ScaleSpec(Kind::RealDelta, delta);
}

long double SequenceBranch::log_deviation(long long n) const {
    const auto nl = static_cast<long double>(n);
    switch (generator) {
        case Generator::Geometric:
            return nl * std::log(std::fabs(static_cast<long double>(ratio)));
        case Generator::ScaledGeometric:
            return std::log(std::fabs(static_cast<long double>(factor))) +
                   nl * std::log(std::fabs(static_cast<long double>(ratio)));
        case Generator::Power:
            return -static_cast<long double>(exponent) * std::log(nl);
    }
    return 0.0L;
}

namespace {

void validate(const SequenceBranch& b) {
    if (!std::isfinite(b.limit)) {
        throw Error(ErrorCode::NotNullSequence, "not a null sequence: non-finite limit point");
    }
    switch (b.generator) {
        case SequenceBranch::Generator::ScaledGeometric:
            if (!std::isfinite(b.factor)) {
                throw Error(ErrorCode::NotNullSequence, "not a null sequence: non-finite factor");
            }
            if (b.factor == 0.0) {
                throw Error(ErrorCode::DegenerateSequence, "degenerate null sequence: zero factor");
            }
            [[fallthrough]];
        case SequenceBranch::Generator::Geometric:
            if (b.ratio == 0.0) {
                throw Error(ErrorCode::DegenerateSequence, "degenerate null sequence: zero ratio");
            }
            if (!(std::fabs(b.ratio) < 1.0)) {
                throw Error(ErrorCode::NotNullSequence, "not a null sequence: |ratio| >= 1");
            }
            break;
        case SequenceBranch::Generator::Power:
            if (!(b.exponent > 0.0) || !std::isfinite(b.exponent)) {
                throw Error(ErrorCode::NotNullSequence, "not a null sequence: power exponent must be positive");
            }
            break;
    }
}

// |log_{a_n^{-1}} (dev_n / a_n)| = |1 - (log dev_n / n) / log a|
long double branch_norm(const SequenceBranch& b, long double log_a, long long n) {
    long double per_step = 0.0L;
    if (b.generator == SequenceBranch::Generator::Geometric) {
        per_step = std::log(std::fabs(static_cast<long double>(b.ratio)));
    } else {
        per_step = b.log_deviation(n) / static_cast<long double>(n);
    }
    return std::fabs(1.0L - per_step / log_a);
}

}  // namespace

SequenceSpec SequenceSpec::geometric(double b, double limit) {
    SequenceSpec s;
    s.branches_.push_back({SequenceBranch::Generator::Geometric, b, 1.0, 1.0, limit});
    return s;
}

SequenceSpec SequenceSpec::scaled_geometric(double k, double b, double limit) {
    SequenceSpec s;
    s.branches_.push_back({SequenceBranch::Generator::ScaledGeometric, b, k, 1.0, limit});
    return s;
}

SequenceSpec SequenceSpec::power(double p, double limit) {
    SequenceSpec s;
    s.branches_.push_back({SequenceBranch::Generator::Power, 0.5, 1.0, p, limit});
    return s;
}

SequenceSpec SequenceSpec::union_of(const std::vector<SequenceSpec>& parts) {
    SequenceSpec s;
    for (const auto& part : parts) {
        s.branches_.insert(s.branches_.end(), part.branches_.begin(), part.branches_.end());
    }
    return s;
}

VisibilityEstimate visibility_norm_seq(const SequenceSpec& seq, const ScaleSpec& scale, long long n_max,
                                       double tol) {
    if (n_max < 2) {
        throw Error(ErrorCode::Precondition, "n_max must be at least 2");
    }
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::Precondition, "tolerance must be positive");
    }
    if (seq.branches().empty()) {
        throw Error(ErrorCode::Precondition, "sequence has no branches");
    }
    const long double log_a = scale.log_ratio();

    VisibilityEstimate est;
    est.n_used = n_max;
    est.converged = true;
    long double sup = 0.0L;
    long double worst_residual = 0.0L;
    for (const auto& branch : seq.branches()) {
        validate(branch);
        const long double last = branch_norm(branch, log_a, n_max);
        const long double prev = branch_norm(branch, log_a, n_max - 1);
        sup = std::max(sup, last);
        worst_residual = std::max(worst_residual, std::fabs(last - prev));
    }
    est.value = static_cast<double>(sup);
    est.residual = static_cast<double>(worst_residual);
    est.converged = est.residual < tol;
    return est;
}

std::string_view to_string(SectorLabel label) noexcept {
    switch (label) {
        case SectorLabel::Visible: return "Visible";
        case SectorLabel::Invisible: return "Invisible";
        case SectorLabel::ScaleEquivalent: return "ScaleEquivalent";
        case SectorLabel::NonAsymptotic: return "NonAsymptotic";
    }
    return "Unknown";
}

SectorLabel classify_sector(double x, double delta, double band) {
    detail::require_scale(delta);
    if (!(band > 0.0)) {
        throw Error(ErrorCode::Parameter, "scale-equivalent band must be positive");
    }
    const double ax = std::fabs(x);
    // Zero is the ordinary real zero, not an asymptotic element.
    if (ax == 0.0 || ax >= 1.0) {
        return SectorLabel::NonAsymptotic;
    }
    if (ax <= delta * delta) {
        return SectorLabel::Invisible;
    }
    if (ax <= band * delta) {
        return SectorLabel::ScaleEquivalent;
    }
    return SectorLabel::Visible;
}

AsymptoticBand asymptotic_band(double x, double delta) {
    detail::require_scale(delta);
    const double ax = std::fabs(x);
    if (ax >= delta && ax < 1.0) {
        return AsymptoticBand::Visible;
    }
    if (ax > 0.0 && ax <= delta * delta) {
        return AsymptoticBand::Invisible;
    }
    return AsymptoticBand::Other;
}

DualPair duality_pair(double x, double delta, double lambda) {
    if (asymptotic_band(x, delta) != AsymptoticBand::Visible) {
        throw Error(ErrorCode::Precondition, "duality pairing needs a visible element, delta <= |x| < 1");
    }
    if (!(lambda > 0.0)) {
        throw Error(ErrorCode::Precondition, "duality constant lambda must be positive");
    }
    DualPair pair;
    pair.dual = lambda * delta * delta / x;
    pair.norm_product = visibility_norm_real(x, delta) * visibility_norm_real(pair.dual, delta);
    pair.dual_sector = classify_sector(pair.dual, delta);
    return pair;
}

UltrametricCheck ultrametric_check(double x, double y, double delta) {
    const auto bx = asymptotic_band(x, delta);
    const auto by = asymptotic_band(y, delta);
    if (bx != by || bx == AsymptoticBand::Other) {
        throw Error(ErrorCode::IncomparableSectors, "incomparable sectors");
    }
    UltrametricCheck check;
    check.lhs = visibility_norm_real(x + y, delta);
    check.rhs = std::max(visibility_norm_real(x, delta), visibility_norm_real(y, delta));
    check.slack = scale_slack(delta);
    check.holds = check.lhs <= check.rhs + check.slack;
    return check;
}

bool asymptotically_le(double b, double c, double delta) {
    return visibility_norm_real(b, delta) <= visibility_norm_real(c, delta);
}

}  // namespace stairscale
