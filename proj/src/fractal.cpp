#include "stairscale/fractal.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <boost/multiprecision/cpp_int.hpp>

#include "stairscale/error.hpp"

namespace stairscale {

namespace {

__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

constexpr int kMaxBase = 64;

std::int64_t parse_int(std::string_view text) {
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
        throw Error(ErrorCode::Format, "malformed integer '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t checked_pow(std::int64_t base, int n) {
    std::int64_t result = 1;
    for (int i = 0; i < n; ++i) {
        if (result > std::numeric_limits<std::int64_t>::max() / base) {
            return -1;
        }
        result *= base;
    }
    return result;
}

template <class UInt>
StaircaseValue expand_digits(const CantorSpec& spec, UInt num, const UInt& den, int depth) {
    if (num == 0) {
        return {0.0, 0.0};
    }
    if (num == den) {
        return {1.0, 0.0};
    }
    const long double step = 1.0L / static_cast<long double>(spec.pieces());
    const UInt base = static_cast<unsigned>(spec.base());
    long double acc = 0.0L;
    long double weight = 1.0L;
    for (int k = 1; k <= depth; ++k) {
        weight *= step;
        num *= base;
        const UInt digit_wide = num / den;
        num -= digit_wide * den;
        const int digit = static_cast<int>(digit_wide);
        const int j = spec.retained_index(digit);
        if (j < 0) {
            // Gap digit: F sits on the plateau between retained pieces.
            acc += static_cast<long double>(spec.plateau_index(digit)) * weight;
            return {static_cast<double>(acc), 0.0};
        }
        acc += static_cast<long double>(j) * weight;
        if (num == 0) {
            return {static_cast<double>(acc), 0.0};
        }
    }
    return {static_cast<double>(acc), static_cast<double>(weight)};
}

void require_depth(int depth) {
    if (depth < 1) {
        throw Error(ErrorCode::Precondition, "staircase depth must be at least 1");
    }
}

}  // namespace

Ratio::Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) {
        throw Error(ErrorCode::Format, "zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Ratio Ratio::parse(std::string_view text) {
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        return Ratio(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    }
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) {
        return Ratio(parse_int(text), 1);
    }
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 17 || frac.find_first_not_of("0123456789") != std::string_view::npos) {
        throw Error(ErrorCode::Format, "decimal '" + std::string(text) + "' is not exactly representable");
    }
    const std::int64_t scale = checked_pow(10, static_cast<int>(frac.size()));
    const bool negative = !whole.empty() && whole.front() == '-';
    const std::int64_t w = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    const std::int64_t aw = w < 0 ? -w : w;
    if (aw > (std::numeric_limits<std::int64_t>::max() - f) / scale) {
        throw Error(ErrorCode::Format, "decimal '" + std::string(text) + "' overflows");
    }
    const std::int64_t magnitude = aw * scale + f;
    return Ratio(negative ? -magnitude : magnitude, scale);
}

std::string Ratio::to_string() const {
    if (den == 1) {
        return std::to_string(num);
    }
    return std::to_string(num) + "/" + std::to_string(den);
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const i128 lhs = static_cast<i128>(a.num) * b.den;
    const i128 rhs = static_cast<i128>(b.num) * a.den;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

CantorSpec::CantorSpec(int base, std::vector<int> layout) : base_(base), layout_(std::move(layout)) {
    if (base_ < 3 || base_ > kMaxBase) {
        throw Error(ErrorCode::Parameter, "base must lie in [3, 64]");
    }
    const auto m = static_cast<int>(layout_.size());
    if (m < 2 || m >= base_) {
        throw Error(ErrorCode::Parameter, "layout must retain between 2 and base-1 pieces");
    }
    if (layout_.front() != 0 || layout_.back() != base_ - 1) {
        throw Error(ErrorCode::Parameter, "layout must start at 0 and end at base-1");
    }
    for (int j = 1; j < m; ++j) {
        if (layout_[j] <= layout_[j - 1]) {
            throw Error(ErrorCode::Parameter, "layout must be strictly increasing");
        }
        if (layout_[j] == layout_[j - 1] + 1) {
            throw Error(ErrorCode::Parameter, "adjacent retained digits leave no gap between pieces");
        }
    }
    digit_index_.assign(base_, -1);
    plateau_index_.assign(base_, 0);
    for (int j = 0; j < m; ++j) {
        digit_index_[layout_[j]] = j;
    }
    int below = 0;
    for (int d = 0; d < base_; ++d) {
        plateau_index_[d] = below;
        if (digit_index_[d] >= 0) {
            ++below;
        }
    }
    dimension_ = std::log(static_cast<double>(m)) / std::log(static_cast<double>(base_));
}

CantorSpec CantorSpec::triadic() { return CantorSpec(3, {0, 2}); }

LevelSet construct_level(const CantorSpec& spec, int n, std::size_t cap) {
    if (n < 0) {
        throw Error(ErrorCode::Precondition, "level must be non-negative");
    }
    const double count = std::pow(static_cast<double>(spec.pieces()), n);
    const std::int64_t den = checked_pow(spec.base(), n);
    if (count > static_cast<double>(cap) || den < 0 || den > (std::int64_t{1} << 62)) {
        throw Error(ErrorCode::Resource, "level " + std::to_string(n) + " needs " +
                                             std::to_string(static_cast<long double>(count)) +
                                             " intervals, over the configured cap");
    }
    std::vector<std::int64_t> left{0};
    for (int level = 0; level < n; ++level) {
        std::vector<std::int64_t> next;
        next.reserve(left.size() * spec.layout().size());
        for (const auto l : left) {
            for (const int d : spec.layout()) {
                next.push_back(l * spec.base() + d);
            }
        }
        left = std::move(next);
    }
    LevelSet set;
    set.depth = n;
    set.intervals.reserve(left.size());
    for (const auto l : left) {
        set.intervals.push_back({Ratio(l, den), Ratio(l + 1, den)});
    }
    for (std::size_t i = 1; i < set.intervals.size(); ++i) {
        if (set.intervals[i - 1].hi < set.intervals[i].lo) {
            set.gaps.push_back({set.intervals[i - 1].hi, set.intervals[i].lo});
        }
    }
    return set;
}

std::string_view to_string(Membership m) noexcept {
    switch (m) {
        case Membership::In: return "In";
        case Membership::Out: return "Out";
        case Membership::Undetermined: return "Undetermined";
    }
    return "Unknown";
}

Membership membership(const CantorSpec& spec, Ratio x, int n) {
    if (x < Ratio(0, 1) || Ratio(1, 1) < x) {
        throw Error(ErrorCode::Domain, "membership is defined on [0,1]");
    }
    if (n < 0) {
        throw Error(ErrorCode::Precondition, "level must be non-negative");
    }
    if (x.num == 0 || x.num == x.den) {
        return Membership::In;
    }
    // A terminating expansion is decidable from its own digits at any level.
    int terminating = 0;
    for (std::int64_t d = x.den; d > 1; d /= spec.base(), ++terminating) {
        if (d % spec.base() != 0) {
            terminating = 0;
            break;
        }
    }
    const int digits = std::max(n, terminating);
    const auto den = static_cast<u128>(x.den);
    u128 rem = static_cast<u128>(x.num);
    std::unordered_set<std::uint64_t> seen;
    for (int k = 1; k <= digits; ++k) {
        rem *= static_cast<unsigned>(spec.base());
        const int digit = static_cast<int>(rem / den);
        rem %= den;
        if (spec.retained_index(digit) < 0) {
            // x = prefix + digit / base^k also reads as digit-1 followed by
            // repeated base-1, which stays inside the set when digit-1 is kept.
            if (rem == 0 && spec.retained_index(digit - 1) >= 0) {
                return Membership::In;
            }
            return Membership::Out;
        }
        if (rem == 0) {
            return Membership::In;
        }
        if (!seen.insert(static_cast<std::uint64_t>(rem)).second) {
            return Membership::In;  // periodic expansion with only retained digits
        }
    }
    return Membership::Undetermined;
}

StaircaseValue staircase_eval(const CantorSpec& spec, double x, int depth) {
    require_depth(depth);
    if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorCode::Domain, "staircase argument must lie in [0,1]");
    }
    if (x == 0.0) {
        return {0.0, 0.0};
    }
    if (x == 1.0) {
        return {1.0, 0.0};
    }
    int exponent = 0;
    const double mantissa = std::frexp(x, &exponent);
    auto bits = static_cast<std::uint64_t>(std::ldexp(mantissa, 53));
    int shift = 53 - exponent;
    const int tz = std::countr_zero(bits);
    bits >>= tz;
    shift -= tz;
    // num < 2^shift and num * base < 2^(shift + 6) must fit in 128 bits.
    if (shift <= 120) {
        const u128 den = u128{1} << shift;
        return expand_digits<u128>(spec, u128{bits}, den, depth);
    }
    using boost::multiprecision::cpp_int;
    const cpp_int den = cpp_int(1) << shift;
    return expand_digits<cpp_int>(spec, cpp_int(bits), den, depth);
}

StaircaseValue staircase_eval(const CantorSpec& spec, Ratio x, int depth) {
    require_depth(depth);
    if (x < Ratio(0, 1) || Ratio(1, 1) < x) {
        throw Error(ErrorCode::Domain, "staircase argument must lie in [0,1]");
    }
    return expand_digits<u128>(spec, static_cast<u128>(x.num), static_cast<u128>(x.den), depth);
}

StaircaseEvaluator::StaircaseEvaluator(CantorSpec spec, int depth)
    : spec_(std::move(spec)), depth_(depth),
      error_bound_(std::pow(static_cast<double>(spec_.pieces()), -depth)) {
    require_depth(depth);
}

double sharp_bound_constant(const CantorSpec& spec) {
    const double s = spec.dimension();
    const auto layout = spec.layout();
    if (layout.size() == 2) {
        return std::pow(static_cast<double>(spec.base() - 1), s);
    }
    // F / x^s decreases along each plateau, so its infimum sits at the left
    // endpoints of retained pieces.
    int level = 1;
    while (level < 12 && std::pow(static_cast<double>(spec.pieces()), level + 1) <= 65536.0) {
        ++level;
    }
    double worst = 1.0;
    for (int n = 1; n <= level; ++n) {
        const auto set = construct_level(spec, n);
        for (const auto& iv : set.intervals) {
            if (iv.lo.num == 0) {
                continue;
            }
            const double f = staircase_eval(spec, iv.lo, 64).value;
            worst = std::max(worst, std::pow(iv.lo.to_double(), s) / f);
        }
    }
    return worst;
}

BoundReport bound_check(const CantorSpec& spec, std::span<const double> xs, int depth, double tol) {
    BoundReport report;
    report.dimension = spec.dimension();
    report.k = sharp_bound_constant(spec);
    report.max_upper_ratio = -std::numeric_limits<double>::infinity();
    report.min_lower_ratio = std::numeric_limits<double>::infinity();
    report.upper_holds = true;
    report.lower_holds = true;
    for (const double x : xs) {
        if (!(x > 0.0 && x <= 1.0)) {
            throw Error(ErrorCode::Domain, "bound check samples must lie in (0,1]");
        }
        const auto f = staircase_eval(spec, x, depth);
        const double xs_pow = std::pow(x, report.dimension);
        const double upper = f.value / xs_pow;
        const double lower = report.k * f.value / xs_pow;
        if (upper > report.max_upper_ratio) {
            report.max_upper_ratio = upper;
            report.argmax = x;
        }
        if (lower < report.min_lower_ratio) {
            report.min_lower_ratio = lower;
            report.argmin = x;
        }
        if (upper > 1.0 + tol) {
            report.upper_holds = false;
        }
        if (report.k * (f.value + f.error) / xs_pow < 1.0 - tol) {
            report.lower_holds = false;
        }
    }
    return report;
}

}  // namespace stairscale
