#pragma once

// Homogeneous self-similar Cantor sets built from a digit layout in a fixed
// base, their finite-depth level sets, and the Cantor staircase function.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stairscale {

/// Exact rational p/q with q > 0, kept in lowest terms.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Ratio() = default;
    Ratio(std::int64_t n, std::int64_t d);

    /// Accepts "p/q", an integer, or a plain decimal such as "0.25".
    static Ratio parse(std::string_view text);

    [[nodiscard]] double to_double() const noexcept {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Ratio&, const Ratio&) = default;
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);
};

/// Cantor set generated by the maps x -> (x + d) / base for d in layout.
class CantorSpec {
public:
    CantorSpec(int base, std::vector<int> layout);

    static CantorSpec triadic();

    [[nodiscard]] int base() const noexcept { return base_; }
    [[nodiscard]] int pieces() const noexcept { return static_cast<int>(layout_.size()); }
    [[nodiscard]] std::span<const int> layout() const noexcept { return layout_; }
    /// Hausdorff dimension log(pieces) / log(base).
    [[nodiscard]] double dimension() const noexcept { return dimension_; }

    /// Index j with layout[j] == digit, or -1 for a gap digit.
    [[nodiscard]] int retained_index(int digit) const noexcept { return digit_index_[digit]; }
    /// Number of retained digits strictly below `digit`; the plateau level of
    /// a gap digit.
    [[nodiscard]] int plateau_index(int digit) const noexcept { return plateau_index_[digit]; }

    friend bool operator==(const CantorSpec& a, const CantorSpec& b) {
        return a.base_ == b.base_ && a.layout_ == b.layout_;
    }

private:
    int base_;
    std::vector<int> layout_;
    std::vector<int> digit_index_;
    std::vector<int> plateau_index_;
    double dimension_;
};

struct ClosedInterval {
    Ratio lo;
    Ratio hi;
};

struct OpenInterval {
    Ratio lo;
    Ratio hi;
};

struct LevelSet {
    int depth = 0;
    std::vector<ClosedInterval> intervals;
    std::vector<OpenInterval> gaps;
};

inline constexpr std::size_t kDefaultLevelCap = std::size_t{1} << 22;

/// The n-th IFS iterate of [0,1] with exact rational endpoints. Throws a
/// resource error when the interval count would exceed `cap`.
[[nodiscard]] LevelSet construct_level(const CantorSpec& spec, int n, std::size_t cap = kDefaultLevelCap);

enum class Membership { In, Out, Undetermined };

[[nodiscard]] std::string_view to_string(Membership m) noexcept;

/// Decides membership of a rational from its first n base digits. The answer
/// is In once the expansion terminates or repeats with every digit retained,
/// Out as soon as a digit lands strictly inside a gap, and Undetermined when
/// n digits were not enough to tell.
[[nodiscard]] Membership membership(const CantorSpec& spec, Ratio x, int n);

struct StaircaseValue {
    double value = 0.0;
    /// One-sided: the exact staircase lies in [value, value + error].
    double error = 0.0;
};

/// Cantor staircase F(x) by base-digit expansion, truncated after `depth`
/// digits. Doubles are expanded exactly as dyadic rationals.
[[nodiscard]] StaircaseValue staircase_eval(const CantorSpec& spec, double x, int depth);
[[nodiscard]] StaircaseValue staircase_eval(const CantorSpec& spec, Ratio x, int depth);

/// Staircase evaluation bound to a spec and a depth.
class StaircaseEvaluator {
public:
    StaircaseEvaluator(CantorSpec spec, int depth);

    [[nodiscard]] double operator()(double x) const { return staircase_eval(spec_, x, depth_).value; }
    [[nodiscard]] StaircaseValue evaluate(double x) const { return staircase_eval(spec_, x, depth_); }
    [[nodiscard]] const CantorSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] int depth() const noexcept { return depth_; }
    [[nodiscard]] double error_bound() const noexcept { return error_bound_; }

private:
    CantorSpec spec_;
    int depth_;
    double error_bound_;
};

/// Smallest k with x^s / k <= F(x). For two-piece sets {0, base-1} this is
/// (base-1)^s; other layouts take the worst plateau edge found to level 12.
[[nodiscard]] double sharp_bound_constant(const CantorSpec& spec);

struct BoundReport {
    double dimension = 0.0;
    double k = 0.0;
    double max_upper_ratio = 0.0;  // max F(x) / x^s
    double min_lower_ratio = 0.0;  // min k F(x) / x^s
    double argmax = 0.0;
    double argmin = 0.0;
    bool upper_holds = false;  // max F/x^s <= 1 + tol
    bool lower_holds = false;  // min kF/x^s >= 1 - tol, after the truncation allowance
};

[[nodiscard]] BoundReport bound_check(const CantorSpec& spec, std::span<const double> xs, int depth,
                                      double tol = 1e-12);

}  // namespace stairscale
