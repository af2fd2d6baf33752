#include "stairscale/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "stairscale/asymptotics.hpp"
#include "stairscale/calculus.hpp"
#include "stairscale/fractal.hpp"
#include "stairscale/jumpode.hpp"
#include "stairscale/waves.hpp"

namespace stairscale {

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && passed) {
            detail << "first failure: " << what << "; ";
        }
        passed = passed && ok;
    }
};

using Check = std::function<void(Outcome&, std::mt19937_64&)>;

void power_rule(Outcome& out, std::mt19937_64&) {
    double worst = 0.0;
    for (const double delta : {1e-4, 1e-8, 1e-12}) {
        for (int i = 1; i <= 39; ++i) {
            const double p = i / 10.0;
            const double v = visibility_norm_real(std::pow(delta, p), delta);
            const double target = std::fabs(p - 1.0);
            const double err = target == 0.0 ? std::fabs(v) : std::fabs(v - target) / target;
            worst = std::max(worst, err);
        }
    }
    out.require(worst <= 1e-12, "relative error above 1e-12");
    out.detail << "max relative error " << worst;
}

void ultrametric(Outcome& out, std::mt19937_64& rng) {
    const double delta = 1e-12;
    std::uniform_real_distribution<double> visible(0.0, 1.0);
    std::uniform_real_distribution<double> invisible(2.0, 4.0);
    int failures = 0;
    double worst_excess = -1.0;
    for (int i = 0; i < 1000; ++i) {
        for (auto* dist : {&visible, &invisible}) {
            const double p = (*dist)(rng);
            const double q = (*dist)(rng);
            const auto c = ultrametric_check(std::pow(delta, p), std::pow(delta, q), delta);
            failures += c.holds ? 0 : 1;
            worst_excess = std::max(worst_excess, c.lhs - c.rhs);
        }
    }
    out.require(failures == 0, std::to_string(failures) + " pairs violate the strong triangle inequality");
    out.detail << "2000 pairs, max v(x+y)-max(v(x),v(y)) = " << worst_excess << ", slack " << scale_slack(delta);
}

void sequence_norm(Outcome& out, std::mt19937_64&) {
    const auto scale = ScaleSpec::geometric(0.25);
    for (const long long n : {2LL, 3LL, 10LL, 100LL, 1000LL, 10000LL}) {
        const auto est = visibility_norm_seq(SequenceSpec::geometric(0.5), scale, n, 1e-12);
        out.require(est.value == 0.5, "geometric norm differs from 0.5 at n=" + std::to_string(n));
    }
    const auto scaled = visibility_norm_seq(SequenceSpec::scaled_geometric(7.0, 0.5), scale, 10000, 1e-3);
    out.require(std::fabs(scaled.value - 0.5) <= 1e-3, "scaled geometric not within 1e-3 of 0.5");
    out.require(scaled.converged && scaled.residual <= 1e-3, "scaled geometric residual above 1e-3");
    out.detail << "scaled k=7 at n=1e4: value " << scaled.value << ", residual " << scaled.residual;
}

void staircase(Outcome& out, std::mt19937_64& rng) {
    const auto spec = CantorSpec::triadic();
    const int depth = 30;
    const double bound = 2.0 * std::ldexp(1.0, -depth);
    const auto quarter = staircase_eval(spec, 0.25, depth);
    out.require(std::fabs(quarter.value - 1.0 / 3.0) <= std::ldexp(1.0, -30), "F(1/4) != 1/3");
    out.require(staircase_eval(spec, Ratio(1, 3), depth).value == 0.5, "F(1/3) != 1/2");
    out.require(staircase_eval(spec, Ratio(2, 3), depth).value == 0.5, "F(2/3) != 1/2");
    out.require(staircase_eval(spec, 0.0, depth).value == 0.0, "F(0) != 0");
    out.require(staircase_eval(spec, 1.0, depth).value == 1.0, "F(1) != 1");
    std::uniform_real_distribution<double> gap(1.0 / 3.0, 2.0 / 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        out.require(staircase_eval(spec, gap(rng), depth).value == 0.5, "F not 1/2 on the middle gap");
        const double x = unit(rng);
        const double f = staircase_eval(spec, x, depth).value;
        worst = std::max(worst, std::fabs(staircase_eval(spec, x / 3.0, depth).value - f / 2.0));
        worst = std::max(worst, std::fabs(staircase_eval(spec, (x + 2.0) / 3.0, depth).value - (1.0 + f) / 2.0));
        worst = std::max(worst, std::fabs(staircase_eval(spec, 1.0 - x, depth).value - (1.0 - f)));
    }
    out.require(worst <= bound, "self-similarity or symmetry identity off by more than 2^-29");
    out.detail << "max identity defect " << worst << " (bound " << bound << ")";
}

void sharp_bound(Outcome& out, std::mt19937_64& rng) {
    const auto spec = CantorSpec::triadic();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> xs(10000);
    for (auto& x : xs) {
        x = 1.0 - unit(rng);  // (0, 1]
    }
    const auto report = bound_check(spec, xs, 50);
    out.require(report.upper_holds, "F(x) > x^s at some sample");
    out.require(report.lower_holds, "F(x) < x^s / k at some sample");
    const double s = spec.dimension();
    double worst = 0.0;
    std::int64_t pow3 = 1;
    for (int n = 0; n <= 10; ++n, pow3 *= 3) {
        const double f = staircase_eval(spec, Ratio(1, pow3), 50).value;
        const double xs_pow = std::pow(1.0 / static_cast<double>(pow3), s);
        worst = std::max(worst, std::fabs(f - xs_pow) / xs_pow);
    }
    out.require(worst <= 1e-12, "upper bound not attained at 3^-n");
    out.detail << "max F/x^s " << report.max_upper_ratio << ", min kF/x^s " << report.min_lower_ratio
               << ", attainment defect " << worst;
}

void moments(Outcome& out, std::mt19937_64&) {
    const auto spec = CantorSpec::triadic();
    const int depth = 20;
    const auto m0 = stieltjes_integral([](double) { return 1.0; }, spec, depth);
    const auto m1 = stieltjes_integral([](double x) { return x; }, spec, depth);
    const auto m2 = stieltjes_integral([](double x) { return x * x; }, spec, depth);
    out.require(m0.value == 1.0, "integral of 1 is not exactly 1");
    out.require(std::fabs(m1.value - 0.5) <= 1e-6, "first moment off");
    out.require(std::fabs(m2.value - 0.375) <= 1e-6, "second moment off");
    out.detail << "m1 " << m1.value << ", m2 " << m2.value;
}

void jump_identity(Outcome& out, std::mt19937_64& rng) {
    const auto spec = CantorSpec::triadic();
    const RenormalizedCoordinate coord(spec, 40);
    const RealFunction cantor = StaircaseEvaluator(spec, 45);
    const std::vector<int> depths{13, 14, 15, 16, 17, 18};
    std::uniform_int_distribution<int> level(1, 11);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_real_distribution<double> inside(0.25, 0.75);
    double worst_on = 0.0;
    int off_failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const int n = level(rng);
        double left = 0.0;
        double width = 1.0;
        for (int k = 0; k < n; ++k) {
            width /= 3.0;
            left += 2.0 * bit(rng) * width;
        }
        const auto on = jump_derivative(cantor, left, coord, depths);
        worst_on = std::max(worst_on, on.defined ? std::fabs(on.value - 1.0) : 1.0);
        // Point in the middle gap of the level-n piece [left, left + width].
        const double gx = left + width * (1.0 + inside(rng)) / 3.0;
        const auto off = jump_derivative(cantor, gx, coord, depths);
        off_failures += (off.defined && off.value == 0.0) ? 0 : 1;
    }
    out.require(worst_on <= 1e-6, "D_J f_C differs from 1 on the set");
    out.require(off_failures == 0, std::to_string(off_failures) + " gap points without D_J f_C = 0");
    out.detail << "max |D_J f_C - 1| on set " << worst_on;
}

void jump_ode(Outcome& out, std::mt19937_64& rng) {
    const auto spec = CantorSpec::triadic();
    const auto one = solve_jump_ode(
        JumpOdeProblem::on_cantor_set([](double, double) { return 1.0; }, spec, 0.0, 20, 10000));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 4000; ++i) {
        const double x = unit(rng);
        worst = std::max(worst, std::fabs(one.at(x) - staircase_eval(spec, x, 50).value));
    }
    const double bound = std::ldexp(1.0, -20) + 1e-9;
    out.require(worst <= bound, "f = 1 solution differs from the Cantor function");
    out.require(std::fabs(one.y_values.back() - 1.0) <= 1e-9, "y(1) != 1 for f = 1");
    const RenormalizedCoordinate X(spec, 30);
    const auto quad = solve_jump_ode(JumpOdeProblem::on_cantor_set(
        [X](double x, double) { return 2.0 * X(x); }, spec, 0.0, 30, 10000));
    out.require(std::fabs(quad.y_values.back() - 1.0) <= 1e-6, "y(1) != 1 for f~ = 2X");
    out.detail << "sup error " << worst << " (bound " << bound << "), 2X: y(1) = " << quad.y_values.back();
}

void classical_reduction(Outcome& out, std::mt19937_64&) {
    const auto omega = log_grid(1e-6, 1e6, 60);
    DispersionParams p;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < omega.size(); ++i) {
        const auto d = lossy_dispersion_deformed(omega(i), p);
        const auto c = lossy_dispersion_classical(omega(i), 1.0, 1.0);
        const std::complex<double> kd(d.kbeta_real, d.kbeta_imag);
        worst = std::max(worst, std::abs(kd - c) / std::abs(c));
    }
    out.require(worst <= 1e-12, "deformed law at alpha = beta = 1 differs from the classical root");
    out.detail << "max relative difference " << worst;
}

void attenuation_slopes(Outcome& out, std::mt19937_64&) {
    for (const double alpha : {0.3, 0.5, 0.7, 0.9}) {
        DispersionParams p;
        p.alpha = alpha;
        p.beta = alpha;
        for (const bool small : {true, false}) {
            const auto omega = small ? log_grid(1e-6, 1e-4, 41) : log_grid(1e4, 1e6, 41);
            const auto sweep = sweep_deformed(omega, p);
            const auto fit = fit_power_law(sweep.omega, sweep.kbeta_imag);
            const double target = small ? 2.0 * alpha : alpha / 2.0;
            const double rel = std::fabs(fit.exponent - target) / target;
            std::ostringstream what;
            what << "alpha " << alpha << (small ? " small" : " large") << " window exponent " << fit.exponent
                 << " vs " << target << " (" << 100.0 * rel << "%)";
            out.require(rel <= 0.01, what.str());
            out.require(fit.exponent > 0.0 && fit.exponent <= 2.0, "exponent outside (0,2]");
            out.detail << (small ? "s" : "l") << alpha << ":" << fit.exponent << " ";
        }
    }
}

void oscillator(Outcome& out, std::mt19937_64&) {
    for (const double n : {1e3, 1e6, 1e9}) {
        const auto r = oscillator_replica(n, 1024);
        const double analytic = 1.0 / std::log(n);
        out.require(std::fabs(r.analytic_residual - analytic) <= 1e-12, "analytic residual != 1/log N");
        out.require(std::fabs(r.fd_residual - r.analytic_residual) <= 1e-3, "finite-difference residual off");
        out.detail << "N=" << n << ": " << r.analytic_residual << "/" << r.fd_residual << " ";
    }
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed) {
    struct Entry {
        int id;
        const char* name;
        double budget;
        Check check;
    };
    const std::vector<Entry> entries{
        {1, "power rule", 1.0, power_rule},
        {2, "ultrametric inequality", 1.0, ultrametric},
        {3, "sequence norm", 1.0, sequence_norm},
        {4, "staircase correctness", 2.0, staircase},
        {5, "sharp bound", 2.0, sharp_bound},
        {6, "Stieltjes moments", 5.0, moments},
        {7, "jump derivative identity", 5.0, jump_identity},
        {8, "jump ODE", 10.0, jump_ode},
        {9, "classical reduction", 1.0, classical_reduction},
        {10, "attenuation slopes", 2.0, attenuation_slopes},
        {11, "oscillator replica", 1.0, oscillator},
    };
    std::vector<CheckResult> results;
    for (const auto& e : entries) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(e.id));
        Outcome outcome;
        const auto start = std::chrono::steady_clock::now();
        try {
            e.check(outcome, rng);
        } catch (const std::exception& ex) {
            outcome.passed = false;
            outcome.detail << "exception: " << ex.what();
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        CheckResult r;
        r.id = e.id;
        r.name = e.name;
        r.seconds = elapsed.count();
        r.budget_seconds = e.budget;
        r.passed = outcome.passed && r.seconds < e.budget;
        r.detail = outcome.detail.str();
        if (r.seconds >= e.budget) {
            r.detail += " over time budget";
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace stairscale
