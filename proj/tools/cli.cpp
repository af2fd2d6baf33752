#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "stairscale/asymptotics.hpp"
#include "stairscale/calculus.hpp"
#include "stairscale/error.hpp"
#include "stairscale/fractal.hpp"
#include "stairscale/io.hpp"
#include "stairscale/jumpode.hpp"
#include "stairscale/verify.hpp"
#include "stairscale/waves.hpp"

namespace stairscale::cli {

namespace {

using io::Json;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        parts.push_back(item);
    }
    return parts;
}

double to_double(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw Error(ErrorCode::Format, "malformed number '" + text + "'");
    }
    return v;
}

struct Grid {
    double lo;
    double hi;
    int n;
};

Grid parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw Error(ErrorCode::Format, "grid must read lo:hi:n");
    }
    return {to_double(parts[0]), to_double(parts[1]), static_cast<int>(to_double(parts[2]))};
}

SequenceSpec parse_sequence(const std::string& text) {
    double limit = 0.0;
    std::string body = text;
    if (const auto at = text.find('@'); at != std::string::npos) {
        limit = to_double(text.substr(at + 1));
        body = text.substr(0, at);
    }
    const auto parts = split(body, ':');
    if (parts.size() == 2 && parts[0] == "geometric") {
        return SequenceSpec::geometric(to_double(parts[1]), limit);
    }
    if (parts.size() == 3 && parts[0] == "scaled") {
        return SequenceSpec::scaled_geometric(to_double(parts[1]), to_double(parts[2]), limit);
    }
    if (parts.size() == 2 && parts[0] == "power") {
        return SequenceSpec::power(to_double(parts[1]), limit);
    }
    throw Error(ErrorCode::Format, "sequence must read geometric:b, scaled:k:b or power:p, optionally @limit");
}

std::vector<double> parse_coefficients(const std::string& text) {
    std::vector<double> c;
    for (const auto& part : split(text, ',')) {
        c.push_back(to_double(part));
    }
    if (c.empty()) {
        throw Error(ErrorCode::Format, "polynomial needs at least one coefficient");
    }
    return c;
}

RealFunction polynomial(std::vector<double> coef) {
    return [coef = std::move(coef)](double x) {
        double acc = 0.0;
        for (auto it = coef.rbegin(); it != coef.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    };
}

RealFunction parse_integrand(const std::string& text) {
    if (text == "one") return [](double) { return 1.0; };
    if (text == "x") return [](double x) { return x; };
    if (text == "x2") return [](double x) { return x * x; };
    if (text.rfind("poly:", 0) == 0) {
        return polynomial(parse_coefficients(text.substr(5)));
    }
    if (text.rfind("indicator:", 0) == 0) {
        const auto parts = split(text.substr(10), ':');
        if (parts.size() != 2) {
            throw Error(ErrorCode::Format, "indicator must read indicator:a:b");
        }
        const double a = to_double(parts[0]);
        const double b = to_double(parts[1]);
        return [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; };
    }
    throw Error(ErrorCode::Format, "unknown integrand '" + text + "'");
}

RealFunction parse_jump_function(const std::string& text, const RenormalizedCoordinate& coord) {
    if (text == "staircase") return [coord](double x) { return coord(x); };
    if (text == "staircase_squared") {
        return [coord](double x) {
            const double X = coord(x);
            return X * X;
        };
    }
    if (text.rfind("constant:", 0) == 0) {
        const double c = to_double(text.substr(9));
        return [c](double) { return c; };
    }
    if (text.rfind("poly:", 0) == 0) {
        return polynomial(parse_coefficients(text.substr(5)));
    }
    throw Error(ErrorCode::Format, "unknown function '" + text + "'");
}

std::vector<int> parse_depths(const std::string& text) {
    std::vector<int> depths;
    if (const auto parts = split(text, ':'); parts.size() == 2) {
        const int lo = static_cast<int>(to_double(parts[0]));
        const int hi = static_cast<int>(to_double(parts[1]));
        for (int n = lo; n <= hi; ++n) {
            depths.push_back(n);
        }
    } else {
        for (const auto& part : split(text, ',')) {
            depths.push_back(static_cast<int>(to_double(part)));
        }
    }
    if (depths.empty()) {
        throw Error(ErrorCode::Format, "depth list is empty");
    }
    return depths;
}

class Context {
public:
    std::string output_path;
    int precision = 0;
    std::uint64_t seed = 20240101;

    explicit Context(std::ostream& out) : stdout_(out) {}

    std::ostream& stream() {
        if (output_path.empty()) {
            return stdout_;
        }
        if (!file_) {
            file_ = std::make_unique<std::ofstream>(output_path, std::ios::binary);
            if (!*file_) {
                throw Error(ErrorCode::Format, "cannot write '" + output_path + "'");
            }
        }
        return *file_;
    }

    std::string num(double v) const { return io::format_number(v, precision); }

    /// Rounds to the requested precision before JSON serialization.
    double round(double v) const { return precision > 0 ? std::stod(io::format_number(v, precision)) : v; }

    void emit(const Json& j) { stream() << j.dump(2) << '\n'; }

private:
    std::ostream& stdout_;
    std::unique_ptr<std::ofstream> file_;
};

int apply_precision_env(Context& ctx) {
    if (const char* env = std::getenv("STAIRSCALE_PRECISION"); env != nullptr && *env != '\0') {
        const double p = to_double(env);
        if (p < 0 || p > 17) {
            throw Error(ErrorCode::Parameter, "STAIRSCALE_PRECISION must lie in [0, 17]");
        }
        ctx.precision = static_cast<int>(p);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scale-relative asymptotic calculus: visibility norms, Cantor staircases, jump ODEs, lossy dispersion"};
    app.name("stairscale");
    app.require_subcommand(1);
    app.fallthrough();

    Context ctx(out);
    std::optional<int> precision_flag;
    app.add_option("-o,--output", ctx.output_path, "Write results to this file instead of standard output");
    app.add_option("--precision", precision_flag, "Significant digits (0 = shortest round-trip)")->check(CLI::Range(0, 17));
    app.add_option("--seed", ctx.seed, "Seed for sampled checks");

    // vnorm
    auto* vnorm = app.add_subcommand("vnorm", "Visibility norm of a real or of a null sequence");
    std::optional<double> vn_x;
    double vn_delta = 0.0;
    std::vector<std::string> vn_seq;
    double vn_scale = 0.0;
    long long vn_nmax = 1000;
    double vn_tol = 1e-9;
    auto* opt_x = vnorm->add_option("--x", vn_x, "Real value");
    auto* opt_delta = vnorm->add_option("--delta", vn_delta, "Scale delta in (0,1)");
    auto* opt_seq = vnorm->add_option("--seq", vn_seq, "Sequence branch: geometric:b | scaled:k:b | power:p [@limit]; repeat for unions");
    auto* opt_scale = vnorm->add_option("--scale", vn_scale, "Geometric scale ratio for sequences");
    vnorm->add_option("--n-max", vn_nmax, "Number of sequence terms");
    vnorm->add_option("--tol", vn_tol, "Convergence tolerance");
    opt_x->needs(opt_delta);
    opt_seq->needs(opt_scale);
    opt_x->excludes(opt_seq);

    auto* sector = app.add_subcommand("sector", "Classify x into its asymptotic sector");
    double sec_x = 0.0;
    double sec_delta = 0.0;
    double sec_band = kDefaultScaleBand;
    sector->add_option("--x", sec_x)->required();
    sector->add_option("--delta", sec_delta)->required();
    sector->add_option("--band", sec_band, "Scale-equivalent band lambda");

    auto* dual = app.add_subcommand("dual", "Duality pairing of a visible element");
    double dual_x = 0.0;
    double dual_delta = 0.0;
    double dual_lambda = 1.0;
    dual->add_option("--x", dual_x)->required();
    dual->add_option("--delta", dual_delta)->required();
    dual->add_option("--lambda", dual_lambda);

    auto* cantor = app.add_subcommand("cantor", "Level sets and membership for a Cantor set");
    std::string cantor_spec = "triadic";
    int cantor_level = 1;
    std::string cantor_member;
    bool cantor_template = false;
    cantor->add_option("--spec", cantor_spec, "triadic | inline JSON | @file");
    cantor->add_option("--level", cantor_level);
    cantor->add_option("--member", cantor_member, "Rational to test, e.g. 1/4");
    cantor->add_flag("--emit-template", cantor_template, "Print a spec file and exit");

    auto* stair = app.add_subcommand("staircase", "Evaluate the Cantor staircase");
    std::string stair_spec = "triadic";
    std::string stair_x;
    int stair_depth = kDefaultStaircaseDepth;
    stair->add_option("--spec", stair_spec);
    stair->add_option("--x", stair_x, "Point in [0,1]; p/q is evaluated exactly")->required();
    stair->add_option("--depth", stair_depth);

    auto* integrate = app.add_subcommand("integrate", "Stieltjes integral against dF");
    std::string int_spec = "triadic";
    std::string int_g = "one";
    int int_depth = 20;
    integrate->add_option("--spec", int_spec);
    integrate->add_option("--integrand", int_g, "one | x | x2 | poly:c0,c1,... | indicator:a:b");
    integrate->add_option("--depth", int_depth);

    auto* djump = app.add_subcommand("djump", "Jump derivative of a function at a point");
    std::string dj_spec = "triadic";
    std::string dj_f = "staircase";
    double dj_x = 0.0;
    std::string dj_depths = "10:30";
    int dj_depth = kDefaultStaircaseDepth;
    djump->add_option("--spec", dj_spec);
    djump->add_option("--f", dj_f, "staircase | staircase_squared | constant:c | poly:c0,c1,...");
    djump->add_option("--x", dj_x)->required();
    djump->add_option("--depths", dj_depths, "lo:hi or comma list of step exponents");
    djump->add_option("--depth", dj_depth, "Staircase depth of the coordinate");

    auto* jumpode = app.add_subcommand("jumpode", "Solve a jump differential equation from a problem file");
    std::string ode_problem;
    bool ode_template = false;
    bool ode_summary = false;
    jumpode->add_option("--problem", ode_problem, "Problem JSON file");
    jumpode->add_flag("--emit-template", ode_template, "Print a problem file and exit");
    jumpode->add_flag("--summary", ode_summary, "Print a JSON summary instead of the solution table");

    auto* dispersion = app.add_subcommand("dispersion", "Sweep the deformed lossy dispersion law");
    DispersionParams disp;
    std::optional<double> disp_beta;
    std::string disp_grid = "1e-6:1e6:60";
    bool disp_classical = false;
    unsigned disp_threads = 1;
    dispersion->add_option("--alpha", disp.alpha);
    dispersion->add_option("--beta", disp_beta, "Defaults to alpha");
    dispersion->add_option("--nu", disp.nu_tilde);
    dispersion->add_option("--c", disp.c);
    dispersion->add_option("--omega-grid", disp_grid, "lo:hi:n, log-spaced");
    dispersion->add_flag("--classical", disp_classical, "Use the classical law with speed c and viscosity nu");
    dispersion->add_option("--threads", disp_threads);

    auto* fit = app.add_subcommand("fit", "Fit a power law to attenuation samples");
    std::string fit_input;
    std::string fit_column = "kbeta_imag";
    std::optional<double> fit_alpha;
    double fit_nu = 1.0;
    std::string fit_window = "1e-6:1e-4:41";
    fit->add_option("--input", fit_input, "CSV with an omega column");
    fit->add_option("--column", fit_column);
    fit->add_option("--alpha", fit_alpha, "Generate samples from the deformed law");
    fit->add_option("--nu", fit_nu);
    fit->add_option("--window", fit_window, "omega window lo:hi:n for generated samples");

    auto* osc = app.add_subcommand("oscillator", "Harmonic-oscillator replica residual");
    double osc_n = 1e6;
    int osc_steps = 1024;
    std::string osc_traj;
    osc->add_option("--N", osc_n);
    osc->add_option("--steps", osc_steps);
    osc->add_option("--trajectory", osc_traj, "Write (T_N, X) as CSV to this file");

    auto* verify = app.add_subcommand("verify", "Run the full invariant suite");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        apply_precision_env(ctx);
        if (precision_flag) {
            ctx.precision = *precision_flag;
        }

        if (vnorm->parsed()) {
            if (vn_x) {
                // long double keeps exact ratios such as 2/8 exact after rounding
                const long double v = visibility_norm_real<long double>(*vn_x, vn_delta);
                ctx.stream() << ctx.num(static_cast<double>(v)) << '\n';
            } else if (!vn_seq.empty()) {
                std::vector<SequenceSpec> parts;
                for (const auto& s : vn_seq) {
                    parts.push_back(parse_sequence(s));
                }
                const auto est = visibility_norm_seq(SequenceSpec::union_of(parts), ScaleSpec::geometric(vn_scale),
                                                     vn_nmax, vn_tol);
                ctx.emit(Json{{"value", ctx.round(est.value)},
                              {"n_used", est.n_used},
                              {"converged", est.converged},
                              {"residual", ctx.round(est.residual)}});
            } else {
                err << "error: usage: vnorm needs --x/--delta or --seq/--scale\n";
                return 2;
            }
        } else if (sector->parsed()) {
            ctx.stream() << to_string(classify_sector(sec_x, sec_delta, sec_band)) << '\n';
        } else if (dual->parsed()) {
            const auto pair = duality_pair(dual_x, dual_delta, dual_lambda);
            ctx.emit(Json{{"dual", ctx.round(pair.dual)},
                          {"norm_product", ctx.round(pair.norm_product)},
                          {"dual_sector", std::string(to_string(pair.dual_sector))}});
        } else if (cantor->parsed()) {
            const auto spec = io::parse_cantor_spec(cantor_spec);
            if (cantor_template) {
                ctx.emit(io::to_json(spec));
            } else if (!cantor_member.empty()) {
                ctx.stream() << to_string(membership(spec, Ratio::parse(cantor_member), cantor_level)) << '\n';
            } else {
                const auto level = construct_level(spec, cantor_level);
                auto& s = ctx.stream();
                s << "kind,lo,hi\n";
                for (const auto& iv : level.intervals) {
                    s << "interval," << iv.lo.to_string() << ',' << iv.hi.to_string() << '\n';
                }
                for (const auto& g : level.gaps) {
                    s << "gap," << g.lo.to_string() << ',' << g.hi.to_string() << '\n';
                }
            }
        } else if (stair->parsed()) {
            const auto spec = io::parse_cantor_spec(stair_spec);
            const auto value = stair_x.find('/') != std::string::npos
                                   ? staircase_eval(spec, Ratio::parse(stair_x), stair_depth)
                                   : staircase_eval(spec, to_double(stair_x), stair_depth);
            ctx.emit(Json{{"F", ctx.round(value.value)}, {"err", ctx.round(value.error)}});
        } else if (integrate->parsed()) {
            const auto spec = io::parse_cantor_spec(int_spec);
            const auto r = stieltjes_integral(parse_integrand(int_g), spec, int_depth);
            ctx.emit(Json{{"value", ctx.round(r.value)}, {"err", ctx.round(r.error)}});
        } else if (djump->parsed()) {
            const RenormalizedCoordinate coord(io::parse_cantor_spec(dj_spec), dj_depth);
            const auto depths = parse_depths(dj_depths);
            const auto est = jump_derivative(parse_jump_function(dj_f, coord), dj_x, coord, depths);
            if (!est.defined) {
                throw Error(ErrorCode::NotJumpDifferentiable, "not jump differentiable at x");
            }
            ctx.emit(Json{{"value", ctx.round(est.value)},
                          {"window", ctx.round(est.window)},
                          {"f_increment", ctx.round(est.f_increment)},
                          {"F_increment", ctx.round(est.F_increment)},
                          {"defined", est.defined},
                          {"converged", est.converged}});
        } else if (jumpode->parsed()) {
            if (ode_template) {
                ctx.emit(io::to_json(io::problem_template()));
                return 0;
            }
            if (ode_problem.empty()) {
                err << "error: usage: jumpode needs --problem or --emit-template\n";
                return 2;
            }
            Json j;
            try {
                j = Json::parse(io::read_file(ode_problem));
            } catch (const nlohmann::json::parse_error& e) {
                throw Error(ErrorCode::Format, std::string("invalid JSON: ") + e.what());
            }
            const auto file = io::problem_file_from_json(j);
            const auto problem = io::to_problem(file);
            const auto sol = solve_jump_ode(problem);
            if (ode_summary) {
                ctx.emit(Json{{"y_end", ctx.round(sol.y_values.back())},
                              {"residual", ctx.round(sol.residual)},
                              {"under_resolved", sol.under_resolved}});
            } else {
                io::write_csv(ctx.stream(), {"x", "X", "y"}, {sol.x_grid, sol.X_grid, sol.y_values}, ctx.precision);
            }
        } else if (dispersion->parsed()) {
            disp.beta = disp_beta.value_or(disp.alpha);
            const auto g = parse_grid(disp_grid);
            const auto omega = log_grid(g.lo, g.hi, g.n);
            std::vector<double> w(omega.begin(), omega.end());
            std::vector<double> re(w.size());
            std::vector<double> im(w.size());
            if (disp_classical) {
                for (std::size_t i = 0; i < w.size(); ++i) {
                    const auto k = lossy_dispersion_classical(w[i], disp.c, disp.nu_tilde);
                    re[i] = k.real();
                    im[i] = k.imag();
                }
            } else {
                const auto sweep = sweep_deformed(omega, disp, disp_threads);
                re.assign(sweep.kbeta_real.begin(), sweep.kbeta_real.end());
                im.assign(sweep.kbeta_imag.begin(), sweep.kbeta_imag.end());
            }
            io::write_csv(ctx.stream(), {"omega", "kbeta_real", "kbeta_imag"}, {w, re, im}, ctx.precision);
        } else if (fit->parsed()) {
            Eigen::ArrayXd omega;
            Eigen::ArrayXd value;
            std::optional<DispersionParams> params;
            if (!fit_input.empty()) {
                std::istringstream in(io::read_file(fit_input));
                std::string line;
                std::getline(in, line);
                const auto header = split(line, ',');
                const auto col_w = std::find(header.begin(), header.end(), "omega");
                const auto col_v = std::find(header.begin(), header.end(), fit_column);
                if (col_w == header.end() || col_v == header.end()) {
                    throw Error(ErrorCode::Format, "CSV lacks the omega or '" + fit_column + "' column");
                }
                std::vector<double> ws;
                std::vector<double> vs;
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    const auto cells = split(line, ',');
                    if (cells.size() != header.size()) {
                        throw Error(ErrorCode::Format, "ragged CSV row");
                    }
                    ws.push_back(to_double(cells[col_w - header.begin()]));
                    vs.push_back(to_double(cells[col_v - header.begin()]));
                }
                omega = Eigen::Map<Eigen::ArrayXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
                value = Eigen::Map<Eigen::ArrayXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
            } else if (fit_alpha) {
                DispersionParams p;
                p.alpha = *fit_alpha;
                p.beta = *fit_alpha;
                p.nu_tilde = fit_nu;
                const auto g = parse_grid(fit_window);
                // The window is given in nu~ omega.
                const auto sweep = sweep_deformed(log_grid(g.lo / fit_nu, g.hi / fit_nu, g.n), p);
                omega = sweep.omega;
                value = sweep.kbeta_imag;
                params = p;
            } else {
                err << "error: usage: fit needs --input or --alpha\n";
                return 2;
            }
            const auto result = fit_power_law(omega, value);
            Json report = io::fit_report(result);
            report["exponent"] = ctx.round(result.exponent);
            report["prefactor"] = ctx.round(result.prefactor);
            report["rsq"] = ctx.round(result.rsq);
            if (params) {
                const auto pf = attenuation_prefactors(*params);
                report["prefactors"] = Json{{"small_regime", ctx.round(pf.small_regime)},
                                            {"large_regime_stated", ctx.round(pf.large_regime_stated)},
                                            {"large_regime_closed_form", ctx.round(pf.large_regime_closed_form)}};
            }
            ctx.emit(report);
        } else if (osc->parsed()) {
            const auto r = oscillator_replica(osc_n, osc_steps);
            if (!osc_traj.empty()) {
                std::ofstream t(osc_traj, std::ios::binary);
                if (!t) {
                    throw Error(ErrorCode::Format, "cannot write '" + osc_traj + "'");
                }
                std::vector<double> tn;
                std::vector<double> xs;
                for (const auto& [a, b] : r.trajectory) {
                    tn.push_back(a);
                    xs.push_back(b);
                }
                io::write_csv(t, {"T_N", "X"}, {tn, xs}, ctx.precision);
            }
            ctx.emit(Json{{"analytic_residual", ctx.round(r.analytic_residual)},
                          {"fd_residual", ctx.round(r.fd_residual)},
                          {"fd_spacing", ctx.round(r.fd_spacing)}});
        } else if (verify->parsed()) {
            const auto results = run_invariant_suite(ctx.seed);
            bool all = true;
            auto& s = ctx.stream();
            for (const auto& r : results) {
                all = all && r.passed;
                s << (r.passed ? "PASS" : "FAIL") << ' ' << r.id << ' ' << r.name << " ("
                  << io::format_number(r.seconds, 3) << "s / " << r.budget_seconds << "s): " << r.detail << '\n';
            }
            s << (all ? "verify: all checks passed" : "verify: FAILED") << '\n';
            return all ? 0 : 1;
        }
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: format: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace stairscale::cli
