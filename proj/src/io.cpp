#include "stairscale/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "stairscale/error.hpp"

namespace stairscale::io {

std::string format_number(double value, int precision) {
    std::array<char, 64> buf{};
    std::to_chars_result res;
    if (precision <= 0) {
        res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    } else {
        res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, precision);
    }
    if (res.ec != std::errc()) {
        throw Error(ErrorCode::Format, "number formatting failed");
    }
    return std::string(buf.data(), res.ptr);
}

Json to_json(const CantorSpec& spec) {
    return Json{{"base", spec.base()}, {"layout", std::vector<int>(spec.layout().begin(), spec.layout().end())}};
}

CantorSpec cantor_spec_from_json(const Json& j) {
    if (j.is_string() && j.get<std::string>() == "triadic") {
        return CantorSpec::triadic();
    }
    if (!j.is_object() || !j.contains("base") || !j.contains("layout")) {
        throw Error(ErrorCode::Format, "Cantor spec must be an object with \"base\" and \"layout\"");
    }
    try {
        return CantorSpec(j.at("base").get<int>(), j.at("layout").get<std::vector<int>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Format, std::string("Cantor spec: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Format, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Format, std::string("invalid JSON: ") + e.what());
    }
}

double checked_pow(double base, int power) {
    return power == 0 ? 1.0 : std::pow(base, power);
}

}  // namespace

CantorSpec parse_cantor_spec(std::string_view text) {
    if (text == "triadic") {
        return CantorSpec::triadic();
    }
    if (!text.empty() && text.front() == '@') {
        return cantor_spec_from_json(parse_json_text(read_file(std::string(text.substr(1)))));
    }
    return cantor_spec_from_json(parse_json_text(std::string(text)));
}

Json to_json(const JumpOdeProblemFile& problem) {
    Json j;
    j["spec"] = problem.spec ? to_json(*problem.spec) : Json("identity");
    j["y0"] = problem.y0;
    j["depth"] = problem.depth;
    j["steps"] = problem.steps;
    j["tolerance"] = problem.tolerance;
    if (!problem.rhs.builtin.empty()) {
        j["rhs"] = problem.rhs.builtin;
    } else {
        Json terms = Json::array();
        for (const auto& t : problem.rhs.terms) {
            terms.push_back({{"coef", t.coef}, {"x", t.x_power}, {"y", t.y_power}, {"X", t.X_power}});
        }
        j["rhs"] = Json{{"terms", terms}};
    }
    return j;
}

JumpOdeProblemFile problem_file_from_json(const Json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::Format, "problem file must be a JSON object");
    }
    static const std::array<std::string_view, 6> known{"spec", "y0", "depth", "steps", "tolerance", "rhs"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw Error(ErrorCode::Format, "unknown problem field \"" + key + "\"");
        }
    }
    try {
        JumpOdeProblemFile p;
        const auto& spec = j.at("spec");
        if (spec.is_string() && spec.get<std::string>() == "identity") {
            p.spec.reset();
        } else {
            p.spec = cantor_spec_from_json(spec);
        }
        p.y0 = j.value("y0", p.y0);
        p.depth = j.value("depth", p.depth);
        p.steps = j.value("steps", p.steps);
        p.tolerance = j.value("tolerance", p.tolerance);
        const auto& rhs = j.at("rhs");
        if (rhs.is_string()) {
            p.rhs.builtin = rhs.get<std::string>();
            static const std::array<std::string_view, 4> builtins{"one", "zero", "y", "twice_staircase"};
            if (std::find(builtins.begin(), builtins.end(), p.rhs.builtin) == builtins.end()) {
                throw Error(ErrorCode::Format, "unknown builtin right-hand side \"" + p.rhs.builtin + "\"");
            }
        } else {
            for (const auto& t : rhs.at("terms")) {
                RhsTerm term;
                term.coef = t.at("coef").get<double>();
                term.x_power = t.value("x", 0);
                term.y_power = t.value("y", 0);
                term.X_power = t.value("X", 0);
                if (term.x_power < 0 || term.y_power < 0 || term.X_power < 0) {
                    throw Error(ErrorCode::Format, "polynomial powers must be non-negative");
                }
                p.rhs.terms.push_back(term);
            }
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Format, std::string("problem file: ") + e.what());
    }
}

JumpOdeProblemFile problem_template() {
    JumpOdeProblemFile p;
    p.spec = CantorSpec::triadic();
    p.y0 = 0.0;
    p.depth = 20;
    p.steps = 10000;
    p.tolerance = 1e-6;
    p.rhs.builtin = "one";
    return p;
}

JumpOdeProblem to_problem(const JumpOdeProblemFile& file) {
    JumpOdeProblem p;
    if (file.depth < 1) {
        throw Error(ErrorCode::Precondition, "depth must be at least 1");
    }
    if (file.spec) {
        p.coordinate = RenormalizedCoordinate(*file.spec, file.depth);
    } else {
        p.coordinate = IdentityCoordinate{};
    }
    p.y0 = file.y0;
    p.steps = file.steps;
    p.tolerance = file.tolerance;

    const Coordinate coord = p.coordinate;
    const auto staircase = [coord](double x) {
        return std::visit([x](const auto& c) { return c(x); }, coord);
    };
    const auto& name = file.rhs.builtin;
    if (name == "one") {
        p.rhs = [](double, double) { return 1.0; };
    } else if (name == "zero") {
        p.rhs = [](double, double) { return 0.0; };
    } else if (name == "y") {
        p.rhs = [](double, double y) { return y; };
    } else if (name == "twice_staircase") {
        p.rhs = [staircase](double x, double) { return 2.0 * staircase(x); };
    } else {
        const auto terms = file.rhs.terms;
        p.rhs = [terms, staircase](double x, double y) {
            double sum = 0.0;
            for (const auto& t : terms) {
                const double X = t.X_power > 0 ? staircase(x) : 1.0;
                sum += t.coef * checked_pow(x, t.x_power) * checked_pow(y, t.y_power) * checked_pow(X, t.X_power);
            }
            return sum;
        };
    }
    return p;
}

Json fit_report(const PowerLawFit& fit) {
    return Json{{"exponent", fit.exponent},
                {"prefactor", fit.prefactor},
                {"rsq", fit.rsq},
                {"window", Json::array({fit.omega_min, fit.omega_max})}};
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns, int precision) {
    if (header.size() != columns.size()) {
        throw Error(ErrorCode::Precondition, "CSV header and column count differ");
    }
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns) {
        if (col.size() != rows) {
            throw Error(ErrorCode::Precondition, "CSV columns have different lengths");
        }
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        out << (c ? "," : "") << header[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << format_number(columns[c][r], precision);
        }
        out << '\n';
    }
}

}  // namespace stairscale::io
