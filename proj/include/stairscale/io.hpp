#pragma once

// Serialization: CantorSpec and jump-ODE problem files as JSON, CSV tables,
// and locale-independent number formatting.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stairscale/fractal.hpp"
#include "stairscale/jumpode.hpp"
#include "stairscale/waves.hpp"

namespace stairscale::io {

using Json = nlohmann::json;

/// precision == 0 gives the shortest decimal that round-trips; otherwise
/// `precision` significant digits. Always '.' as decimal separator.
[[nodiscard]] std::string format_number(double value, int precision = 0);

[[nodiscard]] Json to_json(const CantorSpec& spec);
[[nodiscard]] CantorSpec cantor_spec_from_json(const Json& j);
/// "triadic", an inline JSON object, or "@path" to a JSON file.
[[nodiscard]] CantorSpec parse_cantor_spec(std::string_view text);

/// One term coef * x^x_power * y^y_power * X^X_power, X = F(x).
struct RhsTerm {
    double coef = 1.0;
    int x_power = 0;
    int y_power = 0;
    int X_power = 0;

    friend bool operator==(const RhsTerm&, const RhsTerm&) = default;
};

/// Right-hand side as stored in a problem file: a named builtin
/// ("one", "zero", "y", "twice_staircase") or a polynomial table.
struct RhsDescription {
    std::string builtin;
    std::vector<RhsTerm> terms;

    friend bool operator==(const RhsDescription&, const RhsDescription&) = default;
};

struct JumpOdeProblemFile {
    std::optional<CantorSpec> spec;  // nullopt selects the identity coordinate
    double y0 = 0.0;
    int depth = 20;
    int steps = 10000;
    double tolerance = 1e-6;
    RhsDescription rhs;
};

[[nodiscard]] Json to_json(const JumpOdeProblemFile& problem);
[[nodiscard]] JumpOdeProblemFile problem_file_from_json(const Json& j);
[[nodiscard]] JumpOdeProblemFile problem_template();
[[nodiscard]] JumpOdeProblem to_problem(const JumpOdeProblemFile& file);

[[nodiscard]] Json fit_report(const PowerLawFit& fit);

/// Writes `header` then one row per index; every column must have equal length.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns, int precision = 0);

[[nodiscard]] std::string read_file(const std::string& path);

}  // namespace stairscale::io
