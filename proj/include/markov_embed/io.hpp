#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "markov_embed/embeddability.hpp"

namespace markov_embed {

enum class MatrixFormat { json, csv };
enum class OutputFormat { human, json };

/// One CLI invocation. Exactly one of input_path / inline_text must be set.
struct CliRequest {
    std::optional<std::string> input_path;
    std::optional<std::string> inline_text;
    MatrixFormat format = MatrixFormat::json;
    bool want_witness = false;
    bool want_all_branches = false;
    OutputFormat output = OutputFormat::human;
    Tolerances tol{};
    std::uint64_t seed = 0;  ///< reserved for randomized fallbacks
};

/// Parses matrix text. CSV: one row per line, comma-separated decimals.
/// JSON: array of arrays of numbers. Throws Error{ragged_rows | non_numeric |
/// bad_dimension}.
Mat parse_matrix(const std::string& text, MatrixFormat format);

/// Machine-readable report; numbers round-trip at full double precision.
std::string render_json(const Verdict& v);

/// Terminal report with 6 significant digits.
std::string render_human(const Verdict& v);

/// Executes one request: parse, decide, print the report to `out`.
/// Returns the process exit code: 0 embeddable, 1 not embeddable,
/// 2 input/validation error (parse failures, decomposable inputs, ...).
int run(const CliRequest& request, std::ostream& out, std::ostream& err);

}  // namespace markov_embed
