// Command-line front end: reads a 2x2 or 3x3 stochastic matrix, prints the
// spectrum classification, the embeddability verdict with both sides of the
// deciding inequality, and (on request) verified witness generators.
//
// Exit codes: 0 embeddable, 1 not embeddable, 2 input/validation error.

#include <iostream>

#include <CLI11.hpp>

#include "markov_embed/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Embeddability test for 2x2/3x3 stochastic matrices: decides whether P = exp(Q) "
                 "for some transition rate matrix Q and can synthesize a verified witness Q"};

    markov_embed::CliRequest request;
    std::string input_path;
    std::string matrix_text;
    std::string format = "json";
    std::string output = "human";
    double tol_verify = markov_embed::default_tolerances().verify;

    auto* input_opt = app.add_option("--input", input_path, "Path to a matrix file");
    auto* matrix_opt = app.add_option("--matrix", matrix_text, "Inline matrix text");
    input_opt->excludes(matrix_opt);
    app.add_option("--format", format, "Input format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--witness", request.want_witness, "Synthesize and verify a witness generator");
    app.add_flag("--all-branches", request.want_all_branches,
                 "Report every feasible logarithm branch, not just the principal one");
    app.add_option("--tol-verify", tol_verify, "Witness acceptance tolerance on ||exp(G) - P||")
        ->check(CLI::PositiveNumber);
    app.add_option("--output", output, "Report format")->check(CLI::IsMember({"human", "json"}));
    app.add_option("--seed", request.seed, "Seed for randomized fallbacks");

    CLI11_PARSE(app, argc, argv);

    if (!input_path.empty()) request.input_path = input_path;
    if (matrix_opt->count() > 0) request.inline_text = matrix_text;
    request.format = format == "csv" ? markov_embed::MatrixFormat::csv : markov_embed::MatrixFormat::json;
    request.output = output == "json" ? markov_embed::OutputFormat::json : markov_embed::OutputFormat::human;
    request.tol.verify = tol_verify;

    return markov_embed::run(request, std::cout, std::cerr);
}
