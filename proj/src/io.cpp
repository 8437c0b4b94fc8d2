#include "markov_embed/io.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace markov_embed {

namespace {

using nlohmann::json;

Mat parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw Error(errc::non_numeric, "row " + std::to_string(lineno) + ", entry " +
                                                   std::to_string(row.size() + 1) + ": '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(errc::bad_dimension, "no rows in input");
    const std::size_t cols = rows.front().size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw Error(errc::ragged_rows, "row " + std::to_string(i + 1) + " has " +
                                               std::to_string(rows[i].size()) + " entries, expected " +
                                               std::to_string(cols));
        }
    }
    Mat m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    return m;
}

Mat parse_json_matrix(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(errc::non_numeric, std::string("JSON parse failure: ") + e.what());
    }
    if (!doc.is_array() || doc.empty()) throw Error(errc::bad_dimension, "expected an array of rows");
    const std::size_t rows = doc.size();
    std::size_t cols = 0;
    if (!doc[0].is_array()) throw Error(errc::bad_dimension, "row 1 is not an array");
    cols = doc[0].size();
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!doc[i].is_array()) throw Error(errc::bad_dimension, "row " + std::to_string(i + 1) + " is not an array");
        if (doc[i].size() != cols) {
            throw Error(errc::ragged_rows, "row " + std::to_string(i + 1) + " has " +
                                               std::to_string(doc[i].size()) + " entries, expected " +
                                               std::to_string(cols));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!doc[i][j].is_number()) {
                throw Error(errc::non_numeric,
                            "row " + std::to_string(i + 1) + ", entry " + std::to_string(j + 1));
            }
            m(i, j) = doc[i][j].get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json spectrum_to_json(const SpectrumClass& s) {
    json out;
    out["case"] = spectrum_case_name(s);
    struct Values {
        json operator()(const DistinctReal& d) const { return json::array({d.lambda1, d.lambda2}); }
        json operator()(const CoincidingPositive& c) const { return json::array({c.lambda}); }
        json operator()(const CoincidingNegative& c) const { return json::array({c.lambda}); }
        json operator()(const ComplexPair& c) const { return json::array({c.modulus, c.argument}); }
    };
    out["values"] = std::visit(Values{}, s);
    if (const auto* cp = std::get_if<CoincidingPositive>(&s)) out["diagonalizable"] = cp->diagonalizable;
    return out;
}

std::string fmt6(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

const char* log_level() {
    const char* env = std::getenv("MARKOV_EMBED_LOG");
    return env ? env : "";
}

}  // namespace

Mat parse_matrix(const std::string& text, MatrixFormat format) {
    Mat m = format == MatrixFormat::csv ? parse_csv(text) : parse_json_matrix(text);
    if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 3)) {
        throw Error(errc::bad_dimension, "expected a square 2x2 or 3x3 matrix, got " +
                                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    return m;
}

std::string render_json(const Verdict& v) {
    json out;
    out["valid"] = true;
    out["n"] = v.n;
    out["indecomposable"] = v.indecomposable;
    out["mu"] = nullptr;
    if (v.mu) {
        json mu = json::array();
        for (Eigen::Index i = 0; i < v.mu->size(); ++i) mu.push_back((*v.mu)(i));
        out["mu"] = std::move(mu);
    }
    out["spectrum"] = v.spectrum ? spectrum_to_json(*v.spectrum) : json(nullptr);
    out["goodman"] = v.goodman ? json(*v.goodman) : json(nullptr);
    out["criterion"] = {{"name", v.criterion}, {"lhs", v.lhs}, {"rhs", v.rhs}};
    out["lambda_bound"] = v.lambda_bound ? json(*v.lambda_bound) : json(nullptr);
    out["embeddable"] = v.embeddable;
    out["reversible"] = v.reversible;
    if (!v.branch_checks.empty()) {
        json checks = json::array();
        for (const auto& c : v.branch_checks) {
            checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
        }
        out["branches"] = std::move(checks);
    }
    json witnesses = json::array();
    for (const auto& w : v.witnesses) {
        witnesses.push_back({{"matrix", matrix_to_json(w.generator.mat())},
                             {"h", w.time_scale},
                             {"branch", w.branch},
                             {"residual", w.residual}});
    }
    out["witnesses"] = std::move(witnesses);
    return out.dump(2);
}

std::string render_human(const Verdict& v) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "matrix: " << v.n << "x" << v.n << " stochastic, valid\n";
    os << "indecomposable: " << (v.indecomposable ? "yes" : "no") << "\n";
    if (v.mu) {
        os << "stationary distribution: (";
        for (Eigen::Index i = 0; i < v.mu->size(); ++i) os << (i ? ", " : "") << (*v.mu)(i);
        os << ")\n";
    }
    if (v.spectrum) {
        os << "spectrum: " << spectrum_case_name(*v.spectrum);
        struct Print {
            std::ostringstream& os;
            void operator()(const DistinctReal& d) const {
                os << " (lambda1 = " << d.lambda1 << ", lambda2 = " << d.lambda2 << ")";
            }
            void operator()(const CoincidingPositive& c) const {
                os << " (lambda = " << c.lambda << (c.diagonalizable ? ", diagonalizable" : ", defective") << ")";
            }
            void operator()(const CoincidingNegative& c) const { os << " (lambda = " << c.lambda << ")"; }
            void operator()(const ComplexPair& c) const {
                os << " (r = " << c.modulus << ", theta = " << c.argument << ")";
            }
        };
        std::visit(Print{os}, *v.spectrum);
        os << "\n";
    }
    if (v.goodman) os << "goodman precheck: " << (*v.goodman ? "pass" : "fail") << "\n";
    if (v.lambda_bound) os << "lambda lower bound: " << *v.lambda_bound << "\n";
    os << "criterion: " << v.criterion << " (lhs = " << fmt6(v.lhs) << ", rhs = " << fmt6(v.rhs) << ")";
    if (v.reversible) os << " [reversible: testing upper triangle only]";
    os << "\n";
    for (const auto& c : v.branch_checks) {
        os << "  " << c.name << ": " << fmt6(c.lhs) << (c.holds ? " satisfies " : " violates ") << fmt6(c.rhs)
           << "\n";
    }
    os << "embeddable: " << (v.embeddable ? "yes" : "no") << "\n";
    for (std::size_t w = 0; w < v.witnesses.size(); ++w) {
        const auto& rep = v.witnesses[w];
        os << "witness[" << w << "]: branch " << rep.branch << ", h = " << rep.time_scale
           << ", residual = " << rep.residual << "\n";
        for (int i = 0; i < rep.generator.n(); ++i) {
            os << "  [";
            for (int j = 0; j < rep.generator.n(); ++j) os << (j ? ", " : "") << rep.generator(i, j);
            os << "]\n";
        }
    }
    return os.str();
}

int run(const CliRequest& request, std::ostream& out, std::ostream& err) {
    const bool json_mode = request.output == OutputFormat::json;
    auto emit_error = [&](const std::string& code, const std::string& message) {
        if (json_mode) {
            json doc;
            doc["valid"] = false;
            doc["error"] = {{"code", code}, {"message", message}};
            doc["embeddable"] = nullptr;
            out << doc.dump(2) << "\n";
        } else {
            out << "error: " << message << "\n";
        }
        return 2;
    };

    std::string text;
    if (request.input_path && request.inline_text) {
        return emit_error("bad-request", "give either an input file or an inline matrix, not both");
    } else if (request.input_path) {
        std::ifstream in(*request.input_path);
        if (!in) return emit_error("io", "cannot open " + *request.input_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    } else if (request.inline_text) {
        text = *request.inline_text;
    } else {
        return emit_error("bad-request", "no input given");
    }

    try {
        Mat raw = parse_matrix(text, request.format);
        StochasticMatrix P = validate_stochastic(raw, request.tol);
        EmbedOptions opts;
        opts.want_witness = request.want_witness;
        opts.all_branches = request.want_all_branches;
        opts.tol = request.tol;
        if (std::string(log_level()) == "debug") {
            err << "[debug] parsed " << P.n() << "x" << P.n() << " matrix, witness="
                << (opts.want_witness ? "yes" : "no") << "\n";
        }
        Verdict v = embeddable(P, opts);
        out << (json_mode ? render_json(v) : render_human(v)) << "\n";
        return v.embeddable ? 0 : 1;
    } catch (const Error& e) {
        return emit_error(to_string(e.code()), e.what());
    } catch (const std::exception& e) {
        return emit_error("internal", e.what());
    }
}

}  // namespace markov_embed
