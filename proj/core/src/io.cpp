#include "ivreg/io.hpp"

#include "ivreg/errors.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ivreg::io {

using nlohmann::json;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw InputError("not a finite number: '" + std::string(s) + "'");
    return v;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from(const json& a, const char* name) {
    if (!a.is_array()) throw InputError(std::string(name) + ": expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw InputError(std::string(name) + ": expected numbers");
        v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    }
    return v;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::MatrixXd matrix_from(const json& j, const char* name) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw InputError(std::string(name) + ": expected {rows, cols, data}");
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != r)
        throw InputError(std::string(name) + ": row count mismatch");
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        Eigen::VectorXd row = vector_from(data[static_cast<std::size_t>(i)], name);
        if (row.size() != c) throw InputError(std::string(name) + ": column count mismatch");
        m.row(i) = row.transpose();
    }
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string signal_to_csv(const Signal& u) {
    std::string out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        out += format_double(u[i]);
        out += '\n';
    }
    return out;
}

Signal signal_from_csv(const std::string& text, double h) {
    std::vector<double> values;
    for (const auto& line : split_lines(text)) values.push_back(parse_double(line));
    return Signal::from(values, h);
}

std::string signal_to_json(const Signal& u) {
    json j{{"h", u.grid().spacing()}, {"values", vector_json(u.values())}};
    return j.dump();
}

Signal signal_from_json(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object() || !j.contains("values")) throw InputError("signal JSON: missing 'values'");
    const double h = j.value("h", 1.0);
    Eigen::VectorXd v = vector_from(j.at("values"), "values");
    const Grid grid(static_cast<std::size_t>(v.size()), h);
    return Signal(grid, std::move(v));
}

std::string operator_to_csv(const DenseOperator& a) {
    std::string out;
    const auto& m = a.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            if (k) out += ',';
            out += format_double(m(i, k));
        }
        out += '\n';
    }
    return out;
}

DenseOperator operator_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    for (const auto& line : split_lines(text)) {
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            row.push_back(parse_double(std::string_view(line).substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw InputError("operator CSV: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("operator CSV: no rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    return DenseOperator(std::move(m));
}

std::string lp_to_json(const lp::LpProblem& p) {
    p.validate();
    json lower = json::array();
    for (Eigen::Index i = 0; i < p.lower.size(); ++i) {
        if (std::isfinite(p.lower[i]))
            lower.push_back(p.lower[i]);
        else
            lower.push_back(nullptr);
    }
    json j{{"cost", vector_json(p.cost)},
           {"ineq_matrix", matrix_json(p.ineq_matrix)},
           {"ineq_rhs", vector_json(p.ineq_rhs)},
           {"eq_matrix", matrix_json(p.eq_matrix)},
           {"eq_rhs", vector_json(p.eq_rhs)},
           {"lower", lower}};
    return j.dump(2);
}

lp::LpProblem lp_from_json(const std::string& text) {
    const json j = parse_json(text);
    try {
        lp::LpProblem p;
        p.cost = vector_from(j.at("cost"), "cost");
        p.ineq_matrix = matrix_from(j.at("ineq_matrix"), "ineq_matrix");
        p.ineq_rhs = vector_from(j.at("ineq_rhs"), "ineq_rhs");
        p.eq_matrix = matrix_from(j.at("eq_matrix"), "eq_matrix");
        p.eq_rhs = vector_from(j.at("eq_rhs"), "eq_rhs");
        const json& lower = j.at("lower");
        if (!lower.is_array()) throw InputError("lower: expected an array");
        p.lower.resize(static_cast<Eigen::Index>(lower.size()));
        for (std::size_t i = 0; i < lower.size(); ++i)
            p.lower[static_cast<Eigen::Index>(i)] = lower[i].is_null() ? lp::unbounded_below : lower[i].get<double>();
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw InputError(std::string("LP JSON: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << contents;
}

}  // namespace ivreg::io
