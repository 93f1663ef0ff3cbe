#include "mdpde/csvio.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mdpde/errors.hpp"

namespace mdpde {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.push_back("");
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_field(const std::string& field, int lineno) {
    std::string t = trim(field);
    if (t.empty()) {
        throw DomainError("csv line " + std::to_string(lineno) + ": missing value");
    }
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw DomainError("csv line " + std::to_string(lineno) + ": not a number: '" + t + "'");
    }
    if (pos != t.size()) {
        throw DomainError("csv line " + std::to_string(lineno) + ": trailing characters: '" +
                          t + "'");
    }
    return v;
}

} // namespace

Dataset load_csv(const std::string& path, const std::string& y_column,
                 const std::vector<std::string>& x_columns) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open csv file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DomainError("csv file is empty: " + path);
    Dataset ds;
    for (auto& name : split(line, ',')) ds.column_names.push_back(trim(name));

    auto col_index = [&](const std::string& name) {
        auto it = std::find(ds.column_names.begin(), ds.column_names.end(), name);
        if (it == ds.column_names.end()) {
            throw DomainError("csv: no column named '" + name + "'");
        }
        return static_cast<int>(it - ds.column_names.begin());
    };

    ds.y_column = y_column;
    int yi = col_index(y_column);
    std::vector<int> xi;
    if (x_columns.empty()) {
        for (std::size_t j = 0; j < ds.column_names.size(); ++j) {
            if (static_cast<int>(j) != yi) {
                xi.push_back(static_cast<int>(j));
                ds.x_columns.push_back(ds.column_names[j]);
            }
        }
    } else {
        for (const auto& name : x_columns) {
            xi.push_back(col_index(name));
            ds.x_columns.push_back(name);
        }
    }
    if (xi.empty()) throw DomainError("csv: need at least one covariate column");

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != ds.column_names.size()) {
            throw DomainError("csv line " + std::to_string(lineno) + ": expected " +
                              std::to_string(ds.column_names.size()) + " fields, got " +
                              std::to_string(fields.size()));
        }
        Observation obs;
        obs.y = parse_field(fields[yi], lineno);
        obs.x.resize(static_cast<int>(xi.size()));
        for (std::size_t j = 0; j < xi.size(); ++j) {
            obs.x(static_cast<int>(j)) = parse_field(fields[xi[j]], lineno);
        }
        ds.observations.push_back(std::move(obs));
    }
    if (ds.observations.empty()) throw DomainError("csv: no data rows in " + path);
    return ds;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
    auto rows = split(text, ';');
    if (rows.empty()) throw DomainError("parse_matrix: empty text");
    std::vector<std::vector<double>> vals;
    for (const auto& r : rows) {
        auto fields = split(r, ',');
        std::vector<double> row;
        for (const auto& f : fields) row.push_back(parse_field(f, 0));
        if (!vals.empty() && row.size() != vals.front().size()) {
            throw DomainError("parse_matrix: ragged rows");
        }
        vals.push_back(std::move(row));
    }
    Eigen::MatrixXd m(vals.size(), vals.front().size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        for (std::size_t j = 0; j < vals[i].size(); ++j) {
            m(static_cast<int>(i), static_cast<int>(j)) = vals[i][j];
        }
    }
    return m;
}

Eigen::VectorXd parse_vector(const std::string& text) {
    Eigen::MatrixXd m = parse_matrix(text);
    if (m.rows() == 1) return m.row(0).transpose();
    if (m.cols() == 1) return m.col(0);
    throw DomainError("parse_vector: not a vector: '" + text + "'");
}

std::string format_matrix(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    out.precision(17);
    for (int i = 0; i < m.rows(); ++i) {
        if (i) out << ";";
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ",";
            out << m(i, j);
        }
    }
    return out.str();
}

std::string format_vector(const Eigen::VectorXd& v) {
    std::ostringstream out;
    out.precision(17);
    for (int i = 0; i < v.size(); ++i) {
        if (i) out << ",";
        out << v(i);
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open output file: " + path);
    out << content;
    if (!out) throw DomainError("failed writing: " + path);
}

} // namespace mdpde
