/*
Copyright 2026 The mixbn Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "mixbn/dataset.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "mixbn/error.hpp"

namespace mixbn {

namespace {

const std::string kSchemaPrefix = "#schema=mixbn.dataset/";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
        throw ParseError(where + ": cannot parse '" + s + "' as a number");
    }
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

Dataset Dataset::subset(std::span<const int> rows) const {
    Dataset out;
    out.y_names = y_names;
    out.x_names = x_names;
    out.y.resize(static_cast<Eigen::Index>(rows.size()), y.cols());
    out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
    std::vector<int> z;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.y.row(static_cast<Eigen::Index>(i)) = y.row(rows[i]);
        out.x.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
        if (z_true) z.push_back((*z_true)[rows[i]]);
    }
    if (z_true) out.z_true = std::move(z);
    return out;
}

void Dataset::validate() const {
    if (y.cols() < 1) throw ParameterError("dataset: no modifiable (y) columns");
    if (x.rows() != y.rows()) throw ParameterError("dataset: y and x row counts differ");
    if (z_true && static_cast<Eigen::Index>(z_true->size()) != y.rows()) {
        throw ParameterError("dataset: label column length differs from row count");
    }
    if (!y.allFinite() || !x.allFinite()) throw ParameterError("dataset: non-finite value");
}

Dataset parse_dataset(const std::string& text, const ColumnRoles& roles, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind(kSchemaPrefix, 0) == 0) {
            const std::string version = line.substr(kSchemaPrefix.size());
            if (version != std::to_string(kDatasetSchemaVersion)) {
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": unsupported dataset schema version '" + version + "'");
            }
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) throw ParseError(origin + ": missing header row");

    auto find_col = [&](const std::string& name) -> int {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) return static_cast<int>(c);
        }
        return -1;
    };
    auto resolve = [&](const std::vector<std::string>& names, const std::regex& fallback) {
        std::vector<int> cols;
        if (names.empty()) {
            for (std::size_t c = 0; c < header.size(); ++c) {
                if (std::regex_match(header[c], fallback)) cols.push_back(static_cast<int>(c));
            }
        } else {
            for (const auto& n : names) {
                const int c = find_col(n);
                if (c < 0) throw ParseError(origin + ": declared column '" + n + "' not in header");
                cols.push_back(c);
            }
        }
        return cols;
    };
    const auto y_cols = resolve(roles.y_columns, std::regex("y[0-9]+"));
    const auto x_cols = resolve(roles.x_columns, std::regex("x[0-9]+"));
    const int z_col = roles.label_column.empty() ? -1 : find_col(roles.label_column);
    if (y_cols.empty()) throw ParseError(origin + ": no modifiable (y) columns declared or found");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(y_cols.size() + x_cols.size());
        for (int c : y_cols) {
            row.push_back(parse_number(fields[c], origin + ":" + std::to_string(line_no) +
                                                      ": column " + std::to_string(c + 1)));
        }
        for (int c : x_cols) {
            row.push_back(parse_number(fields[c], origin + ":" + std::to_string(line_no) +
                                                      ": column " + std::to_string(c + 1)));
        }
        if (z_col >= 0) {
            const double z = parse_number(fields[z_col], origin + ":" + std::to_string(line_no) +
                                                             ": column " + std::to_string(z_col + 1));
            if (z < 1 || z != std::floor(z)) {
                throw ParseError(origin + ":" + std::to_string(line_no) + ": label column " +
                                 std::to_string(z_col + 1) + " must be a positive integer");
            }
            labels.push_back(static_cast<int>(z));
        }
        rows.push_back(std::move(row));
    }

    Dataset data;
    const auto n = static_cast<Eigen::Index>(rows.size());
    data.y.resize(n, static_cast<Eigen::Index>(y_cols.size()));
    data.x.resize(n, static_cast<Eigen::Index>(x_cols.size()));
    for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < y_cols.size(); ++c) data.y(r, c) = rows[r][c];
        for (std::size_t c = 0; c < x_cols.size(); ++c) data.x(r, c) = rows[r][y_cols.size() + c];
    }
    for (int c : y_cols) data.y_names.push_back(header[c]);
    for (int c : x_cols) data.x_names.push_back(header[c]);
    if (z_col >= 0) data.z_true = std::move(labels);
    data.validate();
    return data;
}

Dataset read_dataset(const std::string& path, const ColumnRoles& roles) {
    return parse_dataset(read_file(path), roles, path);
}

std::string format_dataset(const Dataset& data) {
    std::ostringstream out;
    out << kSchemaPrefix << kDatasetSchemaVersion << '\n';
    auto name = [](const std::vector<std::string>& names, const char* prefix, Eigen::Index i) {
        return i < static_cast<Eigen::Index>(names.size()) ? names[i]
                                                           : prefix + std::to_string(i + 1);
    };
    bool first = true;
    auto sep = [&]() -> std::ostream& {
        if (!first) out << ',';
        first = false;
        return out;
    };
    for (Eigen::Index c = 0; c < data.y.cols(); ++c) sep() << name(data.y_names, "y", c);
    for (Eigen::Index c = 0; c < data.x.cols(); ++c) sep() << name(data.x_names, "x", c);
    if (data.z_true) sep() << "z_true";
    out << '\n';
    for (Eigen::Index r = 0; r < data.y.rows(); ++r) {
        first = true;
        for (Eigen::Index c = 0; c < data.y.cols(); ++c) sep() << format_double(data.y(r, c));
        for (Eigen::Index c = 0; c < data.x.cols(); ++c) sep() << format_double(data.x(r, c));
        if (data.z_true) sep() << (*data.z_true)[r];
        out << '\n';
    }
    return out.str();
}

void write_dataset(const std::string& path, const Dataset& data) {
    write_file_atomic(path, format_dataset(data));
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mixbn
