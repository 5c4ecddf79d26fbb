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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mixbn {

/// Observations: modifiable variables y (N x M, the graph nodes) and
/// non-modifiable covariates x (N x P, the gating inputs).
struct Dataset {
    Eigen::MatrixXd y;
    Eigen::MatrixXd x;
    std::vector<std::string> y_names;
    std::vector<std::string> x_names;
    /// One-based true component labels, when known.
    std::optional<std::vector<int>> z_true;

    int rows() const { return static_cast<int>(y.rows()); }
    int nodes() const { return static_cast<int>(y.cols()); }
    int covariates() const { return static_cast<int>(x.cols()); }

    Dataset subset(std::span<const int> rows) const;
    void validate() const;
};

/// Which header columns play which role. Empty lists mean "every column
/// named y<digits>" / "x<digits>"; `label_column` is optional.
struct ColumnRoles {
    std::vector<std::string> y_columns;
    std::vector<std::string> x_columns;
    std::string label_column = "z_true";
};

inline constexpr int kDatasetSchemaVersion = 1;

/// Comma-separated text with a header row. A leading "#schema=mixbn.dataset/<v>"
/// line is written by `write_dataset` and checked when present.
Dataset read_dataset(const std::string& path, const ColumnRoles& roles = {});
Dataset parse_dataset(const std::string& text, const ColumnRoles& roles = {},
                      const std::string& origin = "<memory>");
std::string format_dataset(const Dataset& data);
void write_dataset(const std::string& path, const Dataset& data);

/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace mixbn
