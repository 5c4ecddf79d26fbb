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

#include "mixbn/trace_io.hpp"

#include <bit>
#include <sstream>

#include <json.hpp>

#include "mixbn/error.hpp"

namespace mixbn {

using nlohmann::json;

std::vector<double> flatten_params(const Dag& dag, const ComponentParams& params) {
    validate_params(dag, params);
    std::vector<double> flat;
    for (const auto& node : params.nodes) {
        flat.push_back(node.intercept);
        flat.push_back(node.variance);
        for (Eigen::Index j = 0; j < node.coefficients.size(); ++j) {
            flat.push_back(node.coefficients(j));
        }
    }
    return flat;
}

ComponentParams unflatten_params(const Dag& dag, const std::vector<double>& flat) {
    ComponentParams params;
    std::size_t pos = 0;
    for (int i = 0; i < dag.size(); ++i) {
        const int pa = std::popcount(dag.parent_mask(i));
        if (pos + 2 + static_cast<std::size_t>(pa) > flat.size()) {
            throw ParseError("parameter array too short for graph " + dag.to_bitstring());
        }
        NodeParams node;
        node.intercept = flat[pos++];
        node.variance = flat[pos++];
        node.coefficients.resize(pa);
        for (int j = 0; j < pa; ++j) node.coefficients(j) = flat[pos++];
        params.nodes.push_back(std::move(node));
    }
    if (pos != flat.size()) {
        throw ParseError("parameter array too long for graph " + dag.to_bitstring());
    }
    return params;
}

std::string format_trace(const ChainTrace& trace) {
    std::ostringstream out;
    json header = {{"schema", "mixbn.trace"},
                   {"version", kTraceSchemaVersion},
                   {"K", trace.k},
                   {"M", trace.nodes},
                   {"P", trace.covariates},
                   {"N", trace.observations},
                   {"seed", trace.seed},
                   {"iterations", trace.iterations},
                   {"burn_in", trace.burn_in},
                   {"thin", trace.thin}};
    out << header.dump() << '\n';
    for (const auto& r : trace.records) {
        json rec;
        rec["type"] = "record";
        rec["iteration"] = r.iteration;
        std::vector<int> z1(r.z.size());
        for (std::size_t n = 0; n < r.z.size(); ++n) z1[n] = r.z[n] + 1;
        rec["z"] = z1;
        const auto& b = r.beta.matrix();
        std::vector<double> beta;
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
            for (Eigen::Index j = 0; j < b.cols(); ++j) beta.push_back(b(i, j));
        }
        rec["beta"] = beta;
        json graphs = json::array();
        json params = json::array();
        for (std::size_t k = 0; k < r.graphs.size(); ++k) {
            graphs.push_back(r.graphs[k].to_bitstring());
            params.push_back(flatten_params(r.graphs[k], r.params[k]));
        }
        rec["graphs"] = graphs;
        rec["params"] = params;
        rec["joint_log_score"] = r.joint_log_score;
        out << rec.dump() << '\n';
    }
    json footer;
    footer["type"] = "footer";
    footer["score_series"] = trace.score_series;
    json moves = json::array();
    for (const auto& s : trace.move_stats) moves.push_back({s.proposed, s.accepted, s.rejected_cyclic});
    footer["move_stats"] = moves;
    out << footer.dump() << '\n';
    return out.str();
}

ChainTrace parse_trace(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    ChainTrace trace;
    bool have_header = false;
    bool have_footer = false;
    auto fail = [&](const std::string& msg) {
        throw ParseError(origin + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(std::string("malformed JSON: ") + e.what());
        }
        try {
            if (!have_header) {
                if (j.value("schema", "") != "mixbn.trace") fail("not a mixbn trace file");
                const int version = j.at("version").get<int>();
                if (version != kTraceSchemaVersion) {
                    fail("unsupported trace schema version " + std::to_string(version));
                }
                trace.k = j.at("K").get<int>();
                trace.nodes = j.at("M").get<int>();
                trace.covariates = j.at("P").get<int>();
                trace.observations = j.at("N").get<int>();
                trace.seed = j.at("seed").get<std::uint64_t>();
                trace.iterations = j.at("iterations").get<int>();
                trace.burn_in = j.at("burn_in").get<int>();
                trace.thin = j.at("thin").get<int>();
                have_header = true;
                continue;
            }
            const std::string type = j.at("type").get<std::string>();
            if (type == "footer") {
                trace.score_series = j.at("score_series").get<std::vector<double>>();
                for (const auto& s : j.at("move_stats")) {
                    trace.move_stats.push_back(
                        MoveStats{s.at(0).get<std::int64_t>(), s.at(1).get<std::int64_t>(),
                                  s.at(2).get<std::int64_t>()});
                }
                have_footer = true;
                continue;
            }
            if (type != "record") fail("unknown record type '" + type + "'");
            TraceRecord r;
            r.iteration = j.at("iteration").get<int>();
            r.z = j.at("z").get<std::vector<int>>();
            if (static_cast<int>(r.z.size()) != trace.observations) fail("z length mismatch");
            for (int& z : r.z) {
                if (z < 1 || z > trace.k) fail("label out of range");
                --z;
            }
            const auto beta = j.at("beta").get<std::vector<double>>();
            const int cols = trace.covariates + 1;
            if (static_cast<int>(beta.size()) != (trace.k - 1) * cols) fail("beta size mismatch");
            Eigen::MatrixXd b(trace.k - 1, cols);
            for (int i = 0; i < trace.k - 1; ++i) {
                for (int c = 0; c < cols; ++c) b(i, c) = beta[static_cast<std::size_t>(i) * cols + c];
            }
            r.beta = GatingCoefficients(trace.k, std::move(b));
            const auto& graphs = j.at("graphs");
            const auto& params = j.at("params");
            if (static_cast<int>(graphs.size()) != trace.k ||
                static_cast<int>(params.size()) != trace.k) {
                fail("expected " + std::to_string(trace.k) + " graphs and parameter arrays");
            }
            for (int k = 0; k < trace.k; ++k) {
                Dag g = Dag::from_bitstring(graphs.at(k).get<std::string>());
                if (g.size() != trace.nodes) fail("graph node count mismatch");
                r.params.push_back(unflatten_params(g, params.at(k).get<std::vector<double>>()));
                r.graphs.push_back(std::move(g));
            }
            r.joint_log_score = j.at("joint_log_score").get<double>();
            if (!trace.records.empty() && r.iteration <= trace.records.back().iteration) {
                fail("iteration stamps must increase");
            }
            trace.records.push_back(std::move(r));
        } catch (const json::exception& e) {
            fail(std::string("bad field: ") + e.what());
        } catch (const Error& e) {
            if (e.category() == ErrorCategory::kParse && std::string(e.what()).rfind(origin, 0) == 0) {
                throw;
            }
            fail(e.what());
        }
    }
    if (!have_header) throw ParseError(origin + ": empty trace file");
    if (!have_footer) throw ParseError(origin + ": trace file is truncated (no footer)");
    return trace;
}

void write_trace(const std::string& path, const ChainTrace& trace) {
    write_file_atomic(path, format_trace(trace));
}

ChainTrace read_trace(const std::string& path) { return parse_trace(read_file(path), path); }

}  // namespace mixbn
