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

#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixbn/mixbn.hpp"

namespace mixbn::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kUsageExit = 2;

struct RolesOptions {
    std::vector<std::string> y_columns;
    std::vector<std::string> x_columns;
    std::string label_column = "z_true";

    ColumnRoles roles() const { return ColumnRoles{y_columns, x_columns, label_column}; }
};

struct FitOptions {
    int k = 2;
    int iterations = 1500;
    std::optional<int> burn_in;
    int thin = 5;
    double gating_scale = 100.0;
    int structure_steps = 50;
    std::string assignment_update = "collapsed";
    std::optional<std::uint64_t> seed;
    int progress_every = 0;

    FitConfig config(std::ostream& err) const {
        FitConfig c;
        c.k = k;
        c.iterations = iterations;
        c.burn_in = burn_in;
        c.thin = thin;
        c.gating_scale = gating_scale;
        c.structure.iterations = structure_steps;
        c.assignment_update = assignment_update == "per-observation"
                                  ? AssignmentUpdate::kPerObservation
                                  : AssignmentUpdate::kCollapsed;
        c.seed = seed.value_or(0);
        if (progress_every > 0) {
            const int every = progress_every;
            const int total = iterations;
            c.progress = [&err, every, total](int t, double score) {
                if (t % every == 0 || t == total) {
                    err << "sweep " << t << "/" << total << " joint_log_score " << score << "\n";
                }
            };
        }
        return c;
    }
};

void add_roles_options(CLI::App* cmd, RolesOptions& o) {
    cmd->add_option("--y-columns", o.y_columns,
                    "Comma-separated modifiable (graph node) columns; default y<digits>")
        ->delimiter(',');
    cmd->add_option("--x-columns", o.x_columns,
                    "Comma-separated non-modifiable (gating) columns; default x<digits>")
        ->delimiter(',');
    cmd->add_option("--label-column", o.label_column, "Optional true-label column")
        ->capture_default_str();
}

void add_fit_options(CLI::App* cmd, FitOptions& o, bool with_k) {
    if (with_k) {
        cmd->add_option("-K,--k", o.k, "Number of mixture components")->capture_default_str();
    }
    cmd->add_option("-T,--iterations", o.iterations, "Gibbs sweeps")->capture_default_str();
    cmd->add_option("--burn-in", o.burn_in, "Discarded sweeps (default T/2)");
    cmd->add_option("--thin", o.thin, "Keep every thin-th sweep after burn-in")
        ->capture_default_str();
    cmd->add_option("-c,--gating-scale", o.gating_scale, "Gating prior variance c")
        ->capture_default_str();
    cmd->add_option("--structure-steps", o.structure_steps,
                    "Edge-move Metropolis-Hastings steps per component per sweep")
        ->capture_default_str();
    cmd->add_option("--assignment-update", o.assignment_update, "z-update rule")
        ->check(CLI::IsMember({"collapsed", "per-observation"}))
        ->capture_default_str();
    cmd->add_option("--progress", o.progress_every, "Report progress every N sweeps on stderr");
}

/// Input files must exist before any work starts.
void require_input(const std::string& path, const std::string& what) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw IoError(what + ": file '" + path + "' does not exist or is not a regular file");
    }
}

/// Outputs need an existing parent directory and must not name a directory.
void require_output(const std::string& path, const std::string& what) {
    std::error_code ec;
    const fs::path p(path);
    if (fs::is_directory(p, ec)) throw IoError(what + ": '" + path + "' is a directory");
    const fs::path parent = p.parent_path().empty() ? fs::path(".") : p.parent_path();
    if (!fs::is_directory(parent, ec)) {
        throw IoError(what + ": directory '" + parent.string() + "' does not exist");
    }
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_file_atomic(path, text);
    }
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void check_trace_shape(const ChainTrace& trace, const Dataset& data, const std::string& what) {
    if (data.nodes() != trace.nodes || data.covariates() != trace.covariates) {
        throw ParameterError(what + ": dataset has " + std::to_string(data.nodes()) + " nodes and " +
                             std::to_string(data.covariates()) + " covariates, trace expects " +
                             std::to_string(trace.nodes) + " and " +
                             std::to_string(trace.covariates));
    }
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    int components = 2;
    int per_component = 100;
    std::string sparsity = "low";
    std::string density = "mid";
    std::optional<std::uint64_t> seed;
    int nodes = 5;
    int covariates = 3;
    bool binary = false;
    std::string data_path;
    std::string truth_path;
    std::string manifest_path;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
    SynthCondition cond;
    cond.components = o.components;
    cond.per_component = o.per_component;
    cond.sparsity = parse_sparsity(o.sparsity);
    cond.density = parse_cluster_density(o.density);
    cond.seed = *o.seed;
    cond.nodes = o.nodes;
    cond.covariates = o.covariates;
    cond.binary_covariates = o.binary;
    cond.validate();
    require_output(o.data_path, "dataset output");
    require_output(o.truth_path, "ground-truth output");
    if (!o.manifest_path.empty()) require_output(o.manifest_path, "manifest output");

    Rng rng(cond.seed);
    const GroundTruth truth = generate_model(cond, rng);
    const Dataset data = generate_dataset(truth, cond, rng);
    write_dataset(o.data_path, data);
    write_ground_truth(o.truth_path, truth, cond);

    json manifest = {
        {"schema", "mixbn.manifest"},
        {"version", 1},
        {"command", "generate"},
        {"seed", cond.seed},
        {"components", cond.components},
        {"per_component", cond.per_component},
        {"sparsity", to_string(cond.sparsity)},
        {"cluster_density", to_string(cond.density)},
        {"nodes", cond.nodes},
        {"covariates", cond.covariates},
        {"binary_covariates", cond.binary_covariates},
        {"rows", data.rows()},
        {"data", o.data_path},
        {"truth", o.truth_path},
    };
    const std::string text = manifest.dump(2) + "\n";
    out << text;
    if (!o.manifest_path.empty()) write_file_atomic(o.manifest_path, text);
    return 0;
}

// --------------------------------------------------------------------- fit

struct FitCommandOptions {
    std::string data_path;
    std::string trace_path;
    std::string summary_path;
    RolesOptions roles;
    FitOptions fit;
};

int cmd_fit(const FitCommandOptions& o, std::ostream& out, std::ostream& err) {
    const FitConfig config = o.fit.config(err);
    config.validate();
    require_input(o.data_path, "dataset");
    require_output(o.trace_path, "trace output");
    if (!o.summary_path.empty()) require_output(o.summary_path, "summary output");
    const Dataset data = read_dataset(o.data_path, o.roles.roles());
    if (data.rows() < 1) throw ParameterError("dataset '" + o.data_path + "' has no rows");

    const auto start = std::chrono::steady_clock::now();
    const ChainTrace trace = run_chain(data, config);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_trace(o.trace_path, trace);
    emit(format_summary(trace), o.summary_path, out);
    err << "fit: K=" << config.k << " T=" << config.iterations << " records="
        << trace.records.size() << " wall_seconds=" << seconds << "\n";
    return 0;
}

// ------------------------------------------------------------------ select

struct SelectOptions {
    std::string data_path;
    std::string test_path;
    std::string output_path;
    std::string k_values = "1..5";
    double test_fraction = 0.1;
    int threads = 0;
    RolesOptions roles;
    FitOptions fit;
};

std::string format_selection(const SelectionTable& table) {
    std::ostringstream s;
    s << "K\tLMPPD\tWAIC\twall_seconds\tse_diff\n";
    for (const auto& row : table.rows) {
        s << row.k << '\t' << format_double(row.lmppd) << '\t' << format_double(row.waic_elpd)
          << '\t' << format_double(row.wall_seconds) << '\t' << format_double(row.se_diff)
          << '\n';
    }
    return s.str();
}

int cmd_select(const SelectOptions& o, std::ostream& out, std::ostream& err) {
    SelectionConfig sel;
    sel.k_values = parse_k_values(o.k_values);
    sel.test_fraction = o.test_fraction;
    sel.seed = o.fit.seed.value_or(0);
    sel.threads = o.threads;
    if (sel.threads < 0) throw ParameterError("threads: must be >= 0");
    if (o.test_path.empty() && !(sel.test_fraction > 0.0 && sel.test_fraction < 1.0)) {
        throw ParameterError("test-fraction: must lie in (0, 1)");
    }
    FitConfig fit = o.fit.config(err);
    for (int k : sel.k_values) {
        fit.k = k;
        fit.validate();
    }
    require_input(o.data_path, "dataset");
    if (!o.test_path.empty()) require_input(o.test_path, "test dataset");
    if (!o.output_path.empty()) require_output(o.output_path, "table output");
    const Dataset data = read_dataset(o.data_path, o.roles.roles());

    SelectionTable table;
    if (o.test_path.empty()) {
        table = select_k(data, sel, fit);
    } else {
        const Dataset test = read_dataset(o.test_path, o.roles.roles());
        if (test.nodes() != data.nodes() || test.covariates() != data.covariates()) {
            throw ParameterError("test dataset '" + o.test_path +
                                 "' does not match the training columns");
        }
        table = select_k(data, test, sel, fit);
    }
    emit(format_selection(table), o.output_path, out);
    err << "select: argmax K=" << table.best_k << ", smallest K within one se_diff="
        << table.parsimonious_k << "\n";
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
    std::string trace_path;
    std::string truth_path;
    std::string test_path;
    std::string data_path;
    std::string output_path;
    RolesOptions roles;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
    require_input(o.trace_path, "trace");
    if (!o.truth_path.empty()) require_input(o.truth_path, "MSHD unavailable: ground truth");
    if (!o.test_path.empty()) require_input(o.test_path, "LMPPD unavailable: test dataset");
    if (!o.data_path.empty()) require_input(o.data_path, "WAIC unavailable: training dataset");
    if (o.truth_path.empty() && o.test_path.empty() && o.data_path.empty()) {
        throw ParameterError(
            "nothing to evaluate: MSHD needs --truth, LMPPD needs --test, WAIC needs --data");
    }
    if (!o.output_path.empty()) require_output(o.output_path, "report output");

    const ChainTrace trace = read_trace(o.trace_path);
    json report = {{"schema", "mixbn.evaluation"},
                   {"version", 1},
                   {"trace", o.trace_path},
                   {"records", trace.records.size()}};
    json unavailable = json::object();

    if (!o.truth_path.empty()) {
        const GroundTruth truth = read_ground_truth(o.truth_path);
        if (!truth.graphs.empty() && truth.graphs.front().size() != trace.nodes) {
            throw ParameterError("MSHD: ground truth has a different node count than the trace");
        }
        const MshdReport m = mshd(trace, truth.graphs);
        json labelling = json::array();
        for (int f : m.labellings[m.best]) labelling.push_back(f < 0 ? json(nullptr) : json(f + 1));
        report["mshd"] = {{"value", m.value},
                          {"labelling", labelling},
                          {"mean_shd", matrix_json(m.mean_shd)}};
    } else {
        unavailable["mshd"] = "no ground-truth file supplied (--truth)";
    }

    if (!o.test_path.empty()) {
        const Dataset test = read_dataset(o.test_path, o.roles.roles());
        check_trace_shape(trace, test, "LMPPD");
        const PredictiveScore p = lmppd(test, trace);
        report["lmppd"] = {{"total", p.total}, {"points", p.per_point.size()}, {"samples", p.samples}};
    } else {
        unavailable["lmppd"] = "no test dataset supplied (--test)";
    }

    if (!o.data_path.empty()) {
        const Dataset train = read_dataset(o.data_path, o.roles.roles());
        check_trace_shape(trace, train, "WAIC");
        const WaicReport w = waic(train, trace);
        report["waic"] = {{"elpd", w.elpd},
                          {"lppd", w.lppd},
                          {"p_waic", w.p_waic},
                          {"deviance", w.deviance()},
                          {"scale", "elpd = lppd - p_waic (higher is better); deviance = -2 elpd"}};
    } else {
        unavailable["waic"] = "no training dataset supplied (--data)";
    }
    if (!unavailable.empty()) report["unavailable"] = unavailable;
    emit(report.dump(2) + "\n", o.output_path, out);
    return 0;
}

// --------------------------------------------------------------- summarize

struct SummarizeOptions {
    std::string trace_path;
    std::string output_path;
};

int cmd_summarize(const SummarizeOptions& o, std::ostream& out) {
    require_input(o.trace_path, "trace");
    if (!o.output_path.empty()) require_output(o.output_path, "summary output");
    emit(format_summary(read_trace(o.trace_path)), o.output_path, out);
    return 0;
}

}  // namespace

std::vector<int> parse_k_values(const std::string& text) {
    std::vector<int> ks;
    std::stringstream ss(text);
    std::string token;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) {
            throw ParameterError("k-values: '" + s + "' is not an integer");
        }
        return v;
    };
    while (std::getline(ss, token, ',')) {
        if (token.empty()) throw ParameterError("k-values: empty entry in '" + text + "'");
        const auto dots = token.find("..");
        if (dots == std::string::npos) {
            ks.push_back(to_int(token));
            continue;
        }
        const int lo = to_int(token.substr(0, dots));
        const int hi = to_int(token.substr(dots + 2));
        if (hi < lo) throw ParameterError("k-values: empty range '" + token + "'");
        for (int k = lo; k <= hi; ++k) ks.push_back(k);
    }
    if (ks.empty()) throw ParameterError("k-values: no values given");
    for (int k : ks) {
        if (k < 1) throw ParameterError("k-values: every K must be >= 1");
    }
    return ks;
}

std::string format_summary(const ChainTrace& trace) {
    json acceptance = json::array();
    for (std::size_t k = 0; k < trace.move_stats.size(); ++k) {
        const MoveStats& s = trace.move_stats[k];
        acceptance.push_back({{"component", k + 1},
                              {"proposed", s.proposed},
                              {"accepted", s.accepted},
                              {"rejected_cyclic", s.rejected_cyclic},
                              {"rate", s.acceptance_rate()}});
    }
    json freqs = json::array();
    json modal = json::array();
    json sizes = json::array();
    for (int k = 0; k < trace.k; ++k) {
        freqs.push_back(matrix_json(edge_frequencies(trace, k)));
        if (!trace.records.empty()) modal.push_back(modal_graph(trace, k).to_bitstring());
        double mean_size = 0.0;
        for (const auto& r : trace.records) {
            for (int z : r.z) mean_size += z == k ? 1.0 : 0.0;
        }
        if (!trace.records.empty()) mean_size /= static_cast<double>(trace.records.size());
        sizes.push_back(mean_size);
    }
    json doc = {
        {"schema", "mixbn.summary"},
        {"version", 1},
        {"k", trace.k},
        {"nodes", trace.nodes},
        {"covariates", trace.covariates},
        {"observations", trace.observations},
        {"seed", trace.seed},
        {"iterations", trace.iterations},
        {"burn_in", trace.burn_in},
        {"thin", trace.thin},
        {"records", trace.records.size()},
        {"acceptance", acceptance},
        {"mean_component_sizes", sizes},
        {"edge_frequencies", freqs},
        {"modal_graphs", modal},
        {"score_series", trace.score_series},
    };
    return doc.dump(2) + "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian inference for covariate-gated mixtures of Gaussian Bayesian networks",
                 "mixbn"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file (TOML/INI); command-line flags win");
    app.set_version_flag("--version", "mixbn 0.1.0");

    GenerateOptions gen;
    CLI::App* generate = app.add_subcommand("generate", "Simulate a dataset and its ground truth");
    generate->add_option("--components", gen.components, "True mixture components")
        ->capture_default_str();
    generate->add_option("-N,--per-component", gen.per_component, "Rows per component")
        ->capture_default_str();
    generate->add_option("--sparsity", gen.sparsity, "Edge sparsity: low|high|mixed")
        ->transform(CLI::IsMember({"low", "high", "mixed"}, CLI::ignore_case))
        ->capture_default_str();
    generate->add_option("--cluster-density", gen.density,
                         "Covariate cluster separation: sparse|mid|dense")
        ->transform(CLI::IsMember({"sparse", "mid", "dense"}, CLI::ignore_case))
        ->capture_default_str();
    generate->add_option("--seed", gen.seed, "Random seed")->required();
    generate->add_option("--nodes", gen.nodes, "Modifiable variables per row")
        ->capture_default_str();
    generate->add_option("--covariates", gen.covariates, "Non-modifiable covariates per row")
        ->capture_default_str();
    generate->add_flag("--binary-covariates", gen.binary, "0/1 covariates");
    generate->add_option("--data", gen.data_path, "Dataset output path")->required();
    generate->add_option("--truth", gen.truth_path, "Ground-truth output path")->required();
    generate->add_option("--manifest", gen.manifest_path, "Also write the manifest here");

    FitCommandOptions fit;
    CLI::App* fitcmd = app.add_subcommand("fit", "Run the Gibbs sampler on a dataset");
    fitcmd->add_option("--data", fit.data_path, "Dataset path")->required();
    fitcmd->add_option("--trace", fit.trace_path, "Trace output path")->required();
    fitcmd->add_option("--summary", fit.summary_path, "Summary output path (default stdout)");
    fitcmd->add_option("--seed", fit.fit.seed, "Random seed")->required();
    add_fit_options(fitcmd, fit.fit, true);
    add_roles_options(fitcmd, fit.roles);

    SelectOptions sel;
    CLI::App* selcmd = app.add_subcommand("select", "Choose K by held-out LMPPD");
    selcmd->add_option("--data", sel.data_path, "Dataset path")->required();
    selcmd->add_option("--test", sel.test_path, "Held-out dataset (default: random split)");
    selcmd->add_option("--output", sel.output_path, "TSV output path (default stdout)");
    selcmd->add_option("--k-values", sel.k_values, "Candidate K, e.g. 1..5 or 1,2,4")
        ->capture_default_str();
    selcmd->add_option("--test-fraction", sel.test_fraction, "Held-out share of rows")
        ->capture_default_str();
    selcmd->add_option("--threads", sel.threads, "Concurrent fits (0 = hardware)")
        ->capture_default_str();
    selcmd->add_option("--seed", sel.fit.seed, "Random seed")->required();
    add_fit_options(selcmd, sel.fit, false);
    add_roles_options(selcmd, sel.roles);

    EvaluateOptions ev;
    CLI::App* evcmd = app.add_subcommand("evaluate", "Report MSHD, LMPPD and WAIC for a trace");
    evcmd->add_option("--trace", ev.trace_path, "Trace path")->required();
    evcmd->add_option("--truth", ev.truth_path, "Ground truth (enables MSHD)");
    evcmd->add_option("--test", ev.test_path, "Held-out dataset (enables LMPPD)");
    evcmd->add_option("--data", ev.data_path, "Training dataset (enables WAIC)");
    evcmd->add_option("--output", ev.output_path, "Report path (default stdout)");
    add_roles_options(evcmd, ev.roles);

    SummarizeOptions sum;
    CLI::App* sumcmd = app.add_subcommand("summarize", "Summarize a trace file");
    sumcmd->add_option("--trace", sum.trace_path, "Trace path")->required();
    sumcmd->add_option("--output", sum.output_path, "Summary path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << "mixbn 0.1.0\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        err << "run 'mixbn --help' for usage\n";
        return kUsageExit;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen, out);
        if (fitcmd->parsed()) return cmd_fit(fit, out, err);
        if (selcmd->parsed()) return cmd_select(sel, out, err);
        if (evcmd->parsed()) return cmd_evaluate(ev, out);
        if (sumcmd->parsed()) return cmd_summarize(sum, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return kUsageExit;
}

}  // namespace mixbn::cli
