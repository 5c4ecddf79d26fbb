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

#include <doctest.h>

#include <filesystem>

#include "mixbn/mixbn.hpp"

using namespace mixbn;

namespace {

ChainTrace small_trace(int iterations = 40) {
    SynthCondition c;
    c.components = 2;
    c.per_component = 25;
    c.nodes = 4;
    c.covariates = 2;
    c.seed = 3;
    Rng rng(3);
    const GroundTruth truth = generate_model(c, rng);
    const Dataset data = generate_dataset(truth, c, rng);
    FitConfig f;
    f.k = 3;
    f.iterations = iterations;
    f.thin = 2;
    f.seed = 12;
    return run_chain(data, f);
}

}  // namespace

TEST_CASE("parameter arrays flatten and unflatten") {
    Dag g(3);
    g.add_edge(0, 2);
    g.add_edge(1, 2);
    ComponentParams p;
    p.nodes.resize(3);
    p.nodes[0] = {0.1, Eigen::VectorXd(0), 1.1};
    p.nodes[1] = {0.2, Eigen::VectorXd(0), 1.2};
    p.nodes[2] = {0.3, Eigen::Vector2d(-1.5, 1.25), 0.9};
    const auto flat = flatten_params(g, p);
    CHECK(flat == std::vector<double>{0.1, 1.1, 0.2, 1.2, 0.3, 0.9, -1.5, 1.25});
    const ComponentParams back = unflatten_params(g, flat);
    CHECK(back.nodes[2].coefficients == p.nodes[2].coefficients);
    CHECK(back.nodes[1].variance == 1.2);
    auto shorter = flat;
    shorter.pop_back();
    CHECK_THROWS_AS(unflatten_params(g, shorter), ParseError);
    auto longer = flat;
    longer.push_back(0.0);
    CHECK_THROWS_AS(unflatten_params(g, longer), ParseError);
}

TEST_CASE("trace text round-trips bit-exactly") {
    const ChainTrace t = small_trace();
    REQUIRE(!t.records.empty());
    const std::string text = format_trace(t);
    const ChainTrace back = parse_trace(text);
    CHECK(back == t);
    CHECK(format_trace(back) == text);

    const auto path = (std::filesystem::temp_directory_path() / "mixbn_trace_roundtrip.jsonl").string();
    write_trace(path, t);
    CHECK(read_trace(path) == t);
    std::filesystem::remove(path);
}

TEST_CASE("an empty trace is valid") {
    ChainTrace t = small_trace(0 + 10);
    t.records.clear();
    CHECK(parse_trace(format_trace(t)) == t);
}

TEST_CASE("trace readers reject bad input") {
    const std::string text = format_trace(small_trace());
    // Unknown schema version.
    std::string v2 = text;
    v2.replace(v2.find("\"version\":1"), 11, "\"version\":2");
    CHECK_THROWS_AS(parse_trace(v2), ParseError);
    // Truncated: drop the footer line.
    const auto last = text.rfind('\n', text.size() - 2);
    CHECK_THROWS_AS(parse_trace(text.substr(0, last + 1)), ParseError);
    CHECK_THROWS_AS(parse_trace(""), ParseError);
    CHECK_THROWS_AS(parse_trace("{\"schema\":\"other\"}\n"), ParseError);
    // Malformed line reports its line number.
    std::string broken = text;
    broken.insert(text.find('\n') + 1, "{not json}\n");
    try {
        parse_trace(broken, "t.jsonl");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).rfind("t.jsonl:2:", 0) == 0);
    }
    CHECK_THROWS_AS(read_trace("/nonexistent/trace.jsonl"), IoError);
}
