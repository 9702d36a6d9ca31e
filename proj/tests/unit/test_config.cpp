#include <catch_amalgamated.hpp>

#include "speclab/runner.hpp"

using namespace speclab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("speclab_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunResult run_text(const std::string& name, Command cmd, const std::string& text,
                   std::optional<std::uint64_t> seed = std::nullopt) {
    const auto dir = scratch(name);
    write_text_file(dir / "config.json", text);
    return run({cmd, dir / "config.json", dir / "out", seed});
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

const char* class_a_text = R"({
  "spectrum": {"kind": "class-a", "alpha": 0.0,
               "beta": {"default": 0.0, "table": {"0": 0.2, "1": 0.5}}},
  "window": {"dim": 2, "radius": 2}
})";

}  // namespace

TEST_CASE("a minimal config takes the documented defaults") {
    const auto c = parse_config("{}");
    CHECK_FALSE(c.command);
    CHECK_FALSE(c.seed);
    CHECK(c.tolerances.eq_tol == 1e-10);
    CHECK(c.tolerances.num_tol == 1e-8);
    CHECK(c.tolerances.grid_n == 256);
    CHECK(c.tolerances.quad_n == 2048);
    CHECK(c.pair.probes == 4);
    CHECK(c.tiling.resolution == 64);
    CHECK_FALSE(c.spectrum);
}

TEST_CASE("a beta table with a default becomes a shifted-column spectrum") {
    const auto c = parse_config(class_a_text);
    REQUIRE(c.spectrum);
    const auto* a = std::get_if<ClassA2D>(&c.spectrum->variant());
    REQUIRE(a);
    CHECK(a->beta(0) == 0.2);
    CHECK(a->beta(1) == 0.5);
    CHECK(a->beta(7) == 0.0);
    REQUIRE(c.window);
    CHECK(c.window->cardinality() == 25);
}

TEST_CASE("integer-tuple keys are comma-joined") {
    const auto c = parse_config(R"({"spectrum": {"kind": "tower3d",
        "beta": {"table": {"-1": 0.5}},
        "gamma": {"default": 0.25, "table": {"0,-2": 0.75}}}})");
    const auto& t = std::get<Tower3D>(c.spectrum->variant());
    CHECK(t.beta(-1) == 0.5);
    CHECK(t.gamma(IntTuple{0, -2}) == 0.75);
    CHECK(t.gamma(IntTuple{0, 0}) == 0.25);
    CHECK(kind_of([] { parse_config(R"({"spectrum": {"kind": "tower3d", "beta": {}, "gamma": {"table": {"1": 0.5}}}})"); }) ==
          ErrorKind::Schema);
    CHECK(kind_of([] { parse_config(R"({"spectrum": {"kind": "class-a", "beta": {"table": {"x": 0.5}}}})"); }) ==
          ErrorKind::Schema);
    CHECK(kind_of([] { parse_config(R"({"spectrum": {"kind": "class-a", "beta": {"table": {"1": 0.5, " 1": 0.25}}}})"); }) ==
          ErrorKind::Schema);
}

TEST_CASE("duplicate keys are rejected by name") {
    const auto msg = message_of([] { parse_config(R"({"spectrum": {"kind": "class-a", "kind": "class-b"}})"); });
    CHECK(msg.find("duplicate key 'kind'") != std::string::npos);
    CHECK(msg.find("spectrum") != std::string::npos);
    CHECK(kind_of([] { parse_config(R"({"seed": 1, "seed": 2})"); }) == ErrorKind::Schema);
}

TEST_CASE("syntax errors carry line and column") {
    const auto msg = message_of([] { parse_config("{\n  \"seed\": 1,\n  \"window\": {\"dim\" 2}\n}"); });
    CHECK(msg.find("line 3, column") != std::string::npos);
    CHECK(kind_of([] { parse_config("{"); }) == ErrorKind::Parse);
}

TEST_CASE("unknown keys and bad types are schema errors") {
    CHECK(message_of([] { parse_config(R"({"windw": {}})"); }).find("unknown key 'windw'") != std::string::npos);
    CHECK(message_of([] { parse_config(R"({"tolerances": {"eq_tol": 1e-9, "eps": 1}})"); })
              .find("'tolerances.eps'") != std::string::npos);
    CHECK(kind_of([] { parse_config(R"({"tolerances": {"grid_n": "big"}})"); }) == ErrorKind::Schema);
    CHECK(kind_of([] { parse_config(R"({"command": "frobnicate"})"); }) == ErrorKind::Schema);
    CHECK(kind_of([] { parse_config(R"({"spectrum": {"kind": "class-a", "beta": {"default": 1.5}}})"); }) ==
          ErrorKind::InvalidArgument);
}

TEST_CASE("environment overrides replace tolerance fields") {
    ToleranceConfig t;
    setenv("SPECLAB_EQ_TOL", "1e-7", 1);
    setenv("SPECLAB_GRID_N", "64", 1);
    apply_env_overrides(t);
    unsetenv("SPECLAB_EQ_TOL");
    unsetenv("SPECLAB_GRID_N");
    CHECK(t.eq_tol == 1e-7);
    CHECK(t.grid_n == 64);
    CHECK(t.num_tol == 1e-8);
    setenv("SPECLAB_NUM_TOL", "tiny", 1);
    CHECK(kind_of([&] { apply_env_overrides(t); }) == ErrorKind::Schema);
    unsetenv("SPECLAB_NUM_TOL");
}

TEST_CASE("root scan of the three-term polynomial finds no unimodular root") {
    const auto r = run_text("root", Command::RootScan, R"({"root_scan": {"coefficients": "1,0,1,1", "samples": 4096}})");
    CHECK(r.exit_code == 0);
    const auto txt = r.report.render();
    CHECK(txt.find("PASS no-unimodular-root") != std::string::npos);
    CHECK(txt.find("min_modulus = 6.07346") != std::string::npos);
}

TEST_CASE("a failing sequence file exits 1 with a witness") {
    const auto r = run_text("cocycle_fail", Command::CheckCocycle, R"({
      "sequences": {"a": {"table": {"0": 0.25}}, "b": {"table": {"1": 0.5}}},
      "window": {"dim": 2, "radius": 2}})");
    CHECK(r.exit_code == 1);
    const auto txt = r.report.render();
    CHECK(txt.find("FAIL cocycle") != std::string::npos);
    CHECK(txt.find("[witnesses]\nidentity ") != std::string::npos);
    CHECK(txt.find("at index (") != std::string::npos);
}

TEST_CASE("verify-pair on a shifted-column family passes every verdict") {
    const auto r = run_text("pair", Command::VerifyPair, class_a_text);
    CHECK(r.exit_code == 0);
    const auto txt = r.report.render();
    for (const char* v : {"PASS orthogonality", "PASS difference-set", "PASS completeness", "PASS tiling"})
        CHECK(txt.find(v) != std::string::npos);
    CHECK(txt.find("op=exponential-analysis/orthogonality_verdict") != std::string::npos);
    CHECK(std::find(r.artifacts.begin(), r.artifacts.end(), "tiling.svg") != r.artifacts.end());
    CHECK(std::find(r.artifacts.begin(), r.artifacts.end(), "gram.txt") != r.artifacts.end());
}

TEST_CASE("every verdict line cites an operation and a relation") {
    const auto r = run_text("cite", Command::VerifyPair, class_a_text);
    std::istringstream in(r.report.render());
    std::string line;
    int verdicts = 0;
    while (std::getline(in, line)) {
        if (line.rfind("PASS ", 0) != 0 && line.rfind("FAIL ", 0) != 0) continue;
        ++verdicts;
        CHECK(line.find(" | op=") != std::string::npos);
        CHECK(line.find(" | relation=") != std::string::npos);
    }
    CHECK(verdicts == 4);
}

TEST_CASE("same config and seed give identical artifacts") {
    const std::string text = R"({"sequences": {"a": {"table": {"0": 0.25}}, "b": {"table": {"1": 0.5}}},
                                 "window": {"dim": 2, "radius": 3},
                                 "groups": {"random_probes": 3, "basis_radius": 1}})";
    const auto a = run_text("det_a", Command::SimulateGroups, text, 5);
    const auto b = run_text("det_b", Command::SimulateGroups, text, 5);
    for (const char* f : {"report.txt", "commutator_sweep.csv"}) {
        const auto fa = read_text_file(fs::temp_directory_path() / "speclab_unit_det_a" / "out" / f);
        const auto fb = read_text_file(fs::temp_directory_path() / "speclab_unit_det_b" / "out" / f);
        CHECK(fa == fb);
    }
}

TEST_CASE("run-level errors") {
    CHECK(kind_of([] { run_text("mismatch", Command::RootScan, R"({"command": "diffraction"})"); }) == ErrorKind::Schema);
    CHECK(kind_of([] { run_text("missing", Command::CheckTiling, "{}"); }) == ErrorKind::Schema);
    CHECK(kind_of([] { run({Command::RootScan, "/nonexistent/config.json", "/tmp/x", std::nullopt}); }) == ErrorKind::Io);
    CHECK(kind_of([] {
        run_text("cap", Command::BuildSpectrum,
                 R"({"spectrum": {"kind": "lattice", "alpha": [0, 0]}, "window": {"dim": 2, "radius": 50, "cap": 100}})");
    }) == ErrorKind::CapExceeded);
}
