#pragma once

// Batch front end: one command per invocation, one JSON config, artifacts in
// an output directory. Exit status 0 iff every verdict passes, 1 if one
// fails; errors surface as exceptions for the caller to print.

#include <cstdarg>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "speclab/cocycle.hpp"
#include "speclab/config.hpp"
#include "speclab/diffraction.hpp"
#include "speclab/exponential.hpp"
#include "speclab/groups.hpp"
#include "speclab/tiling.hpp"

namespace speclab {

enum class Command { VerifyPair, BuildSpectrum, CheckCocycle, SimulateGroups, CheckTiling, Diffraction, RootScan };

inline constexpr std::pair<Command, const char*> command_names[] = {
    {Command::VerifyPair, "verify-pair"},       {Command::BuildSpectrum, "build-spectrum"},
    {Command::CheckCocycle, "check-cocycle"},   {Command::SimulateGroups, "simulate-groups"},
    {Command::CheckTiling, "check-tiling"},     {Command::Diffraction, "diffraction"},
    {Command::RootScan, "root-scan"},
};

inline const char* to_string(Command c) {
    for (const auto& [k, n] : command_names)
        if (k == c) return n;
    return "unknown";
}

inline Command parse_command(const std::string& s) {
    for (const auto& [k, n] : command_names)
        if (s == n) return k;
    throw Error(ErrorKind::Schema, "unknown command '" + s + "'");
}

/// Commutator norms below this count as commuting in group simulations.
inline constexpr double commutator_threshold = 1e-6;
inline constexpr double diffraction_agreement = 1e-3;
inline constexpr double poisson_agreement = 1e-6;

struct PairOptions {
    int probes = 4;
    int tiling_window = 4;
    int resolution = 32;
};

struct SequenceOptions {
    PhaseFunction a{1};
    PhaseFunction b{1};
    double alpha = 0.0;
    double beta = 0.0;
};

struct CocycleOptions {
    int divisions = 8;
};

struct GroupOptions {
    std::vector<int> steps;  // empty: five evenly spaced steps
    int random_probes = 10;
    int basis_radius = 4;
};

struct TilingOptions {
    int window = 4;
    int resolution = 64;
};

struct DiffractionOptions {
    QuasiPeriodicModel model;
    Gaussian2D phi{0.0, 0.0, 0.25, 1.0};
    int window = 200;
    int k_radius = 12;
    int plot_n = 1;
};

struct RootScanOptions {
    std::vector<cplx> coefficients;
    int samples = 100000;
};

/// Typed contents of one config file. Sections absent from the file stay
/// empty; commands check for what they need.
struct ParsedConfig {
    std::optional<Command> command;
    std::optional<std::uint64_t> seed;
    ToleranceConfig tolerances;
    std::optional<SpectrumSpec> spectrum;
    std::optional<DomainSpec> domain;
    std::optional<LatticeWindow> window;
    PairOptions pair;
    std::optional<SequenceOptions> sequences;
    CocycleOptions cocycle;
    GroupOptions groups;
    TilingOptions tiling;
    std::optional<DiffractionOptions> diffraction;
    std::optional<RootScanOptions> root_scan;
};

struct RunConfig {
    Command command = Command::VerifyPair;
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;  // overrides the config's seed
};

namespace detail {

inline std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

inline std::string point_text(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + fmt("%.9g", p[i]);
    return s + ")";
}

inline std::string tuple_text(const IntTuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

inline SpectrumSpec read_spectrum(config::Section s) {
    const auto kind = s.string("kind");
    std::optional<SpectrumSpec> out;
    if (kind == "lattice") {
        out = SpectrumSpec(TranslatedLattice{s.numbers("alpha")});
    } else if (kind == "class-a") {
        out = SpectrumSpec(ClassA2D{s.number("alpha", 0.0), config::read_int_function(s.section("beta"), 1)});
    } else if (kind == "class-b") {
        out = SpectrumSpec(ClassB2D{s.number("alpha", 0.0), config::read_int_function(s.section("beta"), 1)});
    } else if (kind == "tower3d") {
        out = SpectrumSpec(Tower3D{config::read_int_function(s.section("beta"), 1),
                                   config::read_int_function(s.section("gamma"), 2)});
    } else if (kind == "tower") {
        Tower t;
        std::size_t arity = 0;
        for (auto& lv : s.sections("levels")) t.levels.push_back(config::read_int_function(std::move(lv), arity++));
        out = SpectrumSpec(std::move(t));
    } else if (kind == "explicit") {
        out = SpectrumSpec(Explicit{s.rows("points")});
    } else {
        throw Error(ErrorKind::Schema, "unknown spectrum kind '" + kind + "'");
    }
    s.finish();
    return *out;
}

inline DomainSpec read_domain(config::Section s) {
    const auto kind = s.string("kind");
    std::optional<DomainSpec> out;
    if (kind == "cube") {
        out = DomainSpec::unit_cube(s.small_int("dim", 2));
    } else if (kind == "intervals") {
        std::vector<std::pair<double, double>> iv;
        for (const auto& r : s.rows("intervals")) {
            if (r.size() != 2) throw Error(ErrorKind::Schema, "'domain.intervals' rows are [left, right]");
            iv.emplace_back(r[0], r[1]);
        }
        out = DomainSpec::interval_union(std::move(iv));
    } else {
        throw Error(ErrorKind::Schema, "unknown domain kind '" + kind + "'");
    }
    s.finish();
    return *out;
}

inline LatticeWindow read_window(config::Section s) {
    const auto cap = s.integer("cap", LatticeWindow::default_cap);
    std::optional<LatticeWindow> out;
    if (s.has("ranges")) {
        std::vector<std::pair<int, int>> r;
        for (const auto& row : s.rows("ranges")) {
            if (row.size() != 2 || row[0] != std::floor(row[0]) || row[1] != std::floor(row[1]))
                throw Error(ErrorKind::Schema, "'window.ranges' rows are [low, high] integers");
            r.emplace_back(static_cast<int>(row[0]), static_cast<int>(row[1]));
        }
        out = LatticeWindow(std::move(r), cap);
    } else {
        const int dim = s.small_int("dim", 2), radius = s.small_int("radius", 0);
        if (dim < 1 || radius < 0) throw Error(ErrorKind::Schema, "'window' needs dim >= 1 and radius >= 0");
        out = LatticeWindow(std::vector<std::pair<int, int>>(static_cast<std::size_t>(dim), {-radius, radius}), cap);
    }
    s.finish();
    return *out;
}

/// Phase tables are given in turns: value t stands for e^{i 2 pi t}.
inline PhaseFunction read_phase_table(config::Section s) {
    auto [d, t] = config::read_table(std::move(s), 1);
    return PhaseFunction::from_angles(1, d, t);
}

}  // namespace detail

/// Parse and validate a config; unknown keys anywhere are errors.
inline ParsedConfig parse_config(std::string_view text) {
    const auto doc = config::parse_json(text);
    config::Section root(doc, "");
    ParsedConfig pc;
    if (root.has("command")) pc.command = parse_command(root.string("command"));
    if (root.has("seed")) {
        const auto s = root.integer("seed");
        if (s < 0) throw Error(ErrorKind::Schema, "'seed' must be non-negative");
        pc.seed = static_cast<std::uint64_t>(s);
    }
    if (root.has("tolerances")) {
        auto t = root.section("tolerances");
        pc.tolerances.eq_tol = t.number("eq_tol", pc.tolerances.eq_tol);
        pc.tolerances.num_tol = t.number("num_tol", pc.tolerances.num_tol);
        pc.tolerances.grid_n = t.small_int("grid_n", pc.tolerances.grid_n);
        pc.tolerances.quad_n = t.small_int("quad_n", pc.tolerances.quad_n);
        t.finish();
    }
    if (root.has("spectrum")) pc.spectrum = detail::read_spectrum(root.section("spectrum"));
    if (root.has("domain")) pc.domain = detail::read_domain(root.section("domain"));
    if (root.has("window")) pc.window = detail::read_window(root.section("window"));
    if (root.has("verify_pair")) {
        auto s = root.section("verify_pair");
        pc.pair.probes = s.small_int("probes", pc.pair.probes);
        pc.pair.tiling_window = s.small_int("tiling_window", pc.pair.tiling_window);
        pc.pair.resolution = s.small_int("resolution", pc.pair.resolution);
        s.finish();
        if (pc.pair.probes < 1) throw Error(ErrorKind::Schema, "'verify_pair.probes' must be >= 1");
    }
    if (root.has("sequences")) {
        auto s = root.section("sequences");
        SequenceOptions o;
        if (s.has("a")) o.a = detail::read_phase_table(s.section("a"));
        if (s.has("b")) o.b = detail::read_phase_table(s.section("b"));
        o.alpha = s.number("alpha", 0.0);
        o.beta = s.number("beta", 0.0);
        s.finish();
        pc.sequences = std::move(o);
    }
    if (root.has("cocycle")) {
        auto s = root.section("cocycle");
        pc.cocycle.divisions = s.small_int("divisions", pc.cocycle.divisions);
        s.finish();
        if (pc.cocycle.divisions < 1) throw Error(ErrorKind::Schema, "'cocycle.divisions' must be >= 1");
    }
    if (root.has("groups")) {
        auto s = root.section("groups");
        if (s.has("steps"))
            for (double v : s.numbers("steps")) {
                if (v != std::floor(v) || v < 0) throw Error(ErrorKind::Schema, "'groups.steps' must be integers >= 0");
                pc.groups.steps.push_back(static_cast<int>(v));
            }
        pc.groups.random_probes = s.small_int("random_probes", pc.groups.random_probes);
        pc.groups.basis_radius = s.small_int("basis_radius", pc.groups.basis_radius);
        s.finish();
    }
    if (root.has("tiling")) {
        auto s = root.section("tiling");
        pc.tiling.window = s.small_int("window", pc.tiling.window);
        pc.tiling.resolution = s.small_int("resolution", pc.tiling.resolution);
        s.finish();
    }
    if (root.has("diffraction")) {
        auto s = root.section("diffraction");
        DiffractionOptions o;
        o.model.constant = s.number("constant", 0.0);
        if (s.has("components"))
            for (auto& c : s.sections("components")) {
                o.model.components.push_back(
                    PeriodicComponent::cosine(c.number("period"), c.number("cos", 0.0), c.number("sin", 0.0)));
                c.finish();
            }
        if (s.has("test_function")) {
            auto t = s.section("test_function");
            o.phi = {t.number("x0", 0.0), t.number("y0", 0.0), t.number("sx", 0.25), t.number("sy", 1.0)};
            t.finish();
            if (!(o.phi.sx > 0) || !(o.phi.sy > 0))
                throw Error(ErrorKind::Schema, "'diffraction.test_function' widths must be positive");
        }
        o.window = s.small_int("window", o.window);
        o.k_radius = s.small_int("k_radius", o.k_radius);
        o.plot_n = s.small_int("plot_n", o.plot_n);
        s.finish();
        o.model.validate();
        pc.diffraction = std::move(o);
    }
    if (root.has("root_scan")) {
        auto s = root.section("root_scan");
        RootScanOptions o;
        const auto& c = s.raw("coefficients");
        if (c.is_string()) {
            // "1,0,1,1"
            std::string text = c.get<std::string>(), tok;
            std::istringstream in(text);
            while (std::getline(in, tok, ',')) {
                try {
                    std::size_t used = 0;
                    o.coefficients.emplace_back(std::stod(tok, &used));
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::logic_error&) {
                    throw Error(ErrorKind::Schema, "'root_scan.coefficients': bad entry '" + tok + "'");
                }
            }
        } else if (c.is_array()) {
            for (const auto& v : c) {
                if (v.is_number()) {
                    o.coefficients.emplace_back(v.get<double>());
                } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
                    o.coefficients.emplace_back(v[0].get<double>(), v[1].get<double>());
                } else {
                    throw Error(ErrorKind::Schema, "'root_scan.coefficients' entries are numbers or [re, im]");
                }
            }
        } else {
            throw Error(ErrorKind::Schema, "'root_scan.coefficients' must be a string or an array");
        }
        o.samples = s.small_int("samples", o.samples);
        s.finish();
        pc.root_scan = std::move(o);
    }
    root.finish();
    pc.tolerances.validate();
    return pc;
}

/// SPECLAB_EQ_TOL, SPECLAB_NUM_TOL, SPECLAB_GRID_N, SPECLAB_QUAD_N.
inline void apply_env_overrides(ToleranceConfig& t) {
    auto real = [](const char* name, double& slot) {
        if (const char* v = std::getenv(name)) {
            try {
                std::size_t used = 0;
                slot = std::stod(v, &used);
                if (used != std::strlen(v)) throw std::invalid_argument(v);
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::Schema, std::string(name) + "='" + v + "' is not a number");
            }
        }
    };
    auto count = [](const char* name, int& slot) {
        if (const char* v = std::getenv(name)) {
            try {
                std::size_t used = 0;
                slot = std::stoi(v, &used);
                if (used != std::strlen(v)) throw std::invalid_argument(v);
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::Schema, std::string(name) + "='" + v + "' is not an integer");
            }
        }
    };
    real("SPECLAB_EQ_TOL", t.eq_tol);
    real("SPECLAB_NUM_TOL", t.num_tol);
    count("SPECLAB_GRID_N", t.grid_n);
    count("SPECLAB_QUAD_N", t.quad_n);
    t.validate();
}

struct Verdict {
    std::string name;
    bool pass = false;
    std::string op;        // module/operation
    std::string relation;  // the identity or property checked
    std::string detail;
};

/// Plain-text report with a fixed section order: header, verdicts,
/// measurements, witnesses, notes.
class Report {
public:
    void header(std::string line) { header_.push_back(std::move(line)); }
    void verdict(Verdict v) { verdicts_.push_back(std::move(v)); }
    void measure(const std::string& key, const std::string& value) { measures_.push_back(key + " = " + value); }
    void witness(std::string line) { witnesses_.push_back(std::move(line)); }
    void note(std::string line) { notes_.push_back(std::move(line)); }

    bool all_pass() const {
        return std::all_of(verdicts_.begin(), verdicts_.end(), [](const Verdict& v) { return v.pass; });
    }
    const std::vector<Verdict>& verdicts() const { return verdicts_; }

    std::string render() const {
        std::string s = "# speclab report\n";
        for (const auto& h : header_) s += h + "\n";
        s += "\n[verdicts]\n";
        for (const auto& v : verdicts_)
            s += std::string(v.pass ? "PASS " : "FAIL ") + v.name + " | op=" + v.op + " | relation=" + v.relation +
                 (v.detail.empty() ? "" : " | " + v.detail) + "\n";
        s += "overall = " + std::string(all_pass() ? "PASS" : "FAIL") + "\n";
        auto block = [&](const char* title, const std::vector<std::string>& lines) {
            if (lines.empty()) return;
            s += std::string("\n[") + title + "]\n";
            for (const auto& l : lines) s += l + "\n";
        };
        block("measurements", measures_);
        block("witnesses", witnesses_);
        block("notes", notes_);
        return s;
    }

private:
    std::vector<std::string> header_, measures_, witnesses_, notes_;
    std::vector<Verdict> verdicts_;
};

struct RunResult {
    int exit_code = 0;
    Report report;
    std::vector<std::string> artifacts;  // file names inside the output directory
};

namespace detail {

struct Context {
    const ParsedConfig& cfg;
    ToleranceConfig tol;
    std::uint64_t seed;
    std::filesystem::path out;
    Report& report;
    std::vector<std::string>& artifacts;

    void write(const std::string& name, const std::string& content) {
        write_text_file(out / name, content);
        artifacts.push_back(name);
    }
};

inline const SpectrumSpec& need_spectrum(const ParsedConfig& c) {
    if (!c.spectrum) throw Error(ErrorKind::Schema, "this command needs a 'spectrum' section");
    return *c.spectrum;
}

/// Explicit spectra ignore the window, so it may be omitted for them.
inline LatticeWindow need_window(const ParsedConfig& c, const SpectrumSpec& spec) {
    if (c.window) return *c.window;
    if (spec.is_explicit()) return LatticeWindow::cube(static_cast<int>(spec.dimension()), 0);
    throw Error(ErrorKind::Schema, "this command needs a 'window' section");
}

inline DomainSpec domain_for(const ParsedConfig& c, const SpectrumSpec& spec) {
    if (c.domain) return *c.domain;
    return DomainSpec::unit_cube(static_cast<int>(spec.dimension()));
}

inline std::string gram_text(const GramMatrix& g) {
    std::string s = fmt("# gram n=%lld entries re,im\n", static_cast<long long>(g.entries.rows()));
    for (Eigen::Index i = 0; i < g.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.entries.cols(); ++j)
            s += (j ? " " : "") + fmt("%.6e,%.6e", g.entries(i, j).real(), g.entries(i, j).imag());
        s += "\n";
    }
    return s;
}

inline void difference_check(Context& c, const DomainSpec& domain, std::span<const Point> points) {
    const auto diffs = spectrum_difference_set(points);
    std::size_t bad = 0;
    std::optional<Point> first;
    double worst = 0;
    for (const auto& x : diffs) {
        bool ok;
        if (domain.is_cube()) {
            ok = in_zero_set_cube(domain.dimension(), x, c.tol.eq_tol);
        } else {
            const double v = std::abs(eval_F_omega(domain, x));
            worst = std::max(worst, v);
            ok = v < c.tol.eq_tol;
        }
        if (!ok) {
            ++bad;
            if (!first) first = x;
        }
    }
    c.report.verdict({"difference-set", bad == 0, "exponential-analysis/in_zero_set_cube",
                      "differences lie in the zero set of the domain transform",
                      fmt("differences=%zu outside=%zu", diffs.size(), bad)});
    if (first) c.report.witness("difference outside zero set: " + point_text(*first));
}

inline void tiling_check(Context& c, const SpectrumSpec& spec, int window, int resolution) {
    const auto mm = multiplicity_map(spec, window, resolution);
    const auto r = tiling_verdict(mm);
    c.report.verdict({"tiling", r.tiles, "tiling-checker/tiling_verdict",
                      "translates of the unit cube cover with multiplicity one",
                      fmt("window=%d resolution=%d samples=%zu gap_fraction=%.6f overlap_fraction=%.6f", window,
                          resolution, r.samples, r.gap_fraction, r.overlap_fraction)});
    c.write("multiplicity.txt", multiplicity_text(mm));
    if (spec.dimension() == 2) c.write("tiling.svg", render_tiling_svg(spec, window));
}

inline void run_verify_pair(Context& c) {
    const auto& spec = need_spectrum(c.cfg);
    const auto window = need_window(c.cfg, spec);
    const auto domain = domain_for(c.cfg, spec);
    const auto points = enumerate_spectrum(spec, window);
    c.report.measure("points", std::to_string(points.size()));

    const auto orth = orthogonality_verdict(domain, spec, window, c.tol.eq_tol);
    c.report.verdict({"orthogonality", orth.is_orthogonal, "exponential-analysis/orthogonality_verdict",
                      "Gram matrix of the exponentials is the identity",
                      fmt("worst_offdiag=%.3e tol=%.1e", orth.worst_offdiag, c.tol.eq_tol)});
    if (orth.witness)
        c.report.witness("non-orthogonal pair: " + point_text(orth.witness->first) + " " +
                         point_text(orth.witness->second));
    c.write("gram.txt", gram_text(orth.gram));
    difference_check(c, domain, points);

    if (domain.is_cube() && domain.dimension() <= 2 && !spec.is_explicit()) {
        Rng rng(c.seed);
        std::vector<GridState> probes;
        const int n = c.tol.grid_n;
        // Frequency offsets stay well inside the window so the plateau reflects
        // the spectrum rather than probes leaking past the truncation.
        int half = std::numeric_limits<int>::max();
        for (std::size_t a = 0; a < window.arity(); ++a) half = std::min(half, (window.extent(a) - 1) / 2);
        const double reach = 0.25 * half;
        for (int p = 0; p < c.cfg.pair.probes; ++p) {
            const double cx = rng.uniform(0.4, 0.6), cy = rng.uniform(0.4, 0.6), w = rng.uniform(0.15, 0.2);
            const double kx = rng.uniform(-reach, reach), ky = rng.uniform(-reach, reach);
            probes.push_back(GridState::sample(n, domain.dimension() == 1 ? 1 : n, [&](double x, double y) {
                const double r2 = (x - cx) * (x - cx) + (domain.dimension() == 1 ? 0.0 : (y - cy) * (y - cy));
                return std::exp(-r2 / (2 * w * w)) * unit_phase(kx * x + ky * y);
            }));
        }
        const auto rep = completeness_probe(domain, spec, window, probes);
        const double lo = *std::min_element(rep.parseval_ratio.begin(), rep.parseval_ratio.end());
        c.report.verdict({"completeness", lo >= completeness_plateau, "exponential-analysis/completeness_probe",
                          "Parseval ratio of windowed expansions reaches the plateau",
                          fmt("min_ratio=%.6f plateau=%.2f probes=%d", lo, completeness_plateau, c.cfg.pair.probes)});
        for (std::size_t i = 0; i < rep.parseval_ratio.size(); ++i)
            c.report.measure(fmt("parseval_ratio[%zu]", i), fmt("%.9f", rep.parseval_ratio[i]));
        c.report.note("completeness on a finite window is a heuristic plateau test, not a proof");
    } else {
        c.report.note("completeness probe skipped: needs a unit cube of dimension <= 2 and a family spectrum");
    }

    if (domain.is_cube() && spec.dimension() <= 3 && domain.dimension() == static_cast<int>(spec.dimension()))
        tiling_check(c, spec, c.cfg.pair.tiling_window, c.cfg.pair.resolution);
}

inline void run_build_spectrum(Context& c) {
    const auto& spec = need_spectrum(c.cfg);
    const auto window = need_window(c.cfg, spec);
    const auto points = enumerate_spectrum(spec, window);
    std::string txt = fmt("# spectrum points=%zu dim=%zu\n", points.size(), spec.dimension());
    for (const auto& p : points) {
        for (std::size_t j = 0; j < p.size(); ++j) txt += (j ? " " : "") + fmt("%.12g", p[j]);
        txt += "\n";
    }
    c.write("spectrum.txt", txt);
    c.report.measure("points", std::to_string(points.size()));
    c.report.verdict({"enumeration", true, "core-model/enumerate_spectrum", "window enumeration within the cap",
                      fmt("cardinality=%zu cap=%lld", points.size(), static_cast<long long>(LatticeWindow::default_cap))});
    if (c.cfg.domain) difference_check(c, *c.cfg.domain, points);
}

inline PhaseSequenceSet2D need_sequences(const ParsedConfig& cfg) {
    if (!cfg.sequences) throw Error(ErrorKind::Schema, "this command needs a 'sequences' section");
    if (!cfg.window) throw Error(ErrorKind::Schema, "this command needs a 'window' section");
    PhaseSequenceSet2D s{cfg.sequences->a, cfg.sequences->b, *cfg.window};
    s.validate();
    return s;
}

inline void cocycle_witnesses(Context& c, const CocycleReport& r) {
    if (!r.witnesses.empty()) c.report.note(fmt("witness list capped at %zu entries", max_witnesses));
    for (const auto& w : r.witnesses)
        c.report.witness(fmt("identity %s at index %s shift %d along axis %d: |residual| = %.6e", w.identity.c_str(),
                             tuple_text(w.index).c_str(), w.shift, w.shift_axis, w.modulus));
}

inline void report_quasi(Context& c, const QuasiCommutativityReport& q, int divisions) {
    c.report.measure("quasi_commuting", q.quasi_commuting ? "true" : "false");
    c.report.measure("quasi_phase_step", fmt("1/%d", divisions));
    c.report.measure("quasi_best_offdiag_mass", fmt("%.6e", q.best_mass));
    if (q.phases_found) c.report.measure("quasi_phases", point_text(*q.phases_found));
}

inline void run_check_cocycle(Context& c) {
    const int div = c.cfg.cocycle.divisions;
    if (c.cfg.spectrum && std::holds_alternative<Tower3D>(c.cfg.spectrum->variant())) {
        if (!c.cfg.window) throw Error(ErrorKind::Schema, "this command needs a 'window' section");
        const auto& tower = std::get<Tower3D>(c.cfg.spectrum->variant());
        const auto f = eigenfunctions_from_tower3d(tower);
        const auto r = check_cocycle_highdim(f, *c.cfg.window, c.tol.eq_tol);
        c.report.verdict({"cocycle", r.holds, "cocycle-engine/check_cocycle_highdim",
                          "eigenvalue functions satisfy the commutation identities",
                          fmt("worst=%.3e tol=%.1e", r.worst, c.tol.eq_tol)});
        cocycle_witnesses(c, r);
        const auto ops = boundary_models_from_tower3d(tower);
        const auto cands = phase_grid(3, div);
        report_quasi(c, quasi_commutativity_check(ops, cands, *c.cfg.window, c.tol.num_tol), div);
        return;
    }
    const auto s = need_sequences(c.cfg);
    const auto r = check_cocycle_2d(s, c.tol.eq_tol);
    c.report.verdict({"cocycle", r.holds, "cocycle-engine/check_cocycle_2d",
                      "(b_m - b_{m+k})(1 - a_n) = 0 and (a_n - a_{n+l})(1 - b_m) = 0 on the window",
                      fmt("worst=%.3e tol=%.1e", r.worst, c.tol.eq_tol)});
    cocycle_witnesses(c, r);
    if (r.holds) {
        try {
            c.report.measure("planar_class", to_string(classify_2d(s, c.tol.eq_tol)));
        } catch (const Error& e) {
            c.report.measure("planar_class", std::string("unclassified (") + e.what() + ")");
        }
    }
    if (!s.a.has_callable() && !s.b.has_callable()) {
        const auto ops = boundary_models_2d(s, c.cfg.sequences->alpha, c.cfg.sequences->beta);
        // The basis phases (alpha, beta) are tried first, then the grid.
        auto cands = phase_grid(2, div);
        const auto frac = [](double v) { return v - std::floor(v); };
        cands.insert(cands.begin(), Point{frac(c.cfg.sequences->alpha), frac(c.cfg.sequences->beta)});
        report_quasi(c, quasi_commutativity_check(ops, cands, s.window, c.tol.num_tol), div);
    }
}

inline void run_simulate_groups(Context& c) {
    const auto s = need_sequences(c.cfg);
    const auto& w = s.window;
    if (w.extent(0) != w.extent(1))
        throw Error(ErrorKind::Schema, "group simulation needs a square window; its extent is the grid size");
    const int n = w.extent(0);
    const double alpha = c.cfg.sequences->alpha, beta = c.cfg.sequences->beta;
    std::vector<int> steps = c.cfg.groups.steps;
    if (steps.empty())
        for (int i = 1; i <= 5; ++i) steps.push_back(static_cast<int>(std::lround(static_cast<double>(n) * i / 6)));
    for (int j : steps)
        if (j < 0 || j > n) throw Error(ErrorKind::Schema, fmt("step %d outside [0, %d]", j, n));

    Rng rng(c.seed);
    const auto probes = probe_set(w, rng, c.cfg.groups.random_probes, c.cfg.groups.basis_radius);
    if (probes.empty()) throw Error(ErrorKind::Schema, "no probes: raise 'groups.random_probes'");
    c.report.measure("grid_n", std::to_string(n));
    c.report.measure("probes", std::to_string(probes.size()));

    // Matrix action against the exact grid action, one time per axis.
    const auto bx = boundary_from_sequences(Axis::X, s, alpha, beta, n);
    const auto by = boundary_from_sequences(Axis::Y, s, alpha, beta, n);
    double match = 0, iso = 0;
    for (int j : steps) {
        const double t = static_cast<double>(j) / n;
        for (const auto& [ax, line] : {std::pair{Axis::X, &bx}, {Axis::Y, &by}}) {
            const auto op = group_matrix_spectral(ax, t, s, alpha, beta, w, CoefficientMode::Sampled, n);
            for (std::size_t p = 0; p < std::min<std::size_t>(probes.size(), 4); ++p) {
                const Vector out = op.apply(probes[p]);
                const auto grid = group_action_grid(to_grid(probes[p], w, alpha, beta, n, n), ax, j, *line);
                const auto spec = to_grid(out, w, alpha, beta, n, n);
                match = std::max(match, GridState(grid.values() - spec.values()).norm() / probes[p].norm());
                iso = std::max(iso, std::abs(out.norm() - probes[p].norm()) / probes[p].norm());
            }
        }
    }
    c.report.verdict({"spectral-vs-grid", match < c.tol.num_tol, "induced-groups/group_matrix_spectral",
                      "coefficient-space action equals the boundary-twisted translation",
                      fmt("worst=%.3e tol=%.1e", match, c.tol.num_tol)});
    c.report.verdict({"unitarity", iso < c.tol.num_tol, "induced-groups/group_matrix_spectral",
                      "truncated group operators are isometric", fmt("worst=%.3e tol=%.1e", iso, c.tol.num_tol)});

    std::vector<SweepRow> rows;
    double worst = 0;
    for (int js : steps) {
        const auto ux = group_matrix_spectral(Axis::X, static_cast<double>(js) / n, s, alpha, beta, w,
                                              CoefficientMode::Sampled, n);
        for (int jt : steps) {
            const auto uy = group_matrix_spectral(Axis::Y, static_cast<double>(jt) / n, s, alpha, beta, w,
                                                  CoefficientMode::Sampled, n);
            const double v = commutator_norm(ux, uy, probes);
            rows.push_back({static_cast<double>(js) / n, static_cast<double>(jt) / n, v});
            worst = std::max(worst, v);
        }
    }
    c.write("commutator_sweep.csv", sweep_csv(rows));
    const bool commutes = worst < commutator_threshold;
    const auto coc = check_cocycle_2d(s, c.tol.eq_tol);
    c.report.measure("max_commutator_norm", fmt("%.6e", worst));
    c.report.measure("commuting", commutes ? "true" : "false");
    c.report.measure("cocycle_holds", coc.holds ? "true" : "false");
    c.report.verdict({"cocycle-agreement", commutes == coc.holds, "induced-groups/commutator_norm",
                      "groups commute exactly when the cocycle identity holds",
                      fmt("max_norm=%.3e threshold=%.1e", worst, commutator_threshold)});
    cocycle_witnesses(c, coc);
}

inline void run_check_tiling(Context& c) {
    const auto& spec = need_spectrum(c.cfg);
    tiling_check(c, spec, c.cfg.tiling.window, c.cfg.tiling.resolution);
}

inline void run_diffraction(Context& c) {
    if (!c.cfg.diffraction) throw Error(ErrorKind::Schema, "this command needs a 'diffraction' section");
    const auto& o = *c.cfg.diffraction;
    for (const auto& w : o.model.rational_ratio_warnings()) c.report.note(w);
    const auto direct = eval_direct(o.model, o.phi, o.window);
    for (const auto& w : direct.warnings) c.report.note(w);
    const auto density = build_density(o.model, o.phi, o.k_radius);
    const cplx diff = eval_diffraction(density, o.phi);
    const double rel = std::abs(direct.value - diff) / std::max(std::abs(direct.value), 1e-300);
    const bool constant = o.model.components.empty();
    const double tol = constant ? poisson_agreement : diffraction_agreement;
    c.report.measure("direct", fmt("%.12e%+.12ei", direct.value.real(), direct.value.imag()));
    c.report.measure("diffraction", fmt("%.12e%+.12ei", diff.real(), diff.imag()));
    c.report.measure("density_entries", std::to_string(density.entries.size()));
    c.report.verdict({"direct-vs-density", rel < tol, "diffraction-lab/eval_diffraction",
                      constant ? "Poisson summation for a constant shift"
                               : "pairing with the spectrum equals pairing with the point-mass density",
                      fmt("relative=%.3e tol=%.1e window=%d k_radius=%d", rel, tol, o.window, o.k_radius)});
    c.write("density.txt", density_table(density));
    c.write("diffraction.svg", render_diffraction_svg(density, o.plot_n));
}

inline void run_root_scan(Context& c) {
    if (!c.cfg.root_scan) throw Error(ErrorKind::Schema, "this command needs a 'root_scan' section");
    const auto& o = *c.cfg.root_scan;
    const auto r = unit_circle_root_scan(o.coefficients, o.samples);
    const auto r2 = unit_circle_root_scan(o.coefficients, 2 * o.samples);
    c.report.measure("min_modulus", fmt("%.12e", r.min_modulus));
    c.report.measure("argmin_angle", fmt("%.12e", r.argmin_angle));
    c.report.measure("min_modulus_double_samples", fmt("%.12e", r2.min_modulus));
    c.report.verdict({"no-unimodular-root", r.min_modulus > c.tol.eq_tol, "exponential-analysis/unit_circle_root_scan",
                      "polynomial has no zero on the unit circle",
                      fmt("min_modulus=%.6e samples=%d", r.min_modulus, o.samples)});
}

}  // namespace detail

inline std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Execute one command. Deterministic for a fixed config and seed: the
/// report carries no clock or host information.
inline RunResult run(const RunConfig& rc) {
    const auto cfg = parse_config(read_text_file(rc.config_path));
    if (cfg.command && *cfg.command != rc.command)
        throw Error(ErrorKind::Schema, std::string("config is for '") + to_string(*cfg.command) +
                                           "', invoked as '" + to_string(rc.command) + "'");
    ToleranceConfig tol = cfg.tolerances;
    apply_env_overrides(tol);
    const std::uint64_t seed = rc.seed ? *rc.seed : cfg.seed.value_or(1);

    std::error_code ec;
    std::filesystem::create_directories(rc.out_dir, ec);
    if (ec || !std::filesystem::is_directory(rc.out_dir))
        throw Error(ErrorKind::Io, "cannot create output directory " + rc.out_dir.string());

    RunResult res;
    res.report.header(std::string("command = ") + to_string(rc.command));
    res.report.header("config = " + rc.config_path.filename().string());
    res.report.header("seed = " + std::to_string(seed));
    res.report.header(detail::fmt("tolerances = eq_tol=%.3e num_tol=%.3e grid_n=%d quad_n=%d", tol.eq_tol,
                                  tol.num_tol, tol.grid_n, tol.quad_n));
    detail::Context ctx{cfg, tol, seed, rc.out_dir, res.report, res.artifacts};
    switch (rc.command) {
        case Command::VerifyPair: detail::run_verify_pair(ctx); break;
        case Command::BuildSpectrum: detail::run_build_spectrum(ctx); break;
        case Command::CheckCocycle: detail::run_check_cocycle(ctx); break;
        case Command::SimulateGroups: detail::run_simulate_groups(ctx); break;
        case Command::CheckTiling: detail::run_check_tiling(ctx); break;
        case Command::Diffraction: detail::run_diffraction(ctx); break;
        case Command::RootScan: detail::run_root_scan(ctx); break;
    }
    std::string arts = "artifacts = report.txt";
    for (const auto& a : res.artifacts) arts += " " + a;
    res.report.header(arts);
    write_text_file(rc.out_dir / "report.txt", res.report.render());
    res.artifacts.insert(res.artifacts.begin(), "report.txt");
    res.exit_code = res.report.all_pass() ? 0 : 1;
    return res;
}

}  // namespace speclab
