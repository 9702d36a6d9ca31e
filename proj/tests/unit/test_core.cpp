#include <catch_amalgamated.hpp>

#include "speclab/spectrum.hpp"

using namespace speclab;
using Catch::Matchers::WithinAbs;

TEST_CASE("lattice window enumerates row-major, last axis fastest") {
    const LatticeWindow w({{0, 1}, {-1, 0}});
    const auto idx = w.indices();
    REQUIRE(idx.size() == 4);
    CHECK(idx[0] == IntTuple{0, -1});
    CHECK(idx[1] == IntTuple{0, 0});
    CHECK(idx[2] == IntTuple{1, -1});
    CHECK(idx[3] == IntTuple{1, 0});
    CHECK(w.cardinality() == 4);
}

TEST_CASE("lattice window rejects inverted ranges and cap breaches") {
    CHECK_THROWS_AS(LatticeWindow({{2, 1}}), Error);
    try {
        LatticeWindow::cube(3, 100);
        FAIL("expected cap error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CapExceeded);
    }
}

TEST_CASE("int function defaults outside its table and checks the range") {
    const IntFunction b(1, 0.0, {{{0}, 0.2}, {{1}, 0.5}});
    CHECK(b(0) == 0.2);
    CHECK(b(1) == 0.5);
    CHECK(b(7) == 0.0);
    CHECK_FALSE(b.is_constant());
    CHECK(IntFunction::constant(1, 0.3).is_constant());
    CHECK_THROWS_AS(IntFunction(1, 1.0), Error);
    CHECK_THROWS_AS(IntFunction(1, 0.0, {{{0, 1}, 0.1}}), Error);
}

TEST_CASE("unit lattice window of radius 1") {
    const SpectrumSpec spec(TranslatedLattice{{0.0, 0.0}});
    const auto pts = enumerate_spectrum(spec, LatticeWindow::cube(2, 1));
    REQUIRE(pts.size() == 9);
    for (const auto& p : pts) {
        CHECK(p[0] == std::round(p[0]));
        CHECK(p[1] == std::round(p[1]));
    }
}

TEST_CASE("column-shifted family places beta(m) + n in the second coordinate") {
    const SpectrumSpec spec(ClassA2D{0.0, IntFunction(1, 0.0, {{{0}, 0.2}, {{1}, 0.5}})});
    const auto pts = enumerate_spectrum(spec, LatticeWindow({{0, 1}, {0, 1}}));
    REQUIRE(pts.size() == 4);
    CHECK(pts[0] == Point{0.0, 0.2});
    CHECK(pts[1] == Point{0.0, 1.2});
    CHECK(pts[2] == Point{1.0, 0.5});
    CHECK(pts[3] == Point{1.0, 1.5});
}

TEST_CASE("row-shifted family swaps the roles") {
    const SpectrumSpec spec(ClassB2D{0.25, IntFunction(1, 0.0, {{{1}, 0.5}})});
    const auto pts = enumerate_spectrum(spec, LatticeWindow({{0, 0}, {0, 1}}));
    CHECK(pts[0] == Point{0.0, 0.25});
    CHECK(pts[1] == Point{0.5, 1.25});
}

TEST_CASE("three-dimensional tower point formula") {
    const Tower3D t{IntFunction(1, 0.0, {{{1}, 0.5}}), IntFunction(2, 0.0, {{{1, 2}, 0.25}})};
    const SpectrumSpec spec(t);
    const auto pts = enumerate_spectrum(spec, LatticeWindow({{1, 1}, {2, 2}, {0, 0}}));
    CHECK(pts[0] == Point{1.0, 2.5, 0.25});
}

TEST_CASE("general tower uses prefixes of the index") {
    Tower tw;
    tw.levels.push_back(IntFunction(0, 0.5));
    tw.levels.push_back(IntFunction(1, 0.0, {{{0}, 0.25}}));
    const auto pts = enumerate_spectrum(SpectrumSpec(tw), LatticeWindow({{0, 0}, {3, 3}}));
    CHECK(pts[0] == Point{0.5, 3.25});
}

TEST_CASE("arity mismatch between spectrum and window") {
    const SpectrumSpec spec(TranslatedLattice{{0.0, 0.0}});
    try {
        enumerate_spectrum(spec, LatticeWindow::cube(3, 1));
        FAIL("expected arity error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ArityMismatch);
    }
    CHECK_THROWS_AS(SpectrumSpec(ClassA2D{0.0, IntFunction(2, 0.0)}), Error);
}

TEST_CASE("explicit spectra ignore the window") {
    const SpectrumSpec spec(Explicit{{{0.0}, {0.5}}});
    CHECK(enumerate_spectrum(spec, LatticeWindow::cube(2, 4)).size() == 2);
    CHECK(spec.dimension() == 1);
}

TEST_CASE("difference set keeps ordered pairs of distinct positions") {
    const std::vector<Point> pts{{0.0}, {1.0}, {1.0}};
    const auto d = spectrum_difference_set(pts);
    CHECK(d.size() == 6);
    CHECK(std::count(d.begin(), d.end(), Point{0.0}) == 2);
    CHECK_THROWS_AS(spectrum_difference_set(std::vector<Point>{}), Error);
    CHECK(spectrum_difference_set(std::vector<Point>{{3.0}}).empty());
}

TEST_CASE("splitmix generator is reproducible and in range") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng c(1);
    for (int i = 0; i < 100; ++i) {
        const int k = c.integer(-2, 2);
        CHECK(k >= -2);
        CHECK(k <= 2);
    }
}

TEST_CASE("tolerance validation") {
    ToleranceConfig t;
    CHECK_NOTHROW(t.validate());
    t.eq_tol = 0;
    CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("interval unions are sorted and must be disjoint") {
    const auto d = DomainSpec::interval_union({{2.0, 3.0}, {0.0, 1.0}});
    CHECK_THAT(d.measure(), WithinAbs(2.0, 1e-15));
    CHECK_THROWS_AS(DomainSpec::interval_union({{0.0, 1.0}, {0.5, 2.0}}), Error);
    CHECK_THROWS_AS(DomainSpec::interval_union({}), Error);
    CHECK_THROWS_AS(DomainSpec::unit_cube(0), Error);
}
