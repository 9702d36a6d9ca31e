#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "speclab/diffraction.hpp"

using namespace speclab;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Sum over the lattice of phi(q, p) e^{i 2 pi c p}, by the Poisson identity
/// the pairing for a constant shift c.
cplx poisson_side(const Gaussian2D& phi, double c) {
    cplx acc = 0.0;
    for (int q = -40; q <= 40; ++q)
        for (int p = -40; p <= 40; ++p) acc += phi(q, p) * unit_phase(c * p);
    return acc;
}

}  // namespace

TEST_CASE("single-cosine coefficients are Bessel values") {
    const double omega = std::sqrt(2.0), amp = 0.1;
    const auto c = PeriodicComponent::cosine(omega, amp);
    for (int n : {1, 2, -3, 5}) {
        const auto cc = component_coeffs(c, n, 12);
        for (int k = -12; k <= 12; ++k) CHECK(std::abs(cc.at(k) - oracle::bessel_coeff(k, amp, n)) < 1e-13);
        CHECK(cc.tail < 1e-12);
    }
}

TEST_CASE("coefficients against direct quadrature") {
    PeriodicComponent c{2.3, {{1, cplx(0.05, 0.02)}, {-1, cplx(0.05, -0.02)}, {2, 0.03}, {-2, 0.03}}};
    for (int k : {-3, 0, 2}) {
        const cplx ref = oracle::integrate(
                             [&](double x) { return unit_phase(2 * c(x)) * unit_phase(-k * x / c.period); }, 0.0,
                             c.period) /
                         c.period;
        CHECK(std::abs(component_coeffs(c, 2, 6).at(k) - ref) < 1e-12);
    }
}

TEST_CASE("the n = 0 row is a single unit mass") {
    QuasiPeriodicModel m{0.3, {PeriodicComponent::cosine(std::sqrt(3.0), 0.2)}};
    for (const auto& e : density_coeffs(m, 0, 6)) {
        const bool origin = e.k == IntTuple{0};
        CHECK(std::abs(e.weight - (origin ? cplx(1.0) : cplx(0.0))) < 1e-14);
    }
}

TEST_CASE("weights are conjugate-symmetric for real beta") {
    QuasiPeriodicModel m{0.0, {PeriodicComponent::cosine(std::sqrt(2.0), 0.1, 0.05),
                               PeriodicComponent::cosine((1 + std::sqrt(5.0)) / 2, 0.07)}};
    const auto plus = density_coeffs(m, 2, 8), minus = density_coeffs(m, -2, 8);
    REQUIRE(plus.size() == minus.size());
    // c(k, -n) = conj(c(-k, n)); the window is symmetric, so -k sits at the mirrored index.
    for (std::size_t i = 0; i < plus.size(); ++i)
        CHECK(std::abs(minus[i].weight - std::conj(plus[plus.size() - 1 - i].weight)) < 1e-14);
}

TEST_CASE("a constant shift matches the Poisson sum") {
    for (double c : {0.0, 0.25, 0.61}) {
        const QuasiPeriodicModel m{c, {}};
        const Gaussian2D phi{0.1, -0.3, 0.6, 1.0};
        const auto direct = eval_direct(m, phi, 200).value;
        const auto ref = poisson_side(phi, c);
        CHECK(rel(direct, ref) < 1e-6);
        CHECK(rel(eval_diffraction(build_density(m, phi, 0), phi), ref) < 1e-6);
    }
}

TEST_CASE("one harmonic: direct and density pairings agree") {
    const QuasiPeriodicModel m{0.0, {PeriodicComponent::cosine(std::sqrt(2.0), 0.1)}};
    for (const Gaussian2D phi : {Gaussian2D{0.0, 0.0, 0.25, 1.0}, Gaussian2D{0.2, 0.4, 0.3, 0.8}}) {
        const auto d = eval_direct(m, phi, 200);
        CHECK(d.warnings.empty());
        CHECK(rel(eval_diffraction(build_density(m, phi, 12), phi), d.value) < 1e-3);
    }
}

TEST_CASE("two harmonics: direct and density pairings agree") {
    const QuasiPeriodicModel m{0.15, {PeriodicComponent::cosine(std::sqrt(2.0), 0.1),
                                      PeriodicComponent::cosine((1 + std::sqrt(5.0)) / 2, 0.05, 0.04)}};
    CHECK(m.rational_ratio_warnings().empty());
    const Gaussian2D phi{0.0, 0.1, 0.25, 1.0};
    const auto d = eval_direct(m, phi, 200);
    CHECK(rel(eval_diffraction(build_density(m, phi, 12), phi), d.value) < 1e-3);
}

TEST_CASE("short windows and heavy tails are reported") {
    const QuasiPeriodicModel m{0.0, {PeriodicComponent::cosine(std::sqrt(2.0), 1.0)}};
    CHECK_THROWS_AS(density_coeffs(m, 5, 2), Error);
    try {
        density_coeffs(m, 5, 2);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Truncation);
    }
    CHECK_FALSE(eval_direct(m, Gaussian2D{0, 0, 0.05, 1.0}, 3).warnings.empty());
}

TEST_CASE("model validation and rational ratios") {
    QuasiPeriodicModel bad{0.0, {PeriodicComponent{1.0, {{1, cplx(0.1, 0.0)}}}}};
    CHECK_THROWS_AS(bad.validate(), Error);
    QuasiPeriodicModel neg{0.0, {PeriodicComponent::cosine(-1.0, 0.1)}};
    CHECK_THROWS_AS(neg.validate(), Error);
    QuasiPeriodicModel rat{0.0, {PeriodicComponent::cosine(1.5, 0.1), PeriodicComponent::cosine(1.0, 0.1)}};
    REQUIRE(rat.rational_ratio_warnings().size() == 1);
    CHECK(rat.rational_ratio_warnings()[0].find("3/2") != std::string::npos);
}

TEST_CASE("density exports are deterministic") {
    const QuasiPeriodicModel m{0.0, {PeriodicComponent::cosine(std::sqrt(2.0), 0.1)}};
    const Gaussian2D phi{0.0, 0.0, 0.25, 1.0};
    const auto d = build_density(m, phi, 10);
    const auto t = density_table(d);
    CHECK(t.rfind("# k n re im\n", 0) == 0);
    CHECK(t == density_table(build_density(m, phi, 10)));
    CHECK(std::count(t.begin(), t.end(), '\n') == 1 + static_cast<long>(d.entries.size()));
    const auto svg = render_diffraction_svg(d, 1);
    CHECK(svg == render_diffraction_svg(d, 1));
    CHECK(svg.find("<circle") != std::string::npos);
}
