#include <catch_amalgamated.hpp>

#include "speclab/extension.hpp"

using namespace speclab;
using Catch::Matchers::WithinAbs;

namespace {

Vector random_vector(Rng& rng, Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
    return v;
}

BumpProfile random_bump(Rng& rng) {
    const double w = rng.uniform(0.2, 0.45);
    return {rng.uniform(w + 0.02, 0.98 - w), w};
}

Matrix scalar(cplx c) { return Matrix::Constant(1, 1, c); }

}  // namespace

TEST_CASE("scalar transforms fix plus and minus one") {
    CHECK(std::abs(cayley_forward(BoundaryUnitary(scalar(1.0)))(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(cayley_forward(BoundaryUnitary(scalar(-1.0)))(0, 0) + 1.0) < 1e-15);
    CHECK(std::abs(cayley_inverse(scalar(1.0))(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(cayley_inverse(scalar(-1.0))(0, 0) + 1.0) < 1e-15);
}

TEST_CASE("the transform preserves unitarity and inverts exactly") {
    Rng rng(31);
    for (int n = 2; n <= 16; n += 2) {
        const BoundaryUnitary v(random_unitary(n, rng));
        const Matrix w = cayley_forward(v);
        CHECK(BoundaryUnitary::unitarity_defect(w) < 1e-10);
        CHECK((cayley_inverse(w) - v.matrix()).norm() < 1e-10);
    }
}

TEST_CASE("non-unitary and singular inputs are rejected") {
    CHECK_THROWS_AS(BoundaryUnitary(scalar(2.0)), Error);
    CHECK_THROWS_AS(BoundaryUnitary(Matrix(2, 3)), Error);
    try {
        cayley_inverse(scalar(1.0 / euler_e));
        FAIL("expected a singular solve");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Singular);
    }
}

TEST_CASE("diagonal boundary unitaries come from phase tables") {
    const std::vector<double> turns{0.0, 0.25, 0.5};
    const auto v = BoundaryUnitary::diagonal(turns);
    CHECK(std::abs(v.matrix()(1, 1) - I) < 1e-15);
    CHECK(std::abs(v.matrix()(2, 2) + 1.0) < 1e-15);
}

TEST_CASE("exp of a scalar transform") {
    const Matrix w = cayley_forward(BoundaryUnitary(scalar(I)));
    CHECK(std::abs(exp_boundary(w)(0, 0) - std::exp(w(0, 0))) < 1e-13);
}

TEST_CASE("defect-only domain vector has the expected boundary traces") {
    const int d = 3, n = 65;
    const BoundaryUnitary v(Matrix::Identity(d, d));
    Vector e0 = Vector::Zero(d);
    e0(0) = 1.0;
    const auto psi = make_domain_vector({}, Vector::Zero(d), e0, v, n);
    for (int i = 0; i < n; ++i) {
        const double x = node(i, n);
        CHECK(std::abs(psi.values(i, 0) - (std::exp(x) + std::exp(1 - x))) < 1e-14);
        CHECK(std::abs(psi.values(i, 1)) == 0.0);
    }
    CHECK(std::abs(psi.values(n - 1, 0) - (euler_e + 1)) < 1e-14);
    CHECK(std::abs(psi.values(0, 0) - (1 + euler_e)) < 1e-14);

    const Matrix h = apply_extension(psi);
    for (int i = 0; i < n; ++i) {
        const double x = node(i, n);
        CHECK(std::abs(h(i, 0) - (std::exp(x) - std::exp(1 - x)) / I) < 1e-14);
    }

    const auto zero = make_domain_vector({}, Vector::Zero(d), Vector::Zero(d), v, n);
    CHECK(zero.values.norm() == 0.0);
    CHECK(apply_extension(zero).norm() == 0.0);
    CHECK_THROWS_AS(make_domain_vector({}, Vector::Zero(d), Vector::Zero(d + 1), v, n), Error);
    CHECK_THROWS_AS(make_domain_vector({0.1, 0.2}, Vector::Zero(d), Vector::Zero(d), v, n), Error);
}

TEST_CASE("domain vectors satisfy the boundary condition") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = rng.integer(1, 8);
        const BoundaryUnitary v(random_unitary(d, rng));
        const auto psi = make_domain_vector(random_bump(rng), random_vector(rng, d), random_vector(rng, d), v, 129);
        CHECK(psi.smooth.row(0).norm() == 0.0);
        CHECK(psi.smooth.row(128).norm() == 0.0);
        CHECK(boundary_condition_residual(psi, v) < 1e-10);
    }
}

TEST_CASE("a smooth part alone leaves no residual") {
    Rng rng(42);
    const BoundaryUnitary v(random_unitary(4, rng));
    const auto psi = make_domain_vector({0.5, 0.3}, random_vector(rng, 4), Vector::Zero(4), v, 200);
    CHECK(boundary_condition_residual(psi, v) == 0.0);
}

TEST_CASE("an unmatched defect term breaks the boundary condition") {
    Rng rng(43);
    const int d = 4, n = 101;
    const BoundaryUnitary v(random_unitary(d, rng));
    auto psi = make_domain_vector({0.5, 0.3}, random_vector(rng, d), random_vector(rng, d), v, n);
    for (int i = 0; i < n; ++i) psi.values(i, 0) += std::exp(node(i, n));
    CHECK(boundary_condition_residual(psi, v) > 0.1);
}

TEST_CASE("Gregory weights integrate a quartic-accurate rule") {
    for (int n : {64, 256}) {
        Matrix f(n, 1), g(n, 1);
        for (int i = 0; i < n; ++i) {
            f(i, 0) = 1.0;
            g(i, 0) = std::exp(2.0 * node(i, n));
        }
        CHECK_THAT(domain_inner(f, g).real(), WithinAbs((std::exp(2.0) - 1) / 2, 1e-6 * 16.0 * std::pow(64.0 / n, 4)));
    }
    CHECK_THROWS_AS(gregory_weights(4), Error);
}

TEST_CASE("the extension is symmetric on its domain") {
    Rng rng(44);
    double worst = 0, worst_imag = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = rng.integer(1, 6);
        const BoundaryUnitary v(random_unitary(d, rng));
        const auto p1 = make_domain_vector(random_bump(rng), random_vector(rng, d), random_vector(rng, d), v, 256);
        const auto p2 = make_domain_vector(random_bump(rng), random_vector(rng, d), random_vector(rng, d), v, 256);
        const Matrix h1 = apply_extension(p1), h2 = apply_extension(p2);
        const double scale = std::sqrt(std::abs(domain_inner(p1.values, p1.values)) *
                                       std::abs(domain_inner(p2.values, p2.values)));
        worst = std::max(worst, std::abs(domain_inner(h1, p2.values) - domain_inner(p1.values, h2)) / scale);
        worst_imag = std::max(worst_imag, std::abs(domain_inner(h1, p1.values).imag()) /
                                              std::abs(domain_inner(p1.values, p1.values)));
    }
    CHECK(worst < 1e-6);
    CHECK(worst_imag < 1e-6);
}

TEST_CASE("boundary matrices parse from re,im rows") {
    const auto v = parse_boundary_matrix("0,0 1,0\n1,0 0,0\n");
    CHECK(v.dim() == 2);
    CHECK(std::abs(v.matrix()(0, 1) - 1.0) < 1e-15);
    CHECK_THROWS_AS(parse_boundary_matrix("1,0 0,0\n"), Error);
    CHECK_THROWS_AS(parse_boundary_matrix("1;0\n"), Error);
    CHECK_THROWS_AS(parse_boundary_matrix("2,0\n"), Error);
    CHECK_THROWS_AS(parse_boundary_matrix(""), Error);
}
