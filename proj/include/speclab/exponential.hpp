#pragma once

// F_Omega(z) = int_Omega e^{i 2 pi z.x} dx, zero-set membership, Gram
// matrices of exponentials, completeness ratios and the unit-circle scan.

#include <algorithm>
#include <optional>

#include "speclab/grid.hpp"
#include "speclab/spectrum.hpp"

namespace speclab {

namespace detail {

/// sin(pi z)/(pi z), equal to 1 at z = 0.
inline cplx sinc_pi(cplx z) {
    const cplx w = pi * z;
    if (std::abs(w) < 1e-4) return 1.0 - w * w / 6.0 + w * w * w * w / 120.0;
    return std::sin(w) / w;
}

/// (e^w - 1)/w, equal to 1 at w = 0.
inline cplx expm1_over(cplx w) {
    if (std::abs(w) < 1e-4) return 1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0;
    return (std::exp(w) - 1.0) / w;
}

}  // namespace detail

inline cplx eval_F_omega(const DomainSpec& domain, std::span<const cplx> z) {
    if (static_cast<int>(z.size()) != domain.dimension())
        throw Error(ErrorKind::ArityMismatch,
                    "F_Omega argument of arity " + std::to_string(z.size()) +
                        " for a domain of dimension " + std::to_string(domain.dimension()));
    if (domain.is_cube()) {
        cplx f = 1.0;
        for (const cplx& zj : z) f *= std::exp(I * pi * zj) * detail::sinc_pi(zj);
        return f;
    }
    cplx f = 0.0;
    for (const auto& [a, b] : std::get<IntervalUnion>(domain.variant()).intervals)
        f += std::exp(I * two_pi * z[0] * a) * (b - a) *
             detail::expm1_over(I * two_pi * z[0] * (b - a));
    return f;
}

inline cplx eval_F_omega(const DomainSpec& domain, std::span<const double> x) {
    std::vector<cplx> z(x.begin(), x.end());
    return eval_F_omega(domain, std::span<const cplx>(z));
}

/// Membership in the zero set of F for the cube: z != 0 and some coordinate
/// is a nonzero integer.
inline bool in_zero_set_cube(int d, std::span<const cplx> z, double tol) {
    if (static_cast<int>(z.size()) != d) return false;
    double norm = 0;
    for (const auto& zj : z) norm = std::max(norm, std::abs(zj));
    if (norm < tol) return false;
    for (const auto& zj : z) {
        const double r = std::round(zj.real());
        if (r != 0.0 && std::abs(zj.real() - r) < tol && std::abs(zj.imag()) < tol) return true;
    }
    return false;
}

inline bool in_zero_set_cube(int d, std::span<const double> x, double tol) {
    std::vector<cplx> z(x.begin(), x.end());
    return in_zero_set_cube(d, std::span<const cplx>(z), tol);
}

struct GramMatrix {
    Matrix entries;
    std::vector<Point> labels;
    DomainSpec domain;

    double hermitian_defect() const { return (entries - entries.adjoint()).cwiseAbs().maxCoeff(); }
};

/// G(j,k) = <e_{lambda_j}, e_{lambda_k}> = F(lambda_k - lambda_j).
inline GramMatrix gram_matrix(const DomainSpec& domain, std::span<const Point> points) {
    if (points.empty()) throw Error(ErrorKind::InvalidArgument, "Gram matrix of no points");
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto d = static_cast<std::size_t>(domain.dimension());
    for (const auto& p : points)
        if (p.size() != d)
            throw Error(ErrorKind::ArityMismatch, "spectrum point arity does not match domain");
    Matrix g(n, n);
    std::vector<double> diff(d);
    for (Eigen::Index j = 0; j < n; ++j) {
        g(j, j) = domain.measure();
        for (Eigen::Index k = j + 1; k < n; ++k) {
            for (std::size_t a = 0; a < d; ++a)
                diff[a] = points[static_cast<std::size_t>(k)][a] -
                          points[static_cast<std::size_t>(j)][a];
            g(j, k) = eval_F_omega(domain, std::span<const double>(diff));
            g(k, j) = std::conj(g(j, k));
        }
    }
    return {std::move(g), std::vector<Point>(points.begin(), points.end()), domain};
}

struct OrthogonalityReport {
    bool is_orthogonal = true;
    double worst_offdiag = 0.0;
    std::optional<std::pair<Point, Point>> witness;
    GramMatrix gram;
};

inline OrthogonalityReport orthogonality_verdict(const DomainSpec& domain,
                                                 const SpectrumSpec& spec,
                                                 const LatticeWindow& window, double tol) {
    const auto points = enumerate_spectrum(spec, window);
    OrthogonalityReport r{true, 0.0, std::nullopt, gram_matrix(domain, points)};
    const auto& g = r.gram.entries;
    Eigen::Index wj = -1, wk = -1;
    for (Eigen::Index j = 0; j < g.rows(); ++j)
        for (Eigen::Index k = j + 1; k < g.cols(); ++k)
            if (std::abs(g(j, k)) > r.worst_offdiag) {
                r.worst_offdiag = std::abs(g(j, k));
                wj = j;
                wk = k;
            }
    r.is_orthogonal = r.worst_offdiag < tol;
    if (!r.is_orthogonal)
        r.witness = std::pair{points[static_cast<std::size_t>(wj)],
                              points[static_cast<std::size_t>(wk)]};
    return r;
}

/// Ratio reported as "complete" at or above this value. Heuristic only: the
/// totality statement is a limit and a finite window never decides it.
inline constexpr double completeness_plateau = 0.95;

struct CompletenessReport {
    std::vector<double> parseval_ratio;  // one per test function
};

/// sum_{lambda in window} |<e_lambda, f>|^2 / (||f||^2 |Omega|), by midpoint
/// quadrature on the grid of each test function. Unit cubes of dimension 1
/// (single-column states) and 2.
inline CompletenessReport completeness_probe(const DomainSpec& domain, const SpectrumSpec& spec,
                                             const LatticeWindow& window,
                                             std::span<const GridState> test_functions) {
    if (!domain.is_cube() || domain.dimension() > 2)
        throw Error(ErrorKind::InvalidArgument,
                    "completeness probe supports unit cubes of dimension 1 and 2");
    const int d = domain.dimension();
    const auto points = enumerate_spectrum(spec, window);
    CompletenessReport rep;
    for (const auto& f : test_functions) {
        if (d == 1 && f.ny() != 1)
            throw Error(ErrorKind::ArityMismatch, "1-D probe needs single-column states");
        const double nf = f.norm();
        if (nf == 0.0) throw Error(ErrorKind::InvalidArgument, "zero-norm test function");
        // <e_lambda, f> = sum_i conj(e_{l1}(x_i)) * [sum_j f_ij conj(e_{l2}(y_j))]
        Eigen::VectorXcd ey(f.ny());
        Eigen::RowVectorXcd row(f.nx());
        double total = 0;
        std::map<double, Eigen::RowVectorXcd> by_first;  // sum_i conj(e_{l1}(x_i)) f_ij
        for (const auto& p : points) {
            auto it = by_first.find(p[0]);
            if (it == by_first.end()) {
                for (int i = 0; i < f.nx(); ++i) row(i) = std::conj(unit_phase(p[0] * midpoint(i, f.nx())));
                it = by_first.emplace(p[0], row * f.values()).first;
            }
            cplx c;
            if (d == 1) {
                c = it->second(0);
            } else {
                for (int j = 0; j < f.ny(); ++j) ey(j) = std::conj(unit_phase(p[1] * midpoint(j, f.ny())));
                c = (it->second * ey)(0);
            }
            c *= f.cell_area();
            total += std::norm(c);
        }
        rep.parseval_ratio.push_back(total / (nf * nf * domain.measure()));
    }
    return rep;
}

struct RootScanReport {
    double min_modulus = 0.0;
    double argmin_angle = 0.0;
};

/// Minimum of |p(z)| over |z| = 1 for p(z) = sum_k c_k z^k. Coarse equispaced
/// sampling, then golden-section refinement around each of the smallest
/// coarse local minima.
inline RootScanReport unit_circle_root_scan(std::span<const cplx> coefficients, int samples) {
    if (coefficients.empty()) throw Error(ErrorKind::InvalidArgument, "empty polynomial");
    if (samples < 16) throw Error(ErrorKind::InvalidArgument, "root scan needs >= 16 samples");
    auto modulus = [&](double theta) {
        const cplx z = std::polar(1.0, theta);
        cplx acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * z + *it;
        return std::abs(acc);
    };
    const double step = two_pi / samples;
    std::vector<double> coarse(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) coarse[static_cast<std::size_t>(i)] = modulus(i * step);

    std::vector<int> minima;
    for (int i = 0; i < samples; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double prev = coarse[static_cast<std::size_t>((i + samples - 1) % samples)];
        const double next = coarse[static_cast<std::size_t>((i + 1) % samples)];
        if (coarse[u] <= prev && coarse[u] <= next) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(), [&](int a, int b) {
        return coarse[static_cast<std::size_t>(a)] < coarse[static_cast<std::size_t>(b)];
    });
    if (minima.size() > 8) minima.resize(8);

    RootScanReport best{std::numeric_limits<double>::infinity(), 0.0};
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i : minima) {
        double a = (i - 1) * step, b = (i + 1) * step;
        double c = b - g * (b - a), e = a + g * (b - a);
        double fc = modulus(c), fe = modulus(e);
        for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
            if (fc < fe) {
                b = e; e = c; fe = fc;
                c = b - g * (b - a); fc = modulus(c);
            } else {
                a = c; c = e; fc = fe;
                e = a + g * (b - a); fe = modulus(e);
            }
        }
        const double theta = 0.5 * (a + b);
        const double v = std::min({modulus(theta), coarse[static_cast<std::size_t>(i)]});
        if (v < best.min_modulus) {
            best.min_modulus = v;
            best.argmin_angle = std::fmod(theta + two_pi, two_pi);
        }
    }
    return best;
}

}  // namespace speclab
