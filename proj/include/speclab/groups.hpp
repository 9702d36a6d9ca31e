#pragma once

// The induced one-parameter groups U_x(s), U_y(t) on L^2(I^2), realized as an
// exact grid translation with a boundary twist and as a truncated matrix in
// the basis E(m,n) = e_{m+alpha} (x) e_{n+beta}.
//
// Sign convention: (U_x(s) f)(x, .) = f(x + s, .) for x + s < 1 and
// B_x f(x + s - 1, .) otherwise, so that e_{m+phi_n} (x) e_{n+beta} is an
// eigenvector with eigenvalue e^{+i 2 pi (m + phi_n) s}.

#include <cstdio>
#include <functional>

#include <Eigen/Sparse>

#include "speclab/cocycle.hpp"
#include "speclab/grid.hpp"

namespace speclab {

enum class Axis { X = 1, Y = 2 };

/// Coefficients s_k of chi_[0,s) and complements, in the normalization
/// U_x(s)E(m,n) = sum_k e^{i 2 pi (m+alpha+k) s}(s_k^perp + s_k a_n) E(m+k,n).
/// Continuum: s_k = int_0^s e^{-i 2 pi k x} dx, s_0^perp = 1 - s, s_k^perp = -s_k.
struct IndicatorCoefficients {
    double s = 0.0;
    int k_low = 0;
    std::vector<cplx> coeff;
    std::vector<cplx> complement;

    int k_high() const { return k_low + static_cast<int>(coeff.size()) - 1; }
    cplx at(int k) const { return coeff.at(static_cast<std::size_t>(k - k_low)); }
    cplx perp(int k) const { return complement.at(static_cast<std::size_t>(k - k_low)); }
};

inline IndicatorCoefficients indicator_fourier_coeffs(double s, int k_low, int k_high) {
    if (!(s >= 0.0 && s <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "indicator length s=" + std::to_string(s) +
                                                    " outside [0,1]");
    if (k_low > k_high) throw Error(ErrorKind::InvalidArgument, "empty k range");
    IndicatorCoefficients c{s, k_low, {}, {}};
    for (int k = k_low; k <= k_high; ++k) {
        if (k == 0) {
            c.coeff.emplace_back(s);
            c.complement.emplace_back(1.0 - s);
        } else {
            const cplx v = (1.0 - unit_phase(-k * s)) / (I * two_pi * static_cast<double>(k));
            c.coeff.push_back(v);
            c.complement.push_back(-v);
        }
    }
    return c;
}

/// Grid-consistent coefficients for s = J/N on the N-point midpoint grid:
/// s_k = (1/N) sum_{i<J} e^{-i 2 pi k (i+1/2)/N}, complements from the
/// discrete completeness sum. These make the truncated matrix reproduce the
/// grid action exactly when the window spans N modes along the axis.
inline IndicatorCoefficients sampled_indicator_coeffs(int j, int n, int k_low, int k_high) {
    if (n < 1 || j < 0 || j > n)
        throw Error(ErrorKind::InvalidArgument, "sampled indicator needs 0 <= J <= N");
    if (k_low > k_high) throw Error(ErrorKind::InvalidArgument, "empty k range");
    const double s = static_cast<double>(j) / n;
    IndicatorCoefficients c{s, k_low, {}, {}};
    for (int k = k_low; k <= k_high; ++k) {
        cplx v;
        cplx full = 0.0;
        if (k % n == 0) {
            const double sign = ((k / n) % 2 == 0) ? 1.0 : -1.0;
            v = s * sign;
            full = sign;
        } else {
            const cplx r = unit_phase(-static_cast<double>(k) / n);
            v = unit_phase(-0.5 * k / n) * (1.0 - unit_phase(-static_cast<double>(k) * j / n)) /
                (1.0 - r) / static_cast<double>(n);
        }
        c.coeff.push_back(v);
        c.complement.push_back(full - v);
    }
    return c;
}

// Boundary operator acting on lines of samples along the opposite axis:
// B = E diag(d) E^H / n on a band of modes, identity on its discrete
// orthogonal complement (or a dense matrix in place of diag(d)).
struct LineBoundary {
    ModeBand band;
    Matrix op;  // band.count x band.count in the band basis

    static LineBoundary diagonal(const ModeBand& band, const Vector& d) {
        if (d.size() != band.count)
            throw Error(ErrorKind::ArityMismatch, "diagonal does not match band");
        return {band, Matrix(d.asDiagonal())};
    }

    static LineBoundary dense(const ModeBand& band, Matrix m) {
        if (m.rows() != band.count || m.cols() != band.count)
            throw Error(ErrorKind::ArityMismatch, "boundary matrix does not match band");
        return {band, std::move(m)};
    }

    /// Operator on the n-sample line.
    Matrix line_matrix(int n) const {
        if (band.count > n)
            throw Error(ErrorKind::InvalidArgument, "band has more modes than samples");
        const Matrix e = band.samples(n);
        const Matrix p = e * e.adjoint() / static_cast<double>(n);
        return Matrix::Identity(n, n) - p + e * op * e.adjoint() / static_cast<double>(n);
    }
};

/// e^{i 2 pi alpha} diag(a_n) on the centred n-mode band of phase beta (x-axis
/// group), or e^{i 2 pi beta} diag(b_m) on phase alpha (y-axis group).
inline LineBoundary boundary_from_sequences(Axis axis, const PhaseSequenceSet2D& s, double alpha,
                                            double beta, int samples) {
    const bool x = axis == Axis::X;
    const ModeBand band = centred_band(samples, x ? beta : alpha);
    Vector d(band.count);
    for (int j = 0; j < band.count; ++j)
        d(j) = x ? unit_phase(alpha) * s.a(band.low + j) : unit_phase(beta) * s.b(band.low + j);
    return LineBoundary::diagonal(band, d);
}

/// Exact translation by J grid steps along the axis with boundary twist.
inline GridState group_action_grid(const GridState& f, Axis axis, int steps,
                                   const LineBoundary& b) {
    if (steps < 0) throw Error(ErrorKind::InvalidArgument, "negative time");
    // Work with rows as translation index: transpose for the y-axis.
    Matrix v = axis == Axis::X ? f.values() : Matrix(f.values().transpose());
    const auto n = static_cast<int>(v.rows());
    const Matrix line = b.line_matrix(static_cast<int>(v.cols()));
    const Matrix line_t = line.transpose();
    for (int q = 0; q < steps / n; ++q) v = v * line_t;
    const int r = steps % n;
    if (r > 0) {
        Matrix out(v.rows(), v.cols());
        out.topRows(n - r) = v.bottomRows(n - r);
        out.bottomRows(r) = v.topRows(r) * line_t;
        v = std::move(out);
    }
    return GridState(axis == Axis::X ? std::move(v) : Matrix(v.transpose()));
}

/// Maps a grid-commensurate real time to steps; error if not on the grid.
inline int time_to_steps(double t, int n) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative time");
    const double j = t * n;
    const double r = std::round(j);
    if (std::abs(j - r) > 1e-9)
        throw Error(ErrorKind::InvalidArgument,
                    "time " + std::to_string(t) + " is not a multiple of the grid step 1/" +
                        std::to_string(n));
    return static_cast<int>(r);
}

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Matrix over E(m,n), (m,n) in a 2-D window, index (m - m_lo) * Ny + (n - n_lo).
struct TruncatedOperator {
    LatticeWindow window;
    double alpha = 0.0;
    double beta = 0.0;
    SparseMatrix matrix;

    Eigen::Index index(int m, int n) const {
        return static_cast<Eigen::Index>(m - window.low(0)) * window.extent(1) +
               (n - window.low(1));
    }
    Eigen::Index size() const { return matrix.rows(); }
    Vector apply(const Vector& v) const { return matrix * v; }
};

enum class CoefficientMode { Continuum, Sampled };

inline constexpr double leakage_threshold = 1e-6;

/// U_x(s) (axis X, a_n twist) or U_y(t) (axis Y, b_m twist) in the E(m,n)
/// basis. Sampled mode needs the window extent along the axis to equal the
/// grid size and s = J/N; it then reproduces group_action_grid exactly.
inline TruncatedOperator group_matrix_spectral(Axis axis, double s,
                                               const PhaseSequenceSet2D& seqs, double alpha,
                                               double beta, const LatticeWindow& window,
                                               CoefficientMode mode = CoefficientMode::Continuum,
                                               int grid_n = 0) {
    seqs.validate();
    if (window.arity() != 2) throw Error(ErrorKind::ArityMismatch, "E(m,n) window must be 2-D");
    const std::size_t ax = axis == Axis::X ? 0 : 1;
    const int ext = window.extent(ax);
    IndicatorCoefficients c;
    if (mode == CoefficientMode::Sampled) {
        if (grid_n != ext)
            throw Error(ErrorKind::InvalidArgument,
                        "sampled coefficients need window extent " + std::to_string(ext) +
                            " equal to the grid size " + std::to_string(grid_n));
        c = sampled_indicator_coeffs(time_to_steps(s, grid_n), grid_n, -(ext - 1), ext - 1);
    } else {
        c = indicator_fourier_coeffs(s, -(ext - 1), ext - 1);
    }
    const double phase = axis == Axis::X ? alpha : beta;

    TruncatedOperator op{window, alpha, beta, {}};
    const auto dim = static_cast<Eigen::Index>(window.cardinality());
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(ext));
    double worst_leak = 0.0;
    for (int m = window.low(0); m <= window.high(0); ++m)
        for (int n = window.low(1); n <= window.high(1); ++n) {
            const int own = axis == Axis::X ? m : n;
            const cplx twist = axis == Axis::X ? seqs.a(n) : seqs.b(m);
            const auto col = op.index(m, n);
            double mass = 0.0;
            for (int o = window.low(ax); o <= window.high(ax); ++o) {
                const int k = o - own;
                const cplx v = unit_phase((own + phase + k) * s) * (c.perp(k) + c.at(k) * twist);
                mass += std::norm(v);
                if (v != 0.0)
                    trip.emplace_back(axis == Axis::X ? op.index(o, n) : op.index(m, o), col, v);
            }
            worst_leak = std::max(worst_leak, 1.0 - mass);
        }
    if (mode == CoefficientMode::Continuum && worst_leak > leakage_threshold)
        throw Error(ErrorKind::Truncation,
                    "truncation leakage " + std::to_string(worst_leak) + " exceeds " +
                        std::to_string(leakage_threshold) + "; enlarge the window");
    op.matrix.resize(dim, dim);
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    return op;
}

/// Coefficient vector over the window -> samples on an nx x ny grid.
inline GridState to_grid(const Vector& coeffs, const LatticeWindow& window, double alpha,
                         double beta, int nx, int ny) {
    if (coeffs.size() != window.cardinality())
        throw Error(ErrorKind::ArityMismatch, "coefficient vector does not match window");
    Matrix c(window.extent(0), window.extent(1));
    for (int i = 0; i < window.extent(0); ++i)
        for (int j = 0; j < window.extent(1); ++j)
            c(i, j) = coeffs(static_cast<Eigen::Index>(i) * window.extent(1) + j);
    return synthesize(c, {window.low(0), window.extent(0), alpha},
                      {window.low(1), window.extent(1), beta}, nx, ny);
}

/// Unit-norm random states plus every basis state with |m|,|n| <= basis_radius.
inline std::vector<Vector> probe_set(const LatticeWindow& window, Rng& rng, int random_count,
                                     int basis_radius) {
    const auto dim = static_cast<Eigen::Index>(window.cardinality());
    std::vector<Vector> out;
    for (int p = 0; p < random_count; ++p) {
        Vector v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
        out.push_back(v / v.norm());
    }
    for (int m = -basis_radius; m <= basis_radius; ++m)
        for (int n = -basis_radius; n <= basis_radius; ++n) {
            if (!window.contains(0, m) || !window.contains(1, n)) continue;
            Vector v = Vector::Zero(dim);
            v(static_cast<Eigen::Index>(m - window.low(0)) * window.extent(1) + (n - window.low(1))) = 1.0;
            out.push_back(std::move(v));
        }
    return out;
}

/// max_p ||A B p - B A p|| / ||p|| for any pair of linear maps on a common
/// state type with a norm() member.
template <class State, class A, class B>
double commutator_norm(const A& ua, const B& ub, std::span<const State> probes) {
    if (probes.empty()) throw Error(ErrorKind::InvalidArgument, "commutator needs probes");
    double worst = 0.0;
    for (const auto& p : probes) {
        const State ab = ua(ub(p));
        const State ba = ub(ua(p));
        const double np = p.norm();
        if (np == 0.0) throw Error(ErrorKind::InvalidArgument, "zero probe");
        if constexpr (std::is_same_v<State, GridState>) {
            worst = std::max(worst, GridState(ab.values() - ba.values()).norm() / np);
        } else {
            worst = std::max(worst, (ab - ba).norm() / np);
        }
    }
    return worst;
}

inline double commutator_norm(const TruncatedOperator& ux, const TruncatedOperator& uy,
                              std::span<const Vector> probes) {
    if (ux.size() != uy.size())
        throw Error(ErrorKind::ArityMismatch, "operators on different truncations");
    return commutator_norm<Vector>([&](const Vector& v) -> Vector { return ux.apply(v); },
                                   [&](const Vector& v) -> Vector { return uy.apply(v); },
                                   probes);
}

struct EigenSample {
    int steps = 0;  // s = steps / grid size
    int m = 0;
    int n = 0;
};

struct EigenrelationReport {
    double max_residual = 0.0;
};

/// Applies the grid action to e_{m+phi_n} (x) e_{n+beta}, B = diag(e^{i 2 pi
/// phi_n}) on the centred band of phase beta, and measures
/// ||U f - e^{i 2 pi (m + phi_n + offset) s} f|| / ||f||.
inline EigenrelationReport eigenrelation_check(const PhaseFunction& phi, double beta,
                                               std::span<const EigenSample> samples, int grid_n,
                                               double eigenvalue_offset = 0.0) {
    const ModeBand band = centred_band(grid_n, beta);
    Vector d(band.count);
    for (int j = 0; j < band.count; ++j) d(j) = phi(band.low + j);
    const LineBoundary b = LineBoundary::diagonal(band, d);
    EigenrelationReport rep;
    for (const auto& smp : samples) {
        const double ph = std::arg(phi(smp.n)) / two_pi;
        const double lx = smp.m + ph;
        const double ly = smp.n + beta;
        const GridState f = GridState::sample(
            grid_n, grid_n, [&](double x, double y) { return unit_phase(lx * x + ly * y); });
        const GridState u = group_action_grid(f, Axis::X, smp.steps, b);
        const double s = static_cast<double>(smp.steps) / grid_n;
        const Matrix diff = u.values() - unit_phase((lx + eigenvalue_offset) * s) * f.values();
        rep.max_residual = std::max(rep.max_residual, GridState(diff).norm() / f.norm());
    }
    return rep;
}

struct SweepRow {
    double s = 0.0;
    double t = 0.0;
    double norm = 0.0;
};

inline std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out = "s,t,commutator_norm\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6e\n", r.s, r.t, r.norm);
        out += buf;
    }
    return out;
}

}  // namespace speclab
