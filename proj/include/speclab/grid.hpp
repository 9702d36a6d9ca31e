#pragma once

// Sampled functions on the unit square. Samples sit at cell midpoints
// (i + 1/2)/n, so no sample lies on a cube face.

#include <Eigen/Dense>

#include "speclab/types.hpp"

namespace speclab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline double midpoint(int i, int n) { return (i + 0.5) / n; }

/// Complex samples over a uniform midpoint grid on I^2 (rows: x, cols: y).
/// A one-dimensional state has a single column.
class GridState {
public:
    GridState() = default;
    GridState(int nx, int ny) : values_(Matrix::Zero(nx, ny)) {
        if (nx < 1 || ny < 1) throw Error(ErrorKind::InvalidArgument, "empty grid");
    }
    explicit GridState(Matrix values) : values_(std::move(values)) {
        if (!values_.allFinite())
            throw Error(ErrorKind::InvalidArgument, "grid state has non-finite samples");
    }

    template <class F>
    static GridState sample(int nx, int ny, F&& f) {
        GridState g(nx, ny);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                g.values_(i, j) = f(midpoint(i, nx), ny == 1 ? 0.5 : midpoint(j, ny));
        return g;
    }

    int nx() const { return static_cast<int>(values_.rows()); }
    int ny() const { return static_cast<int>(values_.cols()); }
    const Matrix& values() const { return values_; }
    Matrix& values() { return values_; }

    double cell_area() const { return 1.0 / (static_cast<double>(nx()) * ny()); }
    double norm() const { return std::sqrt(values_.squaredNorm() * cell_area()); }

    /// Midpoint-rule <f, g> = sum conj(f) g dA.
    cplx inner(const GridState& other) const {
        check_same_shape(other);
        return values_.conjugate().cwiseProduct(other.values_).sum() * cell_area();
    }

    void check_same_shape(const GridState& other) const {
        if (nx() != other.nx() || ny() != other.ny())
            throw Error(ErrorKind::ArityMismatch, "grid states of different resolution");
    }

private:
    Matrix values_;
};

/// Column j holds samples of e_{low + j + phase} on the n-point midpoint grid.
inline Matrix mode_matrix(int n, int low, int count, double phase) {
    Matrix e(n, count);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < count; ++j) e(i, j) = unit_phase((low + j + phase) * midpoint(i, n));
    return e;
}

/// Modes of a window axis and their sampling matrix.
struct ModeBand {
    int low = 0;
    int count = 1;
    double phase = 0.0;

    int high() const { return low + count - 1; }
    Matrix samples(int n) const { return mode_matrix(n, low, count, phase); }
};

/// Band of n consecutive modes centred on zero: [-n/2, n - n/2 - 1].
inline ModeBand centred_band(int n, double phase) { return {-(n / 2), n, phase}; }

/// State sum_{m,n} c(m,n) e_{m+alpha}(x) e_{n+beta}(y).
inline GridState synthesize(const Matrix& coeffs, const ModeBand& bx, const ModeBand& by,
                            int nx, int ny) {
    if (coeffs.rows() != bx.count || coeffs.cols() != by.count)
        throw Error(ErrorKind::ArityMismatch, "coefficient block does not match bands");
    return GridState(bx.samples(nx) * coeffs * by.samples(ny).transpose());
}

/// Discrete inner products with e_{m+alpha} (x) e_{n+beta}. Exact inverse of
/// synthesize when each band has at most as many modes as samples.
inline Matrix analyze(const GridState& g, const ModeBand& bx, const ModeBand& by) {
    const Matrix ex = bx.samples(g.nx());
    const Matrix ey = by.samples(g.ny());
    return (ex.adjoint() * g.values() * ey.conjugate()) * g.cell_area();
}

}  // namespace speclab
