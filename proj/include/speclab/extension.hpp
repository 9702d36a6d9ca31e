#pragma once

// Boundary unitaries V on a truncated cross-section, the fractional linear
// transform W_V = (eI + V)(I + eV)^{-1} and its inverse, and domain vectors
//   psi(x, .) = phi(x, .) + e^{x} h + e^{1-x} V h
// sampled on x nodes i/(n-1), i = 0..n-1, with cross-section coefficients in
// the columns.

#include <sstream>
#include <string_view>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "speclab/grid.hpp"

namespace speclab {

inline constexpr double euler_e = std::numbers::e;
inline constexpr double max_condition = 1e8;

class BoundaryUnitary {
public:
    explicit BoundaryUnitary(Matrix m, double tol = 1e-10) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw Error(ErrorKind::InvalidArgument, "boundary unitary must be square and nonempty");
        const double defect = unitarity_defect(m_);
        if (defect >= tol)
            throw Error(ErrorKind::InvalidArgument,
                        "boundary matrix is not unitary: ||V*V - I|| = " + std::to_string(defect));
    }

    static BoundaryUnitary diagonal(std::span<const double> turns) {
        Vector d(static_cast<Eigen::Index>(turns.size()));
        for (std::size_t i = 0; i < turns.size(); ++i) d(static_cast<Eigen::Index>(i)) = unit_phase(turns[i]);
        return BoundaryUnitary(Matrix(d.asDiagonal()));
    }

    static double unitarity_defect(const Matrix& m) {
        return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).norm();
    }

    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    Matrix m_;
};

namespace detail {

/// Solve A X = B by pivoted LU, refusing ill-conditioned A.
inline Matrix guarded_solve(const Matrix& a, const Matrix& b, const char* what) {
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 1.0 / max_condition))
        throw Error(ErrorKind::Singular, std::string(what) + " is numerically singular (rcond " +
                                             std::to_string(rc) + ")");
    return lu.solve(b);
}

}  // namespace detail

/// (eI + V)(I + eV)^{-1}; the two factors commute, so the solve is taken on
/// the left.
inline Matrix cayley_forward(const BoundaryUnitary& v) {
    const Matrix& m = v.matrix();
    const Matrix id = Matrix::Identity(m.rows(), m.cols());
    return detail::guarded_solve(id + euler_e * m, euler_e * id + m, "I + eV");
}

/// (I - eW)^{-1}(W - eI)
inline Matrix cayley_inverse(const Matrix& w) {
    if (w.rows() != w.cols() || w.rows() == 0)
        throw Error(ErrorKind::InvalidArgument, "cayley_inverse needs a square matrix");
    const Matrix id = Matrix::Identity(w.rows(), w.cols());
    return detail::guarded_solve(id - euler_e * w, w - euler_e * id, "I - eW");
}

/// exp(W); provided for inspection, not used as the boundary map.
inline Matrix exp_boundary(const Matrix& w) { return w.exp(); }

/// Haar-distributed unitary: QR of a complex Gaussian matrix, column phases
/// fixed by the diagonal of R.
inline Matrix random_unitary(int n, Rng& rng) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "unitary dimension must be >= 1");
    Matrix z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

/// exp(-1/(1 - r^2)) with r = (x - center)/width, zero for |r| >= 1.
struct BumpProfile {
    double center = 0.5;
    double width = 0.25;

    void validate() const {
        if (!(width > 0) || center - width <= 0.0 || center + width >= 1.0)
            throw Error(ErrorKind::InvalidArgument, "bump support must lie inside (0,1)");
    }

    double operator()(double x) const {
        const double r = (x - center) / width;
        if (std::abs(r) >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - r * r));
    }
};

inline double node(int i, int n) { return static_cast<double>(i) / (n - 1); }

struct DomainVector {
    Matrix smooth;  // phi samples, rows: x nodes
    Vector h;
    Vector vh;
    Matrix values;  // psi samples

    int nodes() const { return static_cast<int>(values.rows()); }
    Eigen::Index cross_dim() const { return values.cols(); }
};

/// psi = bump(x) g + e^{x} h + e^{1-x} V h on n nodes.
inline DomainVector make_domain_vector(const BumpProfile& bump, const Vector& g, const Vector& h,
                                       const BoundaryUnitary& v, int nodes) {
    if (h.size() != v.dim() || g.size() != v.dim())
        throw Error(ErrorKind::ArityMismatch,
                    "defect vector of size " + std::to_string(h.size()) +
                        " for a boundary unitary of size " + std::to_string(v.dim()));
    if (nodes < 8) throw Error(ErrorKind::InvalidArgument, "need at least 8 x nodes");
    bump.validate();
    DomainVector d;
    d.h = h;
    d.vh = v.matrix() * h;
    d.smooth = Matrix(nodes, v.dim());
    d.values = Matrix(nodes, v.dim());
    for (int i = 0; i < nodes; ++i) {
        const double x = node(i, nodes);
        d.smooth.row(i) = bump(x) * g.transpose();
        d.values.row(i) = d.smooth.row(i) + std::exp(x) * h.transpose() + std::exp(1.0 - x) * d.vh.transpose();
    }
    return d;
}

/// ||psi(1) - W_V psi(0)|| in the cross-section coefficients.
inline double boundary_condition_residual(const DomainVector& psi, const BoundaryUnitary& v) {
    const Matrix w = cayley_forward(v);
    const Vector first = psi.values.row(0).transpose();
    const Vector last = psi.values.row(psi.nodes() - 1).transpose();
    return (last - w * first).norm();
}

namespace detail {

/// Sixth-order centred first derivative; phi is extended by zero past the
/// ends, which is exact for a profile compactly supported inside (0,1).
inline Matrix derivative_compact(const Matrix& f, double h) {
    static constexpr double c[3] = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
    const auto n = f.rows();
    Matrix d = Matrix::Zero(n, f.cols());
    auto at = [&](Eigen::Index i) -> Eigen::RowVectorXcd {
        if (i < 0 || i >= n) return Eigen::RowVectorXcd::Zero(f.cols());
        return f.row(i);
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (int k = 1; k <= 3; ++k) d.row(i) += c[k - 1] * (at(i + k) - at(i - k));
    return d / h;
}

}  // namespace detail

/// H psi = (1/i)(phi' + e^{x} h - e^{1-x} V h), i.e. -i d/dx on the domain.
inline Matrix apply_extension(const DomainVector& psi) {
    const int n = psi.nodes();
    Matrix out = detail::derivative_compact(psi.smooth, 1.0 / (n - 1));
    for (int i = 0; i < n; ++i) {
        const double x = node(i, n);
        out.row(i) += std::exp(x) * psi.h.transpose() - std::exp(1.0 - x) * psi.vh.transpose();
    }
    return out / I;
}

/// Extended trapezoid weights with O(h^4) end corrections (3/8, 7/6, 23/24).
inline Eigen::VectorXd gregory_weights(int n) {
    if (n < 8) throw Error(ErrorKind::InvalidArgument, "quadrature needs at least 8 nodes");
    Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    const double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (int k = 0; k < 3; ++k) {
        w(k) = ends[k];
        w(n - 1 - k) = ends[k];
    }
    return w / (n - 1);
}

/// <f, g> = int_0^1 sum_j conj(f_j(x)) g_j(x) dx on the node grid.
inline cplx domain_inner(const Matrix& f, const Matrix& g) {
    if (f.rows() != g.rows() || f.cols() != g.cols())
        throw Error(ErrorKind::ArityMismatch, "inner product of differently shaped samples");
    const Eigen::VectorXd w = gregory_weights(static_cast<int>(f.rows()));
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) acc += w(i) * f.row(i).dot(g.row(i));  // conjugate-linear in f
    return acc;
}

/// Rows of whitespace-separated "re,im" entries.
inline BoundaryUnitary parse_boundary_matrix(std::string_view text, double tol = 1e-10) {
    std::vector<std::vector<cplx>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<cplx> row;
        while (ls >> tok) {
            const auto comma = tok.find(',');
            if (comma == std::string::npos)
                throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": entry '" + tok +
                                                  "' is not re,im");
            try {
                std::size_t p1 = 0, p2 = 0;
                const double re = std::stod(tok.substr(0, comma), &p1);
                const double im = std::stod(tok.substr(comma + 1), &p2);
                if (p1 != comma || p2 != tok.size() - comma - 1) throw std::invalid_argument(tok);
                row.emplace_back(re, im);
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::Parse,
                            "line " + std::to_string(lineno) + ": bad number in '" + tok + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorKind::Parse, "empty boundary matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
            throw Error(ErrorKind::Parse, "boundary matrix row " + std::to_string(i + 1) +
                                              " does not have " + std::to_string(n) + " entries");
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return BoundaryUnitary(std::move(m), tol);
}

}  // namespace speclab
