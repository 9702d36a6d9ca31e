#pragma once

// Cocycle identities for boundary eigenvalue sequences (d = 2) and
// eigenvalue functions on Z^{d-1} (d >= 3), classification of the planar
// case, and the quasi-commutativity test on boundary operators.
//
// All verdicts are relative to a finite window: an identity quantified over
// Z is checked for every in-window index and every nonzero in-window shift.

#include <functional>
#include <optional>

#include "speclab/exponential.hpp"
#include "speclab/grid.hpp"

namespace speclab {

inline constexpr double unit_modulus_slack = 1e-6;
inline constexpr std::size_t max_witnesses = 10;

/// Snap a value within slack of the unit circle onto it; reject anything else.
inline cplx enforce_unit(cplx v) {
    const double r = std::abs(v);
    if (std::abs(r - 1.0) > unit_modulus_slack)
        throw Error(ErrorKind::InvalidArgument,
                    "value of modulus " + std::to_string(r) + " is not unimodular");
    return v / r;
}

/// Unimodular function on Z^arity: table plus default, or a callable.
class PhaseFunction {
public:
    PhaseFunction() : PhaseFunction(1) {}
    explicit PhaseFunction(std::size_t arity, cplx fallback = 1.0,
                           std::map<IntTuple, cplx> table = {})
        : arity_(arity), fallback_(enforce_unit(fallback)) {
        for (auto& [k, v] : table) {
            if (k.size() != arity_)
                throw Error(ErrorKind::ArityMismatch, "phase table key of wrong arity");
            table_.emplace(k, enforce_unit(v));
        }
    }

    static PhaseFunction from_angles(std::size_t arity, double fallback_turns,
                                     const std::map<IntTuple, double>& turns) {
        std::map<IntTuple, cplx> t;
        for (const auto& [k, a] : turns) t.emplace(k, unit_phase(a));
        return PhaseFunction(arity, unit_phase(fallback_turns), std::move(t));
    }

    static PhaseFunction from_callable(std::size_t arity,
                                       std::function<cplx(const IntTuple&)> f) {
        PhaseFunction p(arity);
        p.callable_ = std::move(f);
        return p;
    }

    std::size_t arity() const { return arity_; }

    cplx operator()(const IntTuple& k) const {
        if (callable_) return enforce_unit(callable_(k));
        if (auto it = table_.find(k); it != table_.end()) return it->second;
        return fallback_;
    }
    cplx operator()(int k) const { return (*this)(IntTuple{k}); }

    const std::map<IntTuple, cplx>& table() const { return table_; }
    cplx fallback() const { return fallback_; }
    bool has_callable() const { return static_cast<bool>(callable_); }

private:
    std::size_t arity_;
    cplx fallback_;
    std::map<IntTuple, cplx> table_;
    std::function<cplx(const IntTuple&)> callable_;
};

/// a_n (eigenvalues of the y-boundary, relative to the x basis phase) and
/// b_m (eigenvalues of the x-boundary, relative to the y basis phase) on a
/// window of (m, n) indices.
struct PhaseSequenceSet2D {
    PhaseFunction a{1};
    PhaseFunction b{1};
    LatticeWindow window;  // axis 0: m, axis 1: n

    void validate() const {
        if (window.arity() != 2)
            throw Error(ErrorKind::ArityMismatch, "planar phase sequences need a 2-D window");
        if (a.arity() != 1 || b.arity() != 1)
            throw Error(ErrorKind::ArityMismatch, "phase sequences are functions of one index");
    }
};

struct CocycleWitness {
    std::string identity;   // which product failed
    IntTuple index;         // base multi-index
    int shift = 0;
    int shift_axis = 0;
    double modulus = 0.0;
};

struct CocycleReport {
    bool holds = true;
    double worst = 0.0;
    std::vector<CocycleWitness> witnesses;

    void record(CocycleWitness w, double tol) {
        worst = std::max(worst, w.modulus);
        if (w.modulus >= tol) {
            holds = false;
            if (witnesses.size() < max_witnesses) witnesses.push_back(std::move(w));
        }
    }
};

/// (b_m - b_{m+k})(1 - a_n) = 0 and (a_n - a_{n+l})(1 - b_m) = 0.
inline CocycleReport check_cocycle_2d(const PhaseSequenceSet2D& s, double tol) {
    s.validate();
    const auto& w = s.window;
    if (w.extent(0) < 2 && w.extent(1) < 2)
        throw Error(ErrorKind::InvalidArgument, "window admits no nonzero shift");
    CocycleReport r;
    for (int m = w.low(0); m <= w.high(0); ++m)
        for (int n = w.low(1); n <= w.high(1); ++n) {
            const cplx am = s.a(n), bm = s.b(m);
            for (int m2 = w.low(0); m2 <= w.high(0); ++m2) {
                if (m2 == m) continue;
                r.record({"(b_m - b_{m+k})(1 - a_n)", {m, n}, m2 - m, 0,
                          std::abs((bm - s.b(m2)) * (1.0 - am))},
                         tol);
            }
            for (int n2 = w.low(1); n2 <= w.high(1); ++n2) {
                if (n2 == n) continue;
                r.record({"(a_n - a_{n+l})(1 - b_m)", {m, n}, n2 - n, 1,
                          std::abs((am - s.a(n2)) * (1.0 - bm))},
                         tol);
            }
        }
    return r;
}

/// (1 - b_{m+k})(1 - a_n) = (1 - b_m)(1 - a_{n+l}) for nonzero k, l.
inline bool check_single_identity_2d(const PhaseSequenceSet2D& s, double tol) {
    s.validate();
    const auto& w = s.window;
    if (w.extent(0) < 2 || w.extent(1) < 2)
        throw Error(ErrorKind::InvalidArgument, "single identity needs shifts on both axes");
    for (int m = w.low(0); m <= w.high(0); ++m)
        for (int m2 = w.low(0); m2 <= w.high(0); ++m2) {
            if (m2 == m) continue;
            for (int n = w.low(1); n <= w.high(1); ++n)
                for (int n2 = w.low(1); n2 <= w.high(1); ++n2) {
                    if (n2 == n) continue;
                    const cplx lhs = (1.0 - s.b(m2)) * (1.0 - s.a(n));
                    const cplx rhs = (1.0 - s.b(m)) * (1.0 - s.a(n2));
                    if (std::abs(lhs - rhs) >= tol) return false;
                }
        }
    return true;
}

enum class PlanarClass { ClassI, ClassII, Lattice, NonCommuting };

inline const char* to_string(PlanarClass c) {
    switch (c) {
        case PlanarClass::ClassI: return "ClassI";
        case PlanarClass::ClassII: return "ClassII";
        case PlanarClass::Lattice: return "Lattice";
        case PlanarClass::NonCommuting: return "NonCommuting";
    }
    return "?";
}

/// ClassI: a == 1 (spectrum (alpha + m, beta_m + n)); ClassII: b == 1.
inline PlanarClass classify_2d(const PhaseSequenceSet2D& s, double tol) {
    if (!check_cocycle_2d(s, tol).holds) return PlanarClass::NonCommuting;
    const auto& w = s.window;
    bool a_one = true, b_one = true;
    for (int n = w.low(1); n <= w.high(1); ++n) a_one = a_one && std::abs(1.0 - s.a(n)) < tol;
    for (int m = w.low(0); m <= w.high(0); ++m) b_one = b_one && std::abs(1.0 - s.b(m)) < tol;
    double worst = 0;
    for (int m = w.low(0); m <= w.high(0); ++m)
        for (int n = w.low(1); n <= w.high(1); ++n)
            worst = std::max(worst, std::abs((1.0 - s.a(n)) * (1.0 - s.b(m))));
    if (worst >= tol)
        throw Error(ErrorKind::Inconsistent,
                    "cocycle identities hold but (1 - a_n)(1 - b_m) = " + std::to_string(worst) +
                        " is not zero; a constant boundary phase belongs in (alpha, beta)");
    if (a_one && b_one) return PlanarClass::Lattice;
    return a_one ? PlanarClass::ClassI : PlanarClass::ClassII;
}

/// Eigenvalue functions v_j on Z^{d-1} (coordinate j omitted) and the basis
/// phases they are eigenvalues for.
struct EigenvalueFunctionSet {
    std::size_t dimension = 3;
    std::vector<PhaseFunction> v;
    Point phases;

    void validate() const {
        if (v.size() != dimension || phases.size() != dimension)
            throw Error(ErrorKind::ArityMismatch, "need one eigenvalue function per axis");
        for (const auto& f : v)
            if (f.arity() + 1 != dimension)
                throw Error(ErrorKind::ArityMismatch, "eigenvalue functions take d-1 indices");
    }
};

namespace detail {
inline IntTuple omit(const IntTuple& n, std::size_t j) {
    IntTuple out;
    out.reserve(n.size() - 1);
    for (std::size_t a = 0; a < n.size(); ++a)
        if (a != j) out.push_back(n[a]);
    return out;
}
}  // namespace detail

/// For every pair j < k: shifts along k of v_j times (1 - v_k), and shifts
/// along j of v_k times (1 - v_j).
inline CocycleReport check_cocycle_highdim(const EigenvalueFunctionSet& f,
                                           const LatticeWindow& window, double tol) {
    if (f.dimension < 3)
        throw Error(ErrorKind::InvalidArgument,
                    "dimension " + std::to_string(f.dimension) +
                        " < 3: use check_cocycle_2d for planar sequences");
    f.validate();
    if (window.arity() != f.dimension)
        throw Error(ErrorKind::ArityMismatch, "window arity must equal the dimension");
    const std::size_t d = f.dimension;
    CocycleReport r;
    window.for_each([&](const IntTuple& n) {
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = j + 1; k < d; ++k) {
                const cplx vj = f.v[j](detail::omit(n, j));
                const cplx vk = f.v[k](detail::omit(n, k));
                IntTuple shifted = n;
                for (int x = window.low(k); x <= window.high(k); ++x) {
                    if (x == n[k]) continue;
                    shifted[k] = x;
                    r.record({"(v_" + std::to_string(j + 1) + "(n + l e_" + std::to_string(k + 1) +
                                  ") - v_" + std::to_string(j + 1) + "(n))(1 - v_" +
                                  std::to_string(k + 1) + "(n))",
                              n, x - n[k], static_cast<int>(k),
                              std::abs((f.v[j](detail::omit(shifted, j)) - vj) * (1.0 - vk))},
                             tol);
                }
                shifted[k] = n[k];
                for (int x = window.low(j); x <= window.high(j); ++x) {
                    if (x == n[j]) continue;
                    shifted[j] = x;
                    r.record({"(v_" + std::to_string(k + 1) + "(n + m e_" + std::to_string(j + 1) +
                                  ") - v_" + std::to_string(k + 1) + "(n))(1 - v_" +
                                  std::to_string(j + 1) + "(n))",
                              n, x - n[j], static_cast<int>(j),
                              std::abs((f.v[k](detail::omit(shifted, k)) - vk) * (1.0 - vj))},
                             tol);
                }
            }
    });
    return r;
}

/// v_23 == 1, v_13(k, m) = e^{i 2 pi beta(k)}, v_12(k, l) = e^{i 2 pi gamma(k, l)}.
/// The l in v_12 labels the mode beta(k) + l, the m in v_13 any x3 mode.
inline EigenvalueFunctionSet eigenfunctions_from_tower3d(const Tower3D& t) {
    EigenvalueFunctionSet f;
    f.dimension = 3;
    f.phases = {0.0, 0.0, 0.0};
    f.v.push_back(PhaseFunction(2, 1.0));
    f.v.push_back(PhaseFunction::from_callable(
        2, [beta = t.beta](const IntTuple& km) { return unit_phase(beta(km[0])); }));
    f.v.push_back(PhaseFunction::from_callable(
        2, [gamma = t.gamma](const IntTuple& kl) { return unit_phase(gamma(kl)); }));
    return f;
}

// Boundary operators as finite-rank perturbations of a scalar:
//   V = c I + sum_r w_r (Q_r^1 (x) ... (x) Q_r^{d-1}),
// each slot factor Q either the identity or the projection onto one
// exponential e_f of L^2(I). Every matrix element in a shifted product
// Fourier basis is then available in closed form.

struct SlotFactor {
    std::optional<double> frequency;  // nullopt: identity on this slot
};

struct RankTerm {
    cplx weight;
    std::vector<SlotFactor> slots;
};

struct BoundaryOperatorModel {
    std::size_t dimension = 2;  // d; the operator acts on d-1 slots
    std::size_t omitted_axis = 0;
    cplx scalar = 1.0;
    std::vector<RankTerm> terms;
};

/// <e_mu, e_nu> on the unit interval.
inline cplx interval_overlap(double mu, double nu) {
    const double x = nu - mu;
    return eval_F_omega(DomainSpec::unit_cube(1), std::span<const double>(&x, 1));
}

/// Matrix of the operator in the basis (x)_{a != j} e_{phase_a + n_a}, n over
/// the window with axis j dropped (window has arity d).
inline Matrix boundary_matrix(const BoundaryOperatorModel& op, std::span<const double> phases,
                              const LatticeWindow& window) {
    const std::size_t d = op.dimension;
    if (phases.size() != d || window.arity() != d)
        throw Error(ErrorKind::ArityMismatch, "phases and window need arity d");
    std::vector<std::pair<int, int>> cross;
    std::vector<double> cross_phase;
    for (std::size_t a = 0; a < d; ++a)
        if (a != op.omitted_axis) {
            cross.push_back(window.ranges()[a]);
            cross_phase.push_back(phases[a]);
        }
    const LatticeWindow cw(cross);
    const auto basis = cw.indices();
    const auto nb = static_cast<Eigen::Index>(basis.size());
    Matrix m = Matrix::Identity(nb, nb) * op.scalar;
    for (const auto& t : op.terms) {
        if (t.slots.size() + 1 != d)
            throw Error(ErrorKind::ArityMismatch, "rank term with wrong slot count");
        // <b', Q b> = prod_slots (identity ? delta : <b'_a, e_f><e_f, b_a>)
        for (Eigen::Index c = 0; c < nb; ++c)
            for (Eigen::Index r = 0; r < nb; ++r) {
                cplx v = t.weight;
                for (std::size_t s = 0; s < t.slots.size() && v != 0.0; ++s) {
                    const double mu_r = cross_phase[s] + basis[static_cast<std::size_t>(r)][s];
                    const double mu_c = cross_phase[s] + basis[static_cast<std::size_t>(c)][s];
                    if (!t.slots[s].frequency) {
                        if (basis[static_cast<std::size_t>(r)][s] != basis[static_cast<std::size_t>(c)][s]) v = 0.0;
                    } else {
                        const double f = *t.slots[s].frequency;
                        v *= interval_overlap(mu_r, f) * interval_overlap(f, mu_c);
                    }
                }
                m(r, c) += v;
            }
    }
    return m;
}

/// Largest column-wise off-diagonal l2 mass.
inline double offdiagonal_mass(const Matrix& m) {
    double worst = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        double s = 0;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (r != c) s += std::norm(m(r, c));
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

/// Models of V_23, V_13, V_12 for the three-dimensional tower spectrum.
inline std::vector<BoundaryOperatorModel> boundary_models_from_tower3d(const Tower3D& t) {
    std::vector<BoundaryOperatorModel> ops(3);
    for (std::size_t j = 0; j < 3; ++j) {
        ops[j].dimension = 3;
        ops[j].omitted_axis = j;
    }
    ops[0].scalar = 1.0;
    const cplx b0 = unit_phase(t.beta.fallback());
    ops[1].scalar = b0;
    for (const auto& [k, v] : t.beta.table())
        ops[1].terms.push_back({unit_phase(v) - b0, {{static_cast<double>(k[0])}, {std::nullopt}}});
    const cplx g0 = unit_phase(t.gamma.fallback());
    ops[2].scalar = g0;
    for (const auto& [kl, v] : t.gamma.table())
        ops[2].terms.push_back({unit_phase(v) - g0,
                                {{static_cast<double>(kl[0])}, {t.beta(kl[0]) + kl[1]}}});
    return ops;
}

/// Models for table-backed eigenvalue functions (diagonal in their own basis).
inline std::vector<BoundaryOperatorModel> boundary_models(const EigenvalueFunctionSet& f) {
    f.validate();
    std::vector<BoundaryOperatorModel> ops;
    for (std::size_t j = 0; j < f.dimension; ++j) {
        if (f.v[j].has_callable())
            throw Error(ErrorKind::InvalidArgument,
                        "boundary model needs table-backed eigenvalue functions");
        BoundaryOperatorModel op{f.dimension, j, f.v[j].fallback(), {}};
        for (const auto& [key, val] : f.v[j].table()) {
            RankTerm t{val - op.scalar, {}};
            std::size_t s = 0;
            for (std::size_t a = 0; a < f.dimension; ++a)
                if (a != j) t.slots.push_back({f.phases[a] + key[s++]});
            op.terms.push_back(std::move(t));
        }
        ops.push_back(std::move(op));
    }
    return ops;
}

/// Planar boundary operators: U_2 = e^{i 2 pi alpha} diag(a_n) on e_{n+beta}
/// (x-group) and V_1 = e^{i 2 pi beta} diag(b_m) on e_{m+alpha} (y-group).
inline std::vector<BoundaryOperatorModel> boundary_models_2d(const PhaseSequenceSet2D& s,
                                                             double alpha, double beta) {
    if (s.a.has_callable() || s.b.has_callable())
        throw Error(ErrorKind::InvalidArgument, "planar models need table-backed sequences");
    std::vector<BoundaryOperatorModel> ops(2);
    ops[0] = {2, 0, unit_phase(alpha) * s.a.fallback(), {}};
    for (const auto& [n, v] : s.a.table())
        ops[0].terms.push_back({unit_phase(alpha) * (v - s.a.fallback()), {{beta + n[0]}}});
    ops[1] = {2, 1, unit_phase(beta) * s.b.fallback(), {}};
    for (const auto& [m, v] : s.b.table())
        ops[1].terms.push_back({unit_phase(beta) * (v - s.b.fallback()), {{alpha + m[0]}}});
    return ops;
}

struct QuasiCommutativityReport {
    bool quasi_commuting = false;
    std::optional<Point> phases_found;
    double best_mass = std::numeric_limits<double>::infinity();
};

/// First candidate phase vector in which every boundary operator is diagonal
/// (off-diagonal mass below tol) on the window truncation.
inline QuasiCommutativityReport quasi_commutativity_check(
    std::span<const BoundaryOperatorModel> ops, std::span<const Point> candidates,
    const LatticeWindow& window, double tol) {
    if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, "no candidate phases");
    QuasiCommutativityReport rep;
    for (const auto& ph : candidates) {
        double mass = 0;
        for (const auto& op : ops) {
            mass = std::max(mass, offdiagonal_mass(boundary_matrix(op, ph, window)));
            if (mass >= tol && mass >= rep.best_mass) break;
        }
        rep.best_mass = std::min(rep.best_mass, mass);
        if (mass < tol) {
            rep.quasi_commuting = true;
            rep.phases_found = ph;
            return rep;
        }
    }
    return rep;
}

/// All phase vectors in [0,1)^d on a grid of the given step count per unit.
inline std::vector<Point> phase_grid(std::size_t d, int divisions) {
    std::vector<Point> out;
    LatticeWindow(std::vector<std::pair<int, int>>(d, {0, divisions - 1}))
        .for_each([&](const IntTuple& k) {
            Point p(d);
            for (std::size_t a = 0; a < d; ++a) p[a] = static_cast<double>(k[a]) / divisions;
            out.push_back(std::move(p));
        });
    return out;
}

}  // namespace speclab
