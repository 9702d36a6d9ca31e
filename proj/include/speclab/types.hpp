#pragma once

// Shared value types: errors, tolerances, lattice windows, integer-indexed
// functions, domains and spectrum families.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace speclab {

using cplx = std::complex<double>;
using Point = std::vector<double>;
using IntTuple = std::vector<int>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// e^{i 2 pi x}
inline cplx unit_phase(double x) {
    return std::polar(1.0, two_pi * x);
}

enum class ErrorKind {
    InvalidArgument,
    ArityMismatch,
    CapExceeded,
    Singular,
    Truncation,
    Inconsistent,
    Parse,
    Schema,
    Io,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::ArityMismatch: return "arity-mismatch";
        case ErrorKind::CapExceeded: return "cap-exceeded";
        case ErrorKind::Singular: return "singular";
        case ErrorKind::Truncation: return "truncation";
        case ErrorKind::Inconsistent: return "inconsistent";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ToleranceConfig {
    double eq_tol = 1e-10;   // closed-form identities
    double num_tol = 1e-8;   // quadrature and grid comparisons
    int grid_n = 256;        // samples per axis
    int quad_n = 2048;       // quadrature nodes

    void validate() const {
        if (!(eq_tol > 0) || !(num_tol > 0))
            throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
        if (grid_n < 2 || quad_n < 2)
            throw Error(ErrorKind::InvalidArgument, "grid_n and quad_n must be >= 2");
    }
};

/// Axis-aligned box of integer index tuples, inclusive on both ends.
class LatticeWindow {
public:
    static constexpr std::int64_t default_cap = 1'000'000;

    LatticeWindow() = default;
    explicit LatticeWindow(std::vector<std::pair<int, int>> ranges,
                           std::int64_t cap = default_cap)
        : ranges_(std::move(ranges)) {
        if (ranges_.empty())
            throw Error(ErrorKind::InvalidArgument, "window needs at least one axis");
        for (const auto& [lo, hi] : ranges_)
            if (lo > hi)
                throw Error(ErrorKind::InvalidArgument,
                            "window axis with low " + std::to_string(lo) +
                                " > high " + std::to_string(hi));
        if (cardinality() > cap)
            throw Error(ErrorKind::CapExceeded,
                        "window cardinality " + std::to_string(cardinality()) +
                            " exceeds cap " + std::to_string(cap));
    }

    /// [-radius, radius]^dim
    static LatticeWindow cube(int dim, int radius) {
        return LatticeWindow(std::vector<std::pair<int, int>>(
            static_cast<std::size_t>(dim), {-radius, radius}));
    }

    std::size_t arity() const { return ranges_.size(); }
    const std::vector<std::pair<int, int>>& ranges() const { return ranges_; }
    int low(std::size_t axis) const { return ranges_.at(axis).first; }
    int high(std::size_t axis) const { return ranges_.at(axis).second; }
    int extent(std::size_t axis) const { return high(axis) - low(axis) + 1; }
    bool contains(std::size_t axis, int v) const {
        return v >= low(axis) && v <= high(axis);
    }

    std::int64_t cardinality() const {
        std::int64_t n = 1;
        for (const auto& [lo, hi] : ranges_) {
            n *= static_cast<std::int64_t>(hi) - lo + 1;
            if (n > std::numeric_limits<std::int32_t>::max()) return n;
        }
        return n;
    }

    /// Row-major enumeration, last axis fastest.
    template <class F>
    void for_each(F&& f) const {
        IntTuple idx(arity());
        for (std::size_t a = 0; a < arity(); ++a) idx[a] = low(a);
        while (true) {
            f(static_cast<const IntTuple&>(idx));
            std::size_t a = arity();
            while (a > 0) {
                --a;
                if (idx[a] < high(a)) {
                    ++idx[a];
                    break;
                }
                idx[a] = low(a);
                if (a == 0) return;
            }
        }
    }

    std::vector<IntTuple> indices() const {
        std::vector<IntTuple> out;
        out.reserve(static_cast<std::size_t>(cardinality()));
        for_each([&](const IntTuple& t) { out.push_back(t); });
        return out;
    }

private:
    std::vector<std::pair<int, int>> ranges_;
};

/// Function Z^arity -> [0,1): finite table plus a default outside it.
class IntFunction {
public:
    IntFunction() = default;
    explicit IntFunction(std::size_t arity, double fallback = 0.0,
                         std::map<IntTuple, double> table = {})
        : arity_(arity), default_(fallback), table_(std::move(table)) {
        check_value(default_);
        for (const auto& [k, v] : table_) {
            if (k.size() != arity_)
                throw Error(ErrorKind::ArityMismatch, "IntFunction key of wrong arity");
            check_value(v);
        }
    }

    static IntFunction constant(std::size_t arity, double value) {
        return IntFunction(arity, value);
    }

    std::size_t arity() const { return arity_; }
    double fallback() const { return default_; }
    const std::map<IntTuple, double>& table() const { return table_; }

    double operator()(const IntTuple& args) const {
        if (auto it = table_.find(args); it != table_.end()) return it->second;
        return default_;
    }
    double operator()(std::span<const int> args) const {
        return (*this)(IntTuple(args.begin(), args.end()));
    }
    double operator()(int k) const { return (*this)(IntTuple{k}); }

    bool is_constant() const {
        for (const auto& [k, v] : table_)
            if (v != default_) return false;
        return true;
    }

private:
    static void check_value(double v) {
        if (!(v >= 0.0 && v < 1.0))
            throw Error(ErrorKind::InvalidArgument,
                        "IntFunction value " + std::to_string(v) + " outside [0,1)");
    }

    std::size_t arity_ = 1;
    double default_ = 0.0;
    std::map<IntTuple, double> table_;
};

struct UnitCube {
    int dimension = 1;
};

struct IntervalUnion {
    std::vector<std::pair<double, double>> intervals;
};

/// The region carrying Lebesgue measure.
class DomainSpec {
public:
    using Variant = std::variant<UnitCube, IntervalUnion>;

    static DomainSpec unit_cube(int d) {
        if (d < 1) throw Error(ErrorKind::InvalidArgument, "cube dimension must be >= 1");
        return DomainSpec(UnitCube{d});
    }

    static DomainSpec interval_union(std::vector<std::pair<double, double>> iv) {
        if (iv.empty())
            throw Error(ErrorKind::InvalidArgument, "interval union needs an interval");
        std::sort(iv.begin(), iv.end());
        for (std::size_t i = 0; i < iv.size(); ++i) {
            if (!(iv[i].first < iv[i].second) || !std::isfinite(iv[i].first) ||
                !std::isfinite(iv[i].second))
                throw Error(ErrorKind::InvalidArgument, "interval needs left < right");
            if (i > 0 && iv[i].first < iv[i - 1].second)
                throw Error(ErrorKind::InvalidArgument, "intervals overlap");
        }
        return DomainSpec(IntervalUnion{std::move(iv)});
    }

    int dimension() const {
        if (const auto* c = std::get_if<UnitCube>(&v_)) return c->dimension;
        return 1;
    }

    double measure() const {
        if (std::holds_alternative<UnitCube>(v_)) return 1.0;
        double m = 0;
        for (const auto& [a, b] : std::get<IntervalUnion>(v_).intervals) m += b - a;
        return m;
    }

    bool is_cube() const { return std::holds_alternative<UnitCube>(v_); }
    const Variant& variant() const { return v_; }

private:
    explicit DomainSpec(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// Spectrum families. Window index tuples map to points by the family formula.

struct TranslatedLattice {
    Point alpha;  // alpha + Z^d
};

struct ClassA2D {
    double alpha = 0.0;
    IntFunction beta;  // (alpha + m, beta(m) + n)
};

struct ClassB2D {
    double alpha = 0.0;
    IntFunction beta;  // (beta(n) + m, alpha + n)
};

/// levels[0] has arity 0 and supplies alpha; levels[k] has arity k.
struct Tower {
    std::vector<IntFunction> levels;
};

struct Tower3D {
    IntFunction beta;   // arity 1
    IntFunction gamma;  // arity 2
};

struct Explicit {
    std::vector<Point> points;
};

class SpectrumSpec {
public:
    using Variant =
        std::variant<TranslatedLattice, ClassA2D, ClassB2D, Tower, Tower3D, Explicit>;

    SpectrumSpec(Variant v) : v_(std::move(v)) { validate(); }  // NOLINT

    const Variant& variant() const { return v_; }

    std::size_t dimension() const {
        return std::visit(
            [](const auto& s) -> std::size_t {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, TranslatedLattice>) return s.alpha.size();
                else if constexpr (std::is_same_v<T, ClassA2D> || std::is_same_v<T, ClassB2D>)
                    return 2;
                else if constexpr (std::is_same_v<T, Tower>) return s.levels.size();
                else if constexpr (std::is_same_v<T, Tower3D>) return 3;
                else return s.points.empty() ? 0 : s.points.front().size();
            },
            v_);
    }

    bool is_explicit() const { return std::holds_alternative<Explicit>(v_); }

private:
    void validate() const {
        if (const auto* t = std::get_if<TranslatedLattice>(&v_)) {
            if (t->alpha.empty())
                throw Error(ErrorKind::InvalidArgument, "lattice needs dimension >= 1");
        } else if (const auto* a = std::get_if<ClassA2D>(&v_)) {
            if (a->beta.arity() != 1)
                throw Error(ErrorKind::ArityMismatch, "beta must have arity 1");
        } else if (const auto* b = std::get_if<ClassB2D>(&v_)) {
            if (b->beta.arity() != 1)
                throw Error(ErrorKind::ArityMismatch, "beta must have arity 1");
        } else if (const auto* tw = std::get_if<Tower>(&v_)) {
            if (tw->levels.empty())
                throw Error(ErrorKind::InvalidArgument, "tower needs at least one level");
            for (std::size_t k = 0; k < tw->levels.size(); ++k)
                if (tw->levels[k].arity() != k)
                    throw Error(ErrorKind::ArityMismatch,
                                "tower level " + std::to_string(k) + " must have arity " +
                                    std::to_string(k));
        } else if (const auto* t3 = std::get_if<Tower3D>(&v_)) {
            if (t3->beta.arity() != 1 || t3->gamma.arity() != 2)
                throw Error(ErrorKind::ArityMismatch, "Tower3D needs beta/1 and gamma/2");
        } else if (const auto* e = std::get_if<Explicit>(&v_)) {
            for (const auto& p : e->points)
                if (p.size() != e->points.front().size())
                    throw Error(ErrorKind::ArityMismatch, "explicit points of mixed arity");
        }
    }

    Variant v_;
};

/// Deterministic uniform generator built on splitmix64, so seeded runs are
/// byte-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int integer(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * uniform());
    }
    cplx complex_normal() { return {normal(), normal()}; }

private:
    std::uint64_t state_;
};

}  // namespace speclab
