#pragma once

#include "speclab/types.hpp"

namespace speclab {

namespace detail {

inline Point spectrum_point(const SpectrumSpec& spec, const IntTuple& k) {
    return std::visit(
        [&](const auto& s) -> Point {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, TranslatedLattice>) {
                Point p(s.alpha.size());
                for (std::size_t j = 0; j < p.size(); ++j) p[j] = s.alpha[j] + k[j];
                return p;
            } else if constexpr (std::is_same_v<T, ClassA2D>) {
                return {s.alpha + k[0], s.beta(k[0]) + k[1]};
            } else if constexpr (std::is_same_v<T, ClassB2D>) {
                return {s.beta(k[1]) + k[0], s.alpha + k[1]};
            } else if constexpr (std::is_same_v<T, Tower>) {
                Point p(s.levels.size());
                for (std::size_t j = 0; j < p.size(); ++j)
                    p[j] = s.levels[j](std::span<const int>(k.data(), j)) + k[j];
                return p;
            } else if constexpr (std::is_same_v<T, Tower3D>) {
                return {static_cast<double>(k[0]), s.beta(k[0]) + k[1],
                        s.gamma(IntTuple{k[0], k[1]}) + k[2]};
            } else {
                return {};
            }
        },
        spec.variant());
}

}  // namespace detail

/// One point per window index tuple, in window enumeration order.
/// Explicit spectra return their stored points and ignore the window.
inline std::vector<Point> enumerate_spectrum(const SpectrumSpec& spec,
                                             const LatticeWindow& window) {
    if (const auto* e = std::get_if<Explicit>(&spec.variant())) return e->points;
    if (window.arity() != spec.dimension())
        throw Error(ErrorKind::ArityMismatch,
                    "window arity " + std::to_string(window.arity()) +
                        " does not match spectrum dimension " +
                        std::to_string(spec.dimension()));
    if (window.cardinality() > LatticeWindow::default_cap)
        throw Error(ErrorKind::CapExceeded, "window over cardinality cap");
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(window.cardinality()));
    window.for_each([&](const IntTuple& k) { out.push_back(detail::spectrum_point(spec, k)); });
    return out;
}

/// All lambda - lambda' with distinct positions, duplicates retained.
inline std::vector<Point> spectrum_difference_set(std::span<const Point> points) {
    if (points.empty())
        throw Error(ErrorKind::InvalidArgument, "difference set of an empty spectrum");
    const std::size_t d = points.front().size();
    std::vector<Point> out;
    out.reserve(points.size() * (points.size() - 1));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (i == j) continue;
            Point diff(d);
            for (std::size_t a = 0; a < d; ++a) diff[a] = points[i][a] - points[j][a];
            out.push_back(std::move(diff));
        }
    return out;
}

}  // namespace speclab
