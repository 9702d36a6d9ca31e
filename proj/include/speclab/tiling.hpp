#pragma once

// Multiplicity of the translates l + [0,1)^d over the box [0,N)^d, sampled at
// cell centres of a grid with `resolution` cells per unit. Every translate
// meeting the box is enumerated directly, so no periodic reduction is needed.

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "speclab/spectrum.hpp"

namespace speclab {

inline constexpr double face_eps = 1e-9;

struct MultiplicityMap {
    int dim = 2;
    int window = 4;      // N
    int resolution = 64; // samples per unit
    std::vector<int> counts;
    std::vector<unsigned char> on_face;

    int side() const { return window * resolution; }
    std::size_t flat(const IntTuple& i) const {
        std::size_t f = 0;
        for (int a = 0; a < dim; ++a) f = f * static_cast<std::size_t>(side()) + static_cast<std::size_t>(i[static_cast<std::size_t>(a)]);
        return f;
    }
    double cell_volume() const { return std::pow(1.0 / resolution, dim); }
};

/// Translation vectors whose unit cube can meet [0,N)^d.
inline std::vector<Point> translates_near_box(const SpectrumSpec& spec, int n) {
    const auto d = spec.dimension();
    std::vector<Point> pts;
    if (spec.is_explicit()) {
        pts = enumerate_spectrum(spec, LatticeWindow::cube(static_cast<int>(d), 0));
    } else {
        double reach = 0.0;
        if (const auto* t = std::get_if<TranslatedLattice>(&spec.variant()))
            for (double a : t->alpha) reach = std::max(reach, std::abs(a));
        if (const auto* a = std::get_if<ClassA2D>(&spec.variant())) reach = std::abs(a->alpha);
        if (const auto* b = std::get_if<ClassB2D>(&spec.variant())) reach = std::abs(b->alpha);
        const int pad = 2 + static_cast<int>(std::ceil(reach));
        pts = enumerate_spectrum(
            spec, LatticeWindow(std::vector<std::pair<int, int>>(d, {-pad, n + pad})));
    }
    std::vector<Point> out;
    for (auto& p : pts) {
        bool meets = true;
        for (double c : p) meets = meets && c < n && c + 1.0 > 0.0;
        if (meets) out.push_back(std::move(p));
    }
    return out;
}

inline MultiplicityMap multiplicity_map(const SpectrumSpec& spec, int n, int resolution) {
    const int d = static_cast<int>(spec.dimension());
    if (d < 1 || d > 3) throw Error(ErrorKind::InvalidArgument, "tiling check supports d <= 3");
    if (resolution < 8)
        throw Error(ErrorKind::InvalidArgument,
                    "resolution " + std::to_string(resolution) + " < 8 samples per unit");
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "window size must be >= 1");
    MultiplicityMap mm{d, n, resolution, {}, {}};
    const int side = mm.side();
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(side);
    if (total > static_cast<std::size_t>(LatticeWindow::default_cap) * 16)
        throw Error(ErrorKind::CapExceeded, "multiplicity grid too large");
    mm.counts.assign(total, 0);
    mm.on_face.assign(total, 0);

    for (const auto& l : translates_near_box(spec, n)) {
        // Candidate sample range per axis, one cell wider than the cube.
        std::vector<std::pair<int, int>> range;
        for (int a = 0; a < d; ++a) {
            const double lo = l[static_cast<std::size_t>(a)] * resolution - 0.5;
            range.emplace_back(std::max(0, static_cast<int>(std::floor(lo))),
                               std::min(side - 1, static_cast<int>(std::ceil(lo + resolution))));
        }
        LatticeWindow(range, std::numeric_limits<std::int64_t>::max()).for_each([&](const IntTuple& i) {
            bool inside = true, face = false;
            for (int a = 0; a < d; ++a) {
                const double u = (i[static_cast<std::size_t>(a)] + 0.5) / resolution - l[static_cast<std::size_t>(a)];
                inside = inside && u >= 0.0 && u < 1.0;
                face = face || std::abs(u) < face_eps || std::abs(u - 1.0) < face_eps;
            }
            const auto f = mm.flat(i);
            if (inside) ++mm.counts[f];
            if (face) mm.on_face[f] = 1;
        });
    }
    return mm;
}

struct TilingReport {
    bool tiles = false;
    double overlap_fraction = 0.0;
    double gap_fraction = 0.0;
    std::size_t samples = 0;  // off-face samples judged
};

inline TilingReport tiling_verdict(const MultiplicityMap& mm) {
    TilingReport r;
    std::size_t gaps = 0, overlaps = 0;
    for (std::size_t i = 0; i < mm.counts.size(); ++i) {
        if (mm.on_face[i]) continue;
        ++r.samples;
        if (mm.counts[i] == 0) ++gaps;
        if (mm.counts[i] > 1) ++overlaps;
    }
    if (r.samples > 0) {
        r.gap_fraction = static_cast<double>(gaps) / static_cast<double>(r.samples);
        r.overlap_fraction = static_cast<double>(overlaps) / static_cast<double>(r.samples);
    }
    r.tiles = r.samples > 0 && gaps == 0 && overlaps == 0;
    return r;
}

/// Plain-text integer grid; for d = 2 one line per y row, top row first.
inline std::string multiplicity_text(const MultiplicityMap& mm) {
    std::string out = "# multiplicity dim=" + std::to_string(mm.dim) + " window=" +
                      std::to_string(mm.window) + " resolution=" + std::to_string(mm.resolution) + "\n";
    const int side = mm.side();
    auto put_row = [&](auto&& at) {
        for (int i = 0; i < side; ++i) {
            if (i) out += ' ';
            out += std::to_string(at(i));
        }
        out += '\n';
    };
    if (mm.dim == 1) {
        put_row([&](int i) { return mm.counts[mm.flat({i})]; });
    } else if (mm.dim == 2) {
        for (int j = side - 1; j >= 0; --j) put_row([&](int i) { return mm.counts[mm.flat({i, j})]; });
    } else {
        for (int k = 0; k < side; ++k) {
            out += "# z slice " + std::to_string(k) + "\n";
            for (int j = side - 1; j >= 0; --j)
                put_row([&](int i) { return mm.counts[mm.flat({i, j, k})]; });
        }
    }
    return out;
}

inline constexpr int svg_unit_px = 54;
inline constexpr int svg_margin_px = 40;

/// Outlined unit squares of the translates meeting [0,N)^2, clipped to the
/// box, with column (or row) shift labels for the shifted families.
inline std::string render_tiling_svg(const SpectrumSpec& spec, int n) {
    if (spec.dimension() != 2) throw Error(ErrorKind::InvalidArgument, "tiling figure needs d = 2");
    const int u = svg_unit_px, m = svg_margin_px;
    const int size = n * u + 2 * m;
    char buf[256];
    std::string s;
    std::snprintf(buf, sizeof buf,
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" "
                  "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                  size, size, size, size);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<defs><clipPath id=\"box\"><rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\"/>"
                  "</clipPath></defs>\n",
                  m, m, n * u, n * u);
    s += buf;
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<g clip-path=\"url(#box)\" fill=\"none\" stroke=\"black\" stroke-width=\"1\">\n";
    auto px = [&](double x) { return m + x * u; };
    auto py = [&](double y) { return m + (n - y) * u; };
    for (const auto& l : translates_near_box(spec, n)) {
        std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%d\" height=\"%d\"/>\n",
                      px(l[0]), py(l[1] + 1.0), u, u);
        s += buf;
    }
    s += "</g>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                  "stroke=\"gray\" stroke-width=\"1\"/>\n",
                  m, m, n * u, n * u);
    s += buf;
    s += "<g font-family=\"serif\" font-size=\"10\" fill=\"black\">\n";
    if (const auto* a = std::get_if<ClassA2D>(&spec.variant())) {
        for (int c = 0; c + 1 < n; ++c) {
            std::snprintf(buf, sizeof buf,
                          "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">"
                          "&#946;<tspan baseline-shift=\"sub\">%d</tspan>&#8722;&#946;"
                          "<tspan baseline-shift=\"sub\">%d</tspan>=%.3f</text>\n",
                          px(c + 1.0), static_cast<double>(size - m / 2 + 4), c + 1, c,
                          a->beta(c + 1) - a->beta(c));
            s += buf;
        }
    } else if (const auto* b = std::get_if<ClassB2D>(&spec.variant())) {
        for (int r = 0; r + 1 < n; ++r) {
            std::snprintf(buf, sizeof buf,
                          "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" "
                          "transform=\"rotate(-90 %.2f %.2f)\">"
                          "&#946;<tspan baseline-shift=\"sub\">%d</tspan>&#8722;&#946;"
                          "<tspan baseline-shift=\"sub\">%d</tspan>=%.3f</text>\n",
                          static_cast<double>(m / 2), py(r + 1.0), static_cast<double>(m / 2),
                          py(r + 1.0), r + 1, r, b->beta(r + 1) - b->beta(r));
            s += buf;
        }
    }
    s += "</g>\n</svg>\n";
    return s;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
}

inline void emit_tiling_svg(const SpectrumSpec& spec, int n, const std::filesystem::path& path) {
    write_text_file(path, render_tiling_svg(spec, n));
}

}  // namespace speclab
