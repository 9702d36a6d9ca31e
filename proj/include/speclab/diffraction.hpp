#pragma once

// Spectra Lambda = {(m, beta(m) + n)} with quasi-periodic beta, paired with
// Gaussian test functions two ways: directly, sum_lambda phi^(lambda), and
// through the point-mass density
//   sum_{k,n} c(k,n) sum_m phi(kappa(k) + m, n),  kappa(k) = sum_j k_j/omega_j.
//
// Transform convention: phi^(xi) = int phi(x) e^{i 2 pi xi.x} dx, so that
// the direct sum is the pairing of sum_lambda e_lambda with phi.

#include <cstdio>

#include "speclab/types.hpp"

namespace speclab {

/// xi(x) = sum_h c(h) e^{i 2 pi h x/omega}; real when c(-h) = conj(c(h)).
struct PeriodicComponent {
    double period = 1.0;
    std::map<int, cplx> harmonics;

    cplx eval_complex(double x) const {
        cplx v = 0.0;
        for (const auto& [h, c] : harmonics) v += c * unit_phase(h * x / period);
        return v;
    }
    double operator()(double x) const { return eval_complex(x).real(); }

    /// a cos(2 pi x/omega) + b sin(2 pi x/omega)
    static PeriodicComponent cosine(double period, double a, double b = 0.0) {
        return {period, {{1, cplx(a / 2, -b / 2)}, {-1, cplx(a / 2, b / 2)}}};
    }
};

struct QuasiPeriodicModel {
    double constant = 0.0;
    std::vector<PeriodicComponent> components;

    double operator()(double x) const {
        double v = constant;
        for (const auto& c : components) v += c(x);
        return v;
    }

    void validate(double tol = 1e-10) const {
        for (const auto& c : components) {
            if (!(c.period > 0) || !std::isfinite(c.period))
                throw Error(ErrorKind::InvalidArgument, "periods must be positive and finite");
            for (const auto& [h, v] : c.harmonics) {
                const auto it = c.harmonics.find(-h);
                const cplx partner = it == c.harmonics.end() ? cplx(0.0) : it->second;
                if (std::abs(v - std::conj(partner)) > tol)
                    throw Error(ErrorKind::InvalidArgument,
                                "component is not real: c(" + std::to_string(h) +
                                    ") != conj(c(" + std::to_string(-h) + "))");
            }
            for (double x : {0.0, 0.37, 1.9, -4.2}) {
                if (std::abs(c.eval_complex(x + c.period) - c.eval_complex(x)) > tol)
                    throw Error(ErrorKind::InvalidArgument, "component is not periodic");
            }
        }
    }

    /// Period ratios within 1e-9 of a rational p/q with q <= 50.
    std::vector<std::string> rational_ratio_warnings() const {
        std::vector<std::string> out;
        char buf[160];
        for (std::size_t i = 0; i < components.size(); ++i)
            for (std::size_t j = i + 1; j < components.size(); ++j) {
                const double r = components[i].period / components[j].period;
                for (int q = 1; q <= 50; ++q) {
                    const double p = std::round(r * q);
                    if (std::abs(r - p / q) < 1e-9) {
                        std::snprintf(buf, sizeof buf,
                                      "warning: period ratio omega_%zu/omega_%zu = %.12g is near %d/%d",
                                      i + 1, j + 1, r, static_cast<int>(p), q);
                        out.emplace_back(buf);
                        break;
                    }
                }
            }
        return out;
    }
};

inline constexpr double density_tail_limit = 1e-4;

/// Fourier coefficients of x -> e^{i 2 pi n xi(x)} over one period, |k| <= K,
/// from a trapezoid (equispaced) rule with heavy oversampling.
struct ComponentCoefficients {
    int k_radius = 0;
    std::vector<cplx> coeff;  // index k + K
    double tail = 0.0;        // 1 - sum |c_k|^2 over the window

    cplx at(int k) const { return coeff.at(static_cast<std::size_t>(k + k_radius)); }
};

inline ComponentCoefficients component_coeffs(const PeriodicComponent& c, int n, int k_radius) {
    if (k_radius < 0) throw Error(ErrorKind::InvalidArgument, "negative k radius");
    const int q = std::max(512, 16 * (2 * k_radius + 1));
    std::vector<cplx> samples(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
        samples[static_cast<std::size_t>(i)] = unit_phase(n * c(c.period * i / q));
    ComponentCoefficients out{k_radius, {}, 0.0};
    double mass = 0.0;
    for (int k = -k_radius; k <= k_radius; ++k) {
        cplx acc = 0.0;
        for (int i = 0; i < q; ++i)
            acc += samples[static_cast<std::size_t>(i)] * unit_phase(-static_cast<double>(k) * i / q);
        acc /= static_cast<double>(q);
        out.coeff.push_back(acc);
        mass += std::norm(acc);
    }
    out.tail = std::max(0.0, 1.0 - mass);
    return out;
}

struct DensityEntry {
    IntTuple k;
    int n = 0;
    double frequency = 0.0;  // kappa(k)
    cplx weight;
};

/// c(k, n) for one n over the k window: prod_j c_j(-k_j), times e^{i 2 pi n c0}.
inline std::vector<DensityEntry> density_coeffs(const QuasiPeriodicModel& model, int n, int k_radius) {
    model.validate();
    std::vector<ComponentCoefficients> per;
    for (std::size_t j = 0; j < model.components.size(); ++j) {
        per.push_back(component_coeffs(model.components[j], n, k_radius));
        if (per.back().tail > density_tail_limit)
            throw Error(ErrorKind::Truncation,
                        "coefficient tail " + std::to_string(per.back().tail) + " of component " +
                            std::to_string(j + 1) + " at n=" + std::to_string(n) +
                            " exceeds 1e-4; enlarge the k window");
    }
    const cplx base = unit_phase(n * model.constant);
    std::vector<DensityEntry> out;
    if (model.components.empty()) {
        out.push_back({{}, n, 0.0, base});
        return out;
    }
    LatticeWindow::cube(static_cast<int>(model.components.size()), k_radius).for_each([&](const IntTuple& k) {
        cplx w = base;
        double kappa = 0.0;
        for (std::size_t j = 0; j < k.size(); ++j) {
            w *= per[j].at(-k[j]);
            kappa += k[j] / model.components[j].period;
        }
        out.push_back({k, n, kappa, w});
    });
    return out;
}

struct Gaussian2D {
    double x0 = 0.0, y0 = 0.0;
    double sx = 1.0, sy = 1.0;

    double operator()(double x, double y) const {
        const double u = (x - x0) / sx, v = (y - y0) / sy;
        return std::exp(-pi * (u * u + v * v));
    }
    cplx transform(double xi, double eta) const {
        return sx * sy * unit_phase(xi * x0 + eta * y0) *
               std::exp(-pi * (sx * sx * xi * xi + sy * sy * eta * eta));
    }
    /// Half-width beyond which the function is below e^{-pi 36}.
    static int reach(double s) { return static_cast<int>(std::ceil(6.0 * s)) + 1; }
};

struct DiffractionDensity {
    QuasiPeriodicModel model;
    int k_radius = 0;
    int n_low = 0, n_high = 0;
    std::vector<DensityEntry> entries;
};

/// Density for every n where the test function's y-profile is non-negligible.
inline DiffractionDensity build_density(const QuasiPeriodicModel& model, const Gaussian2D& phi,
                                        int k_radius) {
    DiffractionDensity d{model, k_radius, 0, 0, {}};
    const int r = Gaussian2D::reach(phi.sy);
    d.n_low = static_cast<int>(std::floor(phi.y0)) - r;
    d.n_high = static_cast<int>(std::ceil(phi.y0)) + r;
    for (int n = d.n_low; n <= d.n_high; ++n)
        for (auto& e : density_coeffs(model, n, k_radius)) d.entries.push_back(std::move(e));
    return d;
}

struct DirectResult {
    cplx value;
    std::vector<std::string> warnings;
};

/// sum over m in [-M, M] and all relevant n of phi^(m, beta(m) + n).
inline DirectResult eval_direct(const QuasiPeriodicModel& beta, const Gaussian2D& phi, int window) {
    if (window < 0) throw Error(ErrorKind::InvalidArgument, "negative window");
    DirectResult r{0.0, {}};
    const int rn = static_cast<int>(std::ceil(6.0 / phi.sy)) + 1;
    for (int m = -window; m <= window; ++m) {
        const double b = beta(m);
        const int c = static_cast<int>(std::round(-b));
        for (int n = c - rn; n <= c + rn; ++n) r.value += phi.transform(m, b + n);
    }
    const double edge = phi.sx * std::exp(-pi * phi.sx * phi.sx * window * window);
    if (edge > 1e-12 * std::max(std::abs(r.value), 1e-300)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "warning: window M=%d too small, edge term %.3e", window, edge);
        r.warnings.emplace_back(buf);
    }
    return r;
}

/// sum over entries of c(k,n) sum_m phi(kappa(k) + m, n).
inline cplx eval_diffraction(const DiffractionDensity& d, const Gaussian2D& phi) {
    const int rx = Gaussian2D::reach(phi.sx);
    cplx acc = 0.0;
    for (const auto& e : d.entries) {
        const double x = phi.x0 - e.frequency;
        const int lo = static_cast<int>(std::floor(x)) - rx, hi = static_cast<int>(std::ceil(x)) + rx;
        double s = 0.0;
        for (int m = lo; m <= hi; ++m) s += phi(e.frequency + m, e.n);
        acc += e.weight * s;
    }
    return acc;
}

inline std::string density_table(const DiffractionDensity& d) {
    std::string out = "# k n re im\n";
    char buf[160];
    for (const auto& e : d.entries) {
        std::string k;
        for (std::size_t j = 0; j < e.k.size(); ++j) k += (j ? "," : "") + std::to_string(e.k[j]);
        if (k.empty()) k = "-";
        std::snprintf(buf, sizeof buf, " %d %.12e %.12e\n", e.n, e.weight.real(), e.weight.imag());
        out += k + buf;
    }
    return out;
}

/// Stems at kappa(k) mod 1 with height |c(k, n)| for one n.
inline std::string render_diffraction_svg(const DiffractionDensity& d, int n) {
    const int w = 640, h = 360, m = 40;
    char buf[256];
    std::string s;
    std::snprintf(buf, sizeof buf,
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" "
                  "height=\"%d\" viewBox=\"0 0 %d %d\">\n"
                  "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
                  w, h, w, h);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\" stroke-width=\"1\"/>\n",
                  m, h - m, w - m, h - m);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"serif\" font-size=\"12\">n = %d</text>\n", m,
                  m / 2 + 6, n);
    s += buf;
    s += "<g stroke=\"black\" stroke-width=\"1\" fill=\"black\">\n";
    for (const auto& e : d.entries) {
        if (e.n != n) continue;
        const double a = std::abs(e.weight);
        if (a < 1e-6) continue;
        double f = e.frequency - std::floor(e.frequency);
        if (f >= 1.0) f = 0.0;
        const double x = m + f * (w - 2 * m);
        const double y = (h - m) - a * (h - 2 * m);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%d\" x2=\"%.2f\" y2=\"%.2f\"/><circle cx=\"%.2f\" "
                      "cy=\"%.2f\" r=\"2\"/>\n",
                      x, h - m, x, y, x, y);
        s += buf;
    }
    s += "</g>\n</svg>\n";
    return s;
}

}  // namespace speclab
