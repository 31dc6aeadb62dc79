#pragma once

// Piecewise approximation tables for the activation curves. Two fits are
// supported over a shared breakpoint grid: straight segments between
// neighbouring points (PWL) and second-order interpolation through three
// consecutive points (SOI). Tables are built for the non-negative half
// of the curve; queries use the curve's symmetry for the other half.
// Every coefficient also carries its Fx16 encoding so the table can be
// evaluated through the fixed-point datapath.

#include "fx16.hpp"
#include "resonance.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace arn {

enum class CurveKind { Sigmoid, Tanh, Resonator };
enum class FitMethod { Pwl, Soi };

struct Curve {
    CurveKind kind = CurveKind::Sigmoid;
    double rho = 1.0; // resonator steepness; ignored for the others

    double operator()(double x) const {
        switch (kind) {
        case CurveKind::Sigmoid: return logistic(x);
        case CurveKind::Tanh: return std::tanh(x);
        case CurveKind::Resonator: return resonate(x, rho, 0.0);
        }
        return 0.0;
    }
};

struct PwlSeg {
    double x1 = 0, y1 = 0, m = 0;
    Fx16 fx_x1, fx_y1, fx_m;
};

// y = (a*x + b)*x + c on [x_lo, next x_lo); keyed on the leftmost of the
// three defining points.
struct SoiSeg {
    double x_lo = 0, a = 0, b = 0, c = 0;
    Fx16 fx_xlo, fx_a, fx_b, fx_c;
};

struct SoiCoeffs {
    double a, b, c;
};

inline SoiCoeffs soi_fit(const Curve& f, double x1, double x2, double x3) {
    double y1 = f(x1), y2 = f(x2), y3 = f(x3);
    double a = ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)) /
               ((x2 - x1) * (x3 - x1) * (x3 - x2));
    double b = (y2 - y1 - a * (x2 * x2 - x1 * x1)) / (x2 - x1);
    double c = y1 - a * x1 * x1 - b * x1;
    return {a, b, c};
}

struct LutTable {
    Curve curve;
    FitMethod method = FitMethod::Pwl;
    std::vector<double> points; // ascending, starting at 0
    std::vector<PwlSeg> pwl;
    std::vector<SoiSeg> soi;

    double x_max() const { return points.back(); }
    std::size_t segment_count() const {
        return method == FitMethod::Pwl ? pwl.size() : soi.size();
    }
};

inline LutTable build_lut(Curve curve, FitMethod method,
                          std::vector<double> breakpoints) {
    if (breakpoints.size() < 3 || breakpoints.front() != 0.0 ||
        !std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw std::invalid_argument("build_lut: need >=3 ascending points from 0");
    LutTable t;
    t.curve = curve;
    t.method = method;
    t.points = std::move(breakpoints);
    std::size_t n = t.points.size();
    auto enc = [](double v) { return fx_encode_nearest(v, FxSign::Signed); };
    if (method == FitMethod::Pwl) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            PwlSeg s;
            s.x1 = t.points[i];
            s.y1 = curve(s.x1);
            s.m = (curve(t.points[i + 1]) - s.y1) / (t.points[i + 1] - s.x1);
            s.fx_x1 = enc(s.x1);
            s.fx_y1 = enc(s.y1);
            s.fx_m = enc(s.m);
            t.pwl.push_back(s);
        }
    } else {
        // One segment per interval; the last interval reuses the final
        // triple so every query still finds three defining points.
        for (std::size_t i = 0; i + 1 < n; ++i) {
            std::size_t j = std::min(i, n - 3);
            auto [a, b, c] = soi_fit(curve, t.points[j], t.points[j + 1], t.points[j + 2]);
            SoiSeg s;
            s.x_lo = t.points[i];
            s.a = a;
            s.b = b;
            s.c = c;
            s.fx_xlo = enc(s.x_lo);
            s.fx_a = enc(a);
            s.fx_b = enc(b);
            s.fx_c = enc(c);
            t.soi.push_back(s);
        }
    }
    return t;
}

// Canonical grid for sigmoid and tanh: 1/32 spacing on [0,1] where the
// curves bend fastest, 1/8 spacing out to 5.
inline std::vector<double> canonical_sigmoid_breakpoints() {
    std::vector<double> p;
    for (int i = 0; i <= 32; ++i) p.push_back(i / 32.0);
    for (int i = 1; i <= 32; ++i) p.push_back(1.0 + i / 8.0);
    return p;
}

inline std::vector<double> uniform_breakpoints(double spacing, double x_max = 5.0) {
    std::vector<double> p;
    int n = static_cast<int>(std::round(x_max / spacing));
    for (int i = 0; i <= n; ++i) p.push_back(i * spacing);
    return p;
}

// Canonical resonator grid: 11 points spread uniformly over the stretch
// rho*u in [0, 2.2], which keeps the fit error proportions identical for
// every rho.
inline constexpr double RESONATOR_LUT_SPAN = 2.2;

inline std::vector<double> resonator_breakpoints(double rho) {
    std::vector<double> p;
    for (int i = 0; i <= 10; ++i) p.push_back(i * RESONATOR_LUT_SPAN / (10.0 * rho));
    return p;
}

namespace detail {

inline std::size_t lut_segment_index(const LutTable& t, double x) {
    // Largest breakpoint <= x.
    auto it = std::upper_bound(t.points.begin(), t.points.end(), x);
    std::size_t i = it - t.points.begin();
    if (i > 0) --i;
    return std::min(i, t.segment_count() - 1);
}

} // namespace detail

// Exact-coefficient evaluation (double arithmetic over the fitted
// segments). Handles symmetry and saturation for the full real line.
inline double lut_eval(const LutTable& t, double x) {
    const Curve& f = t.curve;
    if (f.kind == CurveKind::Sigmoid && x < 0) return 1.0 - lut_eval(t, -x);
    if (f.kind == CurveKind::Tanh && x < 0) return -lut_eval(t, -x);
    if (f.kind == CurveKind::Resonator) x = std::fabs(x);
    if (x > t.x_max()) {
        if (f.kind == CurveKind::Sigmoid) return 1.0;
        return f(t.x_max());
    }
    std::size_t i = detail::lut_segment_index(t, x);
    if (t.method == FitMethod::Pwl) {
        const auto& s = t.pwl[i];
        return s.y1 + s.m * (x - s.x1);
    }
    const auto& s = t.soi[i];
    return (s.a * x + s.b) * x + s.c;
}

// Fixed-point evaluation: the query, every coefficient, every multiply
// (truncating) and every add run through the signed Fx16 datapath.
inline Fx16 lut_eval_fx(const LutTable& t, Fx16 x) {
    if (x.sign != FxSign::Signed) throw std::invalid_argument("lut_eval_fx: signed input");
    const Curve& f = t.curve;
    auto neg = [](Fx16 v) {
        return Fx16{static_cast<std::uint16_t>((-static_cast<std::int16_t>(v.raw)) & 0xFFFF),
                    FxSign::Signed};
    };
    bool negative = static_cast<std::int16_t>(x.raw) < 0;
    if (negative) {
        Fx16 y = lut_eval_fx(t, neg(x));
        if (f.kind == CurveKind::Sigmoid)
            return fx_sub(fx_encode(1.0, FxSign::Signed), y);
        if (f.kind == CurveKind::Tanh) return neg(y);
        return y; // resonator is even
    }
    if (fx_decode(x) > t.x_max()) {
        double sat = f.kind == CurveKind::Sigmoid ? 1.0 : f(t.x_max());
        return fx_encode_nearest(sat, FxSign::Signed);
    }
    std::size_t i = detail::lut_segment_index(t, fx_decode(x));
    if (t.method == FitMethod::Pwl) {
        const auto& s = t.pwl[i];
        Fx16 dx = fx_sub(x, s.fx_x1);
        return fx_add(s.fx_y1, fx_mul_trunc(s.fx_m, dx));
    }
    const auto& s = t.soi[i];
    Fx16 ax_b = fx_add(fx_mul_trunc(s.fx_a, x), s.fx_b);
    return fx_add(fx_mul_trunc(ax_b, x), s.fx_c);
}

struct AuditResult {
    double max_rel_err_pct = 0;
    double argmax = 0;
};

// Worst relative error of the exact-coefficient fit against the true
// curve over a uniform grid on [lo, hi].
inline AuditResult lut_audit(const LutTable& t, double lo, double hi, int n = 8000) {
    AuditResult r;
    for (int i = 0; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n;
        double y = t.curve(x);
        if (y == 0.0) continue;
        double e = std::fabs(lut_eval(t, x) - y) / std::fabs(y) * 100.0;
        if (e > r.max_rel_err_pct) {
            r.max_rel_err_pct = e;
            r.argmax = x;
        }
    }
    return r;
}

// Same sweep through the fixed-point path, over Fx16-representable inputs.
inline AuditResult lut_audit_fx(const LutTable& t, double lo, double hi, int n = 2000) {
    AuditResult r;
    for (int i = 0; i <= n; ++i) {
        Fx16 x = fx_encode_nearest(lo + (hi - lo) * i / n, FxSign::Signed);
        double y = t.curve(fx_decode(x));
        if (std::fabs(y) < 1e-6) continue;
        double e = std::fabs(fx_decode(lut_eval_fx(t, x)) - y) / std::fabs(y) * 100.0;
        if (e > r.max_rel_err_pct) {
            r.max_rel_err_pct = e;
            r.argmax = fx_decode(x);
        }
    }
    return r;
}

// Storage for a family of tables (one per rho) sharing the breakpoint
// grid: 16-bit words for the grid plus per-table segment coefficients,
// two words per PWL segment and three per SOI segment.
inline std::size_t lut_storage_bytes(std::size_t n_points, std::size_t n_tables,
                                     FitMethod method) {
    std::size_t n_seg = n_points - 1;
    std::size_t words_per_seg = method == FitMethod::Pwl ? 2 : 3;
    return 2 * (n_points + n_tables * n_seg * words_per_seg);
}

// Latency of one table evaluation in serial-datapath clocks. Coefficient
// fetches and the single-edge adds overlap the serial multiply, so PWL
// costs one worst-case multiply and SOI two dependent multiplies plus
// the final accumulate edge.
inline int lut_eval_clocks(FitMethod method) {
    constexpr int mul = 17;
    return method == FitMethod::Pwl ? mul : 2 * mul + 1;
}

inline void lut_dump(const LutTable& t, std::ostream& os) {
    os << "arnlut v1\n";
    os << int(t.curve.kind) << ' ' << t.curve.rho << ' ' << int(t.method) << '\n';
    os << t.points.size() << '\n';
    os.precision(17);
    for (double p : t.points) os << p << ' ';
    os << '\n';
    if (t.method == FitMethod::Pwl)
        for (const auto& s : t.pwl) os << s.y1 << ' ' << s.m << '\n';
    else
        for (const auto& s : t.soi) os << s.a << ' ' << s.b << ' ' << s.c << '\n';
}

inline LutTable lut_load(std::istream& is) {
    std::string magic, ver;
    is >> magic >> ver;
    if (magic != "arnlut" || ver != "v1")
        throw std::runtime_error("lut_load: bad header");
    int kind, method;
    double rho;
    std::size_t n;
    is >> kind >> rho >> method >> n;
    std::vector<double> pts(n);
    for (auto& p : pts) is >> p;
    if (!is) throw std::runtime_error("lut_load: truncated");
    LutTable t = build_lut({CurveKind(kind), rho}, FitMethod(method), std::move(pts));
    // Overwrite the refitted coefficients with the stored ones so a dump
    // and load round-trips bit-for-bit.
    auto enc = [](double v) { return fx_encode_nearest(v, FxSign::Signed); };
    if (t.method == FitMethod::Pwl) {
        for (auto& s : t.pwl) {
            is >> s.y1 >> s.m;
            s.fx_y1 = enc(s.y1);
            s.fx_m = enc(s.m);
        }
    } else {
        for (auto& s : t.soi) {
            is >> s.a >> s.b >> s.c;
            s.fx_a = enc(s.a);
            s.fx_b = enc(s.b);
            s.fx_c = enc(s.c);
        }
    }
    if (!is) throw std::runtime_error("lut_load: truncated");
    return t;
}

// Step table matching the behaviour of the fabricated resonator unit at
// rho = 2.42: within each bucket the stored level is returned unchanged
// (zero slope). The first six levels were recovered from the published
// register dumps of that unit; the tail follows the exact curve.
inline LutTable hw_resonator_lut_2p42() {
    const double rho = 2.42;
    static const int bp_raw[11] = {0, 384, 512, 768, 1024, 1280, 1792, 2304, 2816, 3328, 4096};
    static const int y_raw[6] = {1024, 1016, 1002, 983, 941, 877};
    std::vector<double> pts;
    for (int r : bp_raw) pts.push_back(r / 4096.0);
    LutTable t = build_lut({CurveKind::Resonator, rho}, FitMethod::Pwl, std::move(pts));
    for (std::size_t i = 0; i < t.pwl.size(); ++i) {
        auto& s = t.pwl[i];
        double y = i < 6 ? y_raw[i] / 4096.0
                         : std::round(4096.0 * resonate(s.x1, rho, 0.0)) / 4096.0;
        s.y1 = y;
        s.m = 0.0;
        s.fx_y1 = fx_encode_nearest(y, FxSign::Signed);
        s.fx_m = Fx16{0, FxSign::Signed};
    }
    return t;
}

} // namespace arn
