#pragma once

// A 16-input resonance node and a 16-input perceptron, both expressible
// through the serial fixed-point datapath: per-lane table lookups or
// serial multiplies, summed through the 4-operand adder tree. An exact
// double-precision path runs alongside for verification.

#include "fx16.hpp"
#include "lut.hpp"
#include "moadder.hpp"
#include "resonance.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace arn {

struct ArnNeuron16 {
    std::array<Fx16, 16> centres{}; // tuned x_m per lane, signed Fx16
    LutTable lut;                   // resonator table, one rho
    bool normalize = true;          // scale the lane sum by 4/16
};

inline ArnNeuron16 make_arn_neuron(const std::array<double, 16>& centres, double rho,
                                   bool normalize = true) {
    ArnNeuron16 n;
    for (int i = 0; i < 16; ++i) n.centres[i] = fx_encode(centres[i], FxSign::Signed);
    n.lut = build_lut({CurveKind::Resonator, rho}, FitMethod::Pwl,
                      resonator_breakpoints(rho));
    n.normalize = normalize;
    return n;
}

struct ArnForwardResult {
    std::array<Fx16, 16> lane_outputs{};
    std::uint32_t raw_sum = 0; // plain sum of lane output words
    Fx16 sum;                  // same sum as unsigned Fx16
    Fx16 output;               // normalized if requested, else == sum
    int clocks = 0;
};

// Fixed-point forward pass: u = |x - x_m| per lane, table lookup, lane
// outputs collapsed by the 16x16 adder tree, optional 4/16 scaling.
inline ArnForwardResult arn_forward(const ArnNeuron16& n, const std::array<Fx16, 16>& x) {
    ArnForwardResult r;
    std::vector<std::uint32_t> raws;
    raws.reserve(16);
    for (int i = 0; i < 16; ++i) {
        Fx16 xi = x[i];
        if (xi.sign != FxSign::Signed) xi = {xi.raw, FxSign::Signed};
        Fx16 u = fx_sub(xi, n.centres[i]);
        Fx16 y = lut_eval_fx(n.lut, u); // even curve, sign handled inside
        r.lane_outputs[i] = y;
        raws.push_back(y.raw);
    }
    auto tree = tree_add(raws, 16);
    if (tree.sum != plain_sum(raws)) throw std::logic_error("arn_forward: tree mismatch");
    r.raw_sum = static_cast<std::uint32_t>(tree.sum);
    if (r.raw_sum > 0xFFFF) throw FxOverflow("arn_forward: lane sum overflow");
    r.sum = {static_cast<std::uint16_t>(r.raw_sum), FxSign::Unsigned};
    r.clocks = lut_eval_clocks(n.lut.method) + tree.clocks;
    if (n.normalize) {
        auto mul = fx_mul_serial(r.sum, fx_encode(0.25, FxSign::Unsigned));
        r.output = mul.product;
        r.clocks += mul.clocks;
    } else {
        r.output = r.sum;
    }
    return r;
}

// Exact-arithmetic counterpart over the same centres.
inline double arn_forward_exact(const std::array<double, 16>& x,
                                const std::array<double, 16>& centres, double rho) {
    return aggregate(std::span<const double>(x), std::span<const double>(centres), rho);
}

struct Perceptron16 {
    std::array<Fx16, 16> weights{};
    LutTable lut; // sigmoid table
};

inline Perceptron16 make_perceptron(const std::array<double, 16>& weights,
                                    FitMethod method = FitMethod::Pwl) {
    Perceptron16 p;
    for (int i = 0; i < 16; ++i) p.weights[i] = fx_encode(weights[i], FxSign::Signed);
    p.lut = build_lut({CurveKind::Sigmoid}, method, canonical_sigmoid_breakpoints());
    return p;
}

struct MlpForwardResult {
    Fx16 preact;
    Fx16 output;
    int clocks = 0;
};

// Weighted sum through serial multiplies and the adder tree, squashed by
// the sigmoid table. Mixed-sign products fall back to sequential
// accumulation since the tree carries magnitudes only.
inline MlpForwardResult mlp_forward(const Perceptron16& p, const std::array<Fx16, 16>& x) {
    MlpForwardResult r;
    std::array<Fx16, 16> prod;
    bool any_negative = false;
    int worst_mul = 0;
    for (int i = 0; i < 16; ++i) {
        Fx16 xi = x[i];
        if (xi.sign != FxSign::Signed) xi = {xi.raw, FxSign::Signed};
        auto mt = fx_mul_serial(p.weights[i], xi);
        prod[i] = mt.product;
        worst_mul = std::max(worst_mul, mt.clocks);
        if (static_cast<std::int16_t>(mt.product.raw) < 0) any_negative = true;
    }
    r.clocks = worst_mul; // lanes multiply in parallel
    if (!any_negative) {
        std::vector<std::uint32_t> raws;
        for (auto& v : prod) raws.push_back(v.raw);
        auto tree = tree_add(raws, 16);
        if (tree.sum > 0x7FFF) throw FxOverflow("mlp_forward: preact overflow");
        r.preact = {static_cast<std::uint16_t>(tree.sum), FxSign::Signed};
        r.clocks += tree.clocks;
    } else {
        Fx16 acc{0, FxSign::Signed};
        for (auto& v : prod) acc = fx_add(acc, v);
        r.preact = acc;
        r.clocks += 16;
    }
    r.output = lut_eval_fx(p.lut, r.preact);
    r.clocks += lut_eval_clocks(p.lut.method);
    return r;
}

// Exact preactivation for the same inputs/weights.
inline double mlp_preact_exact(const std::array<double, 16>& x,
                               const std::array<double, 16>& w) {
    double s = 0;
    for (int i = 0; i < 16; ++i) s += x[i] * w[i];
    return s;
}

// Area/latency trade: R_A serial units fit in the area of one parallel
// multiplier, each needing R_T clocks per product. Over any horizon that
// is a multiple of R_T, the serial array wins exactly when R_A > R_T.
struct ThroughputCompare {
    std::uint64_t parallel_ops = 0;
    std::uint64_t serial_ops = 0;
    bool serial_wins = false;
};

inline ThroughputCompare throughput_compare(std::uint64_t r_a, std::uint64_t r_t,
                                            std::uint64_t horizon_clocks) {
    if (r_a == 0 || r_t == 0) throw std::invalid_argument("throughput_compare: positive ratios");
    ThroughputCompare c;
    c.parallel_ops = horizon_clocks;
    c.serial_ops = r_a * (horizon_clocks / r_t);
    c.serial_wins = c.serial_ops > c.parallel_ops;
    return c;
}

inline std::uint64_t area_ratio(std::uint64_t parallel_gates, std::uint64_t serial_gates) {
    if (serial_gates == 0) throw std::invalid_argument("area_ratio: serial_gates > 0");
    return parallel_gates / serial_gates;
}

} // namespace arn
