#pragma once

// 16-bit Q4.12 fixed point with a cycle model of the serial shift-add
// multiplier. Two flavours share the raw 16-bit container: unsigned
// covers [0, 16) and signed covers [-8, 8). Signed values are stored in
// two's complement for add/sub; multiplication works on sign and
// magnitude separately and truncates the 24-bit fraction of the full
// product down to 12 bits (no rounding anywhere in the datapath).

#include <cstdint>
#include <cmath>
#include <bit>
#include <stdexcept>
#include <string>

namespace arn {

inline constexpr int FX_FRAC_BITS = 12;
inline constexpr double FX_LSB = 1.0 / 4096.0;

enum class FxSign { Unsigned, Signed };

struct Fx16 {
    std::uint16_t raw = 0;
    FxSign sign = FxSign::Unsigned;

    friend bool operator==(const Fx16&, const Fx16&) = default;
};

struct FxOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncation toward zero: the magnitude of v*4096 is floored.
inline Fx16 fx_encode(double v, FxSign s = FxSign::Unsigned) {
    if (s == FxSign::Unsigned) {
        if (v < 0.0 || v >= 16.0) throw FxOverflow("fx_encode: unsigned range");
        return {static_cast<std::uint16_t>(v * 4096.0), s};
    }
    if (v < -8.0 || v >= 8.0) throw FxOverflow("fx_encode: signed range");
    auto mag = static_cast<std::int32_t>(std::trunc(std::fabs(v) * 4096.0));
    std::int32_t r = v < 0 ? -mag : mag;
    return {static_cast<std::uint16_t>(r & 0xFFFF), s};
}

// Round-to-nearest variant for precomputed constants (table coefficients);
// the runtime datapath itself still truncates.
inline Fx16 fx_encode_nearest(double v, FxSign s = FxSign::Unsigned) {
    double q = std::round(v * 4096.0) / 4096.0;
    // Nudge back inside the range if rounding crossed the top.
    if (s == FxSign::Unsigned && q >= 16.0) q = 16.0 - FX_LSB;
    if (s == FxSign::Signed && q >= 8.0) q = 8.0 - FX_LSB;
    return fx_encode(q, s);
}

inline double fx_decode(Fx16 a) {
    if (a.sign == FxSign::Unsigned) return a.raw * FX_LSB;
    return static_cast<std::int16_t>(a.raw) * FX_LSB;
}

inline Fx16 fx_add(Fx16 a, Fx16 b) {
    if (a.sign != b.sign) throw std::invalid_argument("fx_add: mixed signedness");
    if (a.sign == FxSign::Unsigned) {
        std::uint32_t s = std::uint32_t(a.raw) + b.raw;
        if (s > 0xFFFF) throw FxOverflow("fx_add: carry out");
        return {static_cast<std::uint16_t>(s), a.sign};
    }
    std::int32_t s = std::int32_t(static_cast<std::int16_t>(a.raw)) +
                     static_cast<std::int16_t>(b.raw);
    if (s < -32768 || s > 32767) throw FxOverflow("fx_add: signed overflow");
    return {static_cast<std::uint16_t>(s & 0xFFFF), a.sign};
}

inline Fx16 fx_sub(Fx16 a, Fx16 b) {
    if (a.sign != b.sign) throw std::invalid_argument("fx_sub: mixed signedness");
    if (a.sign == FxSign::Unsigned) {
        if (b.raw > a.raw) throw FxOverflow("fx_sub: borrow");
        return {static_cast<std::uint16_t>(a.raw - b.raw), a.sign};
    }
    std::int32_t s = std::int32_t(static_cast<std::int16_t>(a.raw)) -
                     static_cast<std::int16_t>(b.raw);
    if (s < -32768 || s > 32767) throw FxOverflow("fx_sub: signed overflow");
    return {static_cast<std::uint16_t>(s & 0xFFFF), a.sign};
}

namespace detail {

inline std::uint16_t fx_magnitude(Fx16 a) {
    if (a.sign == FxSign::Unsigned) return a.raw;
    auto v = static_cast<std::int16_t>(a.raw);
    return static_cast<std::uint16_t>(v < 0 ? -std::int32_t(v) : v);
}

inline bool fx_negative(Fx16 a) {
    return a.sign == FxSign::Signed && static_cast<std::int16_t>(a.raw) < 0;
}

} // namespace detail

// Reference product: full 32-bit magnitude product, fraction truncated
// from 24 to 12 bits. The keepable integer field is 4 bits unsigned and
// 3 bits signed; anything above it is an overflow.
inline Fx16 fx_mul_trunc(Fx16 a, Fx16 b) {
    if (a.sign != b.sign) throw std::invalid_argument("fx_mul_trunc: mixed signedness");
    std::uint32_t full = std::uint32_t(detail::fx_magnitude(a)) * detail::fx_magnitude(b);
    std::uint32_t kept = full >> FX_FRAC_BITS;
    if (a.sign == FxSign::Unsigned) {
        if (kept > 0xFFFF) throw FxOverflow("fx_mul_trunc: integer field overflow");
        return {static_cast<std::uint16_t>(kept), a.sign};
    }
    if (kept > 0x7FFF) throw FxOverflow("fx_mul_trunc: integer field overflow");
    bool neg = detail::fx_negative(a) != detail::fx_negative(b);
    std::int32_t r = neg ? -std::int32_t(kept) : std::int32_t(kept);
    return {static_cast<std::uint16_t>(r & 0xFFFF), FxSign::Signed};
}

struct MulTrace {
    Fx16 product;
    int clocks = 0;      // double-edge cycles, load included
    int shift_edges = 0; // one per multiplier bit walked
    int add_edges = 0;   // one per set multiplier bit
};

// Serial multiplier cycle model. The unit clocks on both edges: one edge
// loads the registers, each multiplier bit costs a shift edge, and each
// set bit costs an extra accumulate edge. Signed operands walk 15
// magnitude bits, unsigned all 16. Worst case lands at 17 cycles
// unsigned and a 15-bit multiplication with half its bits set fits in 12.
inline MulTrace fx_mul_serial(Fx16 a, Fx16 b) {
    MulTrace t;
    t.product = fx_mul_trunc(a, b);
    std::uint16_t m = detail::fx_magnitude(b);
    t.shift_edges = (b.sign == FxSign::Signed) ? 15 : 16;
    t.add_edges = std::popcount(m);
    int edges = 1 + t.shift_edges + t.add_edges;
    t.clocks = (edges + 1) / 2;
    return t;
}

inline std::string fx_to_hex(Fx16 a) {
    static const char* digits = "0123456789ABCDEF";
    std::string s(4, '0');
    for (int i = 0; i < 4; ++i) s[3 - i] = digits[(a.raw >> (4 * i)) & 0xF];
    return s;
}

} // namespace arn
