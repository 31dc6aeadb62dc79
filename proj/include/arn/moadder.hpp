#pragma once

// Multi-operand addition: closed-form carry bounds for adding N digits
// in base b, a behavioural model of the serial 4-operand adder column
// pipeline, and reconfigurable trees of those modules for wide operand
// counts. Sums are always checked against plain integer addition.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace arn {

// Adding N single digits in base b can never carry more than N-1.
inline std::uint64_t carry_upper_bound(std::uint64_t n) { return n - 1; }

// Tight single-column bound for the all-(b-1) worst case, split by how N
// sits against multiples of b.
inline std::uint64_t tight_carry_bound(std::uint64_t n, std::uint64_t b) {
    if (n == 0 || b < 2) throw std::invalid_argument("tight_carry_bound: n>=1, b>=2");
    if (n < b) return n - 1;
    std::uint64_t q = n / b, r = n % b;
    return r == 0 ? n - q : n - 1 - q;
}

// Worst-case carry out of one column of N digits, found by evaluating
// the all-(b-1) column directly.
inline std::uint64_t max_single_column_carry(std::uint64_t n, std::uint64_t b) {
    return (n * (b - 1)) / b;
}

// Worst-case total carry past M columns.
inline std::uint64_t max_carry_m_columns(std::uint64_t n, std::uint64_t b, int m) {
    std::uint64_t bm = 1;
    for (int i = 0; i < m; ++i) bm *= b;
    return (n * (bm - 1)) / bm;
}

// Digits needed to hold the carry of N operands in base b.
inline int carry_columns(std::uint64_t n, std::uint64_t b) {
    if (n < 2) return 1;
    int c = 0;
    for (std::uint64_t v = n - 1; v > 0; v /= b) ++c;
    return c;
}

// Smallest operand count at which a carry field of p base-b digits
// overflows when each operand is M digits wide: the residual past b^p
// must push the all-(b^M - 1) total over b^p.
inline std::uint64_t column_transition(std::uint64_t b, int m, int p) {
    std::uint64_t bp = 1, bm = 1;
    for (int i = 0; i < p; ++i) bp *= b;
    for (int i = 0; i < m; ++i) bm *= b;
    return bp + (bp + bm - 2) / (bm - 1);
}

// 3-bit ones count of a 4-bit column, the lookup at the heart of the
// serial module.
inline int ones_count4(unsigned nibble) {
    nibble &= 0xF;
    return (nibble & 1) + ((nibble >> 1) & 1) + ((nibble >> 2) & 1) + (nibble >> 3);
}

struct Add4Result {
    std::uint32_t sum = 0;   // low M bits
    std::uint32_t carry = 0; // 2-bit field above the sum
    int clocks = 0;
    std::vector<int> column_counts; // ones count per column, LSB first
};

// Serial 4-operand adder over M binary columns: each clock one column is
// collapsed through the ones-count lookup, folded into the 2-bit carry
// buffer, and its low bit shifted into the result. One extra clock
// appends the carry buffer. M+1 clocks total.
inline Add4Result add4xm_serial(const std::array<std::uint32_t, 4>& ops, int m) {
    if (m < 1 || m > 30) throw std::invalid_argument("add4xm_serial: 1 <= M <= 30");
    for (auto v : ops)
        if (v >> m) throw std::invalid_argument("add4xm_serial: operand wider than M");
    Add4Result r;
    std::uint32_t carry_buf = 0; // 2 bits
    for (int i = 0; i < m; ++i) {
        unsigned col = 0;
        for (int j = 0; j < 4; ++j) col |= ((ops[j] >> i) & 1u) << j;
        int cnt = ones_count4(col);
        r.column_counts.push_back(cnt);
        std::uint32_t total = std::uint32_t(cnt) + carry_buf; // 3-bit add
        r.sum |= (total & 1u) << i;
        carry_buf = total >> 1;
    }
    r.carry = carry_buf;
    r.clocks = m + 1;
    return r;
}

// Combinational counterpart: same sum/carry split, one clock.
inline Add4Result add4x4_parallel(const std::array<std::uint32_t, 4>& ops) {
    Add4Result r;
    std::uint32_t total = 0;
    for (auto v : ops) {
        if (v >> 4) throw std::invalid_argument("add4x4_parallel: 4-bit operands");
        total += v;
    }
    r.sum = total & 0xF;
    r.carry = total >> 4;
    r.clocks = 1;
    return r;
}

struct TreeStage {
    int sum_modules = 0;   // 4xM serial modules collapsing partial sums
    int carry_modules = 0; // 4xW modules collapsing carry fields
};

struct AdderTree {
    int n = 0, m = 0;
    int levels = 0;       // ceil(log4 N) sum levels
    int carry_width = 0;  // W = digits needed for the total carry
    std::vector<TreeStage> stages;
    int total_clocks = 0;
};

inline AdderTree build_adder_tree(int n, int m) {
    if (n < 2) throw std::invalid_argument("build_adder_tree: N >= 2");
    AdderTree t;
    t.n = n;
    t.m = m;
    t.carry_width = carry_columns(std::uint64_t(n), 2);
    int values = n;
    while (values > 1) {
        TreeStage s;
        s.sum_modules = (values + 3) / 4;
        t.stages.push_back(s);
        values = s.sum_modules;
        ++t.levels;
        t.total_clocks += m + 1;
    }
    // Carry fields produced by every sum module are collapsed by 4xW
    // modules in as many rounds as needed. A trailing partial group is
    // deferred to the next round rather than spending a module on it.
    int carries = 0;
    for (const auto& s : t.stages) carries += s.sum_modules;
    while (carries > 1) {
        int full = carries / 4;
        int mods = full > 0 ? full : 1;
        int left = full > 0 ? carries % 4 : 0;
        t.stages.push_back({0, mods});
        carries = mods + left;
        t.total_clocks += t.carry_width + 1;
    }
    return t;
}

struct TreeSumResult {
    std::uint64_t sum = 0;
    int clocks = 0;
    int sum_modules = 0;
    int carry_modules = 0;
    // Carry-out of every carry-collapse module; structurally all zero
    // because any partial carry total fits the W-bit field.
    std::vector<std::uint32_t> carry_module_overflow;
};

// Behavioural reduction of up to N M-bit operands through the tree.
inline TreeSumResult tree_add(const std::vector<std::uint32_t>& operands, int m) {
    if (operands.empty()) throw std::invalid_argument("tree_add: no operands");
    TreeSumResult r;
    int w = std::max(2, carry_columns(operands.size() < 2 ? 2 : operands.size(), 2));
    std::vector<std::uint32_t> values = operands;
    std::vector<std::uint32_t> carries;
    while (values.size() > 1) {
        std::vector<std::uint32_t> next;
        for (std::size_t i = 0; i < values.size(); i += 4) {
            std::array<std::uint32_t, 4> g{0, 0, 0, 0};
            for (std::size_t j = 0; j < 4 && i + j < values.size(); ++j) g[j] = values[i + j];
            auto a = add4xm_serial(g, m);
            next.push_back(a.sum);
            carries.push_back(a.carry);
            ++r.sum_modules;
        }
        r.clocks += m + 1;
        values = std::move(next);
    }
    while (carries.size() > 1) {
        std::vector<std::uint32_t> next;
        std::size_t i = 0;
        auto run = [&](std::size_t base, std::size_t count) {
            std::array<std::uint32_t, 4> g{0, 0, 0, 0};
            for (std::size_t j = 0; j < count; ++j) g[j] = carries[base + j];
            auto a = add4xm_serial(g, w);
            next.push_back(a.sum);
            r.carry_module_overflow.push_back(a.carry);
            ++r.carry_modules;
        };
        for (; i + 4 <= carries.size(); i += 4) run(i, 4);
        if (i == 0) {
            run(0, carries.size());
            i = carries.size();
        }
        for (; i < carries.size(); ++i) next.push_back(carries[i]);
        r.clocks += w + 1;
        carries = std::move(next);
    }
    std::uint64_t carry_total = carries.empty() ? 0 : carries.front();
    r.sum = std::uint64_t(values.front()) + (carry_total << m);
    return r;
}

// Oracle.
inline std::uint64_t plain_sum(const std::vector<std::uint32_t>& operands) {
    std::uint64_t s = 0;
    for (auto v : operands) s += v;
    return s;
}

} // namespace arn
