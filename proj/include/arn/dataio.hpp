#pragma once

// Dataset handling: the big-endian IDX image/label container, a plain
// CSV form (label followed by row-major pixels), and deterministic
// per-class sampling that keeps train and test draws disjoint.

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace arn {

struct Dataset {
    int rows = 0, cols = 0;
    std::vector<std::vector<float>> images; // pixels scaled to [0,1]
    std::vector<int> labels;

    std::size_t size() const { return images.size(); }
};

namespace detail {

inline std::uint32_t read_be32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("idx: truncated header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | b[3];
}

} // namespace detail

inline Dataset load_idx(const std::string& image_path, const std::string& label_path) {
    std::ifstream imgs(image_path, std::ios::binary);
    if (!imgs) throw std::runtime_error("idx: cannot open " + image_path);
    if (detail::read_be32(imgs) != 0x00000803)
        throw std::runtime_error("idx: bad image magic in " + image_path);
    std::uint32_t n = detail::read_be32(imgs);
    std::uint32_t rows = detail::read_be32(imgs);
    std::uint32_t cols = detail::read_be32(imgs);

    std::ifstream lbls(label_path, std::ios::binary);
    if (!lbls) throw std::runtime_error("idx: cannot open " + label_path);
    if (detail::read_be32(lbls) != 0x00000801)
        throw std::runtime_error("idx: bad label magic in " + label_path);
    if (detail::read_be32(lbls) != n)
        throw std::runtime_error("idx: image/label count mismatch");

    Dataset d;
    d.rows = int(rows);
    d.cols = int(cols);
    std::vector<unsigned char> buf(rows * cols);
    for (std::uint32_t i = 0; i < n; ++i) {
        imgs.read(reinterpret_cast<char*>(buf.data()), buf.size());
        int lb = lbls.get();
        if (!imgs || lb == EOF) throw std::runtime_error("idx: truncated payload");
        std::vector<float> px(buf.size());
        for (std::size_t j = 0; j < buf.size(); ++j) px[j] = buf[j] / 255.0f;
        d.images.push_back(std::move(px));
        d.labels.push_back(lb);
    }
    return d;
}

inline void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("csv: cannot open " + path);
    for (std::size_t i = 0; i < d.size(); ++i) {
        os << d.labels[i];
        for (float p : d.images[i]) os << ',' << int(p * 255.0f + 0.5f);
        os << '\n';
    }
}

inline Dataset load_csv(const std::string& path, int rows = 28, int cols = 28) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("csv: cannot open " + path);
    Dataset d;
    d.rows = rows;
    d.cols = cols;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("csv: bad row");
        d.labels.push_back(std::stoi(cell));
        std::vector<float> px;
        while (std::getline(ss, cell, ',')) px.push_back(std::stoi(cell) / 255.0f);
        if (int(px.size()) != rows * cols) throw std::runtime_error("csv: bad pixel count");
        d.images.push_back(std::move(px));
    }
    return d;
}

enum class Split { Train, Test };

// Deterministic class-sorted draw: each class's pool is permuted by a
// seeded Fisher-Yates, the train split takes from the front and the test
// split from the back, so equal seeds never overlap between splits.
inline Dataset sample_per_class(const Dataset& pool, int per_class, std::uint32_t seed,
                                Split split) {
    Dataset out;
    out.rows = pool.rows;
    out.cols = pool.cols;
    for (int c = 0; c <= 9; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (pool.labels[i] == c) idx.push_back(i);
        if (int(idx.size()) < per_class)
            throw std::runtime_error("sample: class pool too small");
        std::mt19937 rng(seed * 10u + std::uint32_t(c));
        for (std::size_t i = idx.size() - 1; i > 0; --i) {
            std::size_t j = rng() % (i + 1);
            std::swap(idx[i], idx[j]);
        }
        for (int k = 0; k < per_class; ++k) {
            std::size_t src = split == Split::Train ? idx[k] : idx[idx.size() - 1 - k];
            out.images.push_back(pool.images[src]);
            out.labels.push_back(pool.labels[src]);
        }
    }
    return out;
}

} // namespace arn
