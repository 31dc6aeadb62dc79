#pragma once

// Two-layer resonance-network image classifier. Layer 1 holds 7x7 tile
// prototypes matched by the normalized 49-resonator aggregate; layer 2
// holds labeled 16-index tile patterns matched by exact position
// agreement. Nodes are only ever appended, never retrained.

#include "dataio.hpp"
#include "resonance.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace arn {

inline constexpr int TILE_SIDE = 7;
inline constexpr int TILE_PIXELS = 49;
inline constexpr int TILES_PER_IMAGE = 16;

using Tile = std::array<float, TILE_PIXELS>;
using TilePattern = std::array<int, TILES_PER_IMAGE>;

struct NetConfig {
    double rho = 2.42, T = 0.9;   // layer-1 steepness and firing threshold
    double rho2 = 2.42, T2 = 0.9; // layer-2 creation threshold
    int train_size = 0;
    std::uint32_t seed = 0;
};

struct L1Node {
    std::array<float, TILE_PIXELS> resonant{};
};

struct L2Node {
    int label = -1;
    TilePattern pattern{};
};

struct ArnNet {
    NetConfig cfg;
    std::vector<L1Node> layer1; // node index i+1 refers to layer1[i]
    std::vector<L2Node> layer2;
};

// Row-major 4x4 grid of contiguous 7x7 tiles.
inline std::array<Tile, TILES_PER_IMAGE> tile_image(const std::vector<float>& img,
                                                    int rows = 28, int cols = 28) {
    if (rows != 28 || cols != 28 || img.size() != 784)
        throw std::invalid_argument("tile_image: 28x28 image required");
    std::array<Tile, TILES_PER_IMAGE> tiles;
    for (int t = 0; t < TILES_PER_IMAGE; ++t) {
        int tr = t / 4, tc = t % 4;
        for (int r = 0; r < TILE_SIDE; ++r)
            for (int c = 0; c < TILE_SIDE; ++c)
                tiles[t][r * TILE_SIDE + c] = img[(tr * 7 + r) * 28 + (tc * 7 + c)];
    }
    return tiles;
}

namespace detail {

// Normalized 49-resonator aggregate with an early bail-out once the
// remaining lanes cannot lift the sum past `beat`.
inline double tile_aggregate(const Tile& x, const std::array<float, TILE_PIXELS>& xm,
                             double rho, double beat = -1.0) {
    double s = 0.0;
    for (int i = 0; i < TILE_PIXELS; ++i) {
        double X = 1.0 / (1.0 + std::exp(-rho * (double(x[i]) - xm[i])));
        s += X * (1.0 - X);
        if ((i & 7) == 7 && beat >= 0.0) {
            double bound = (s + 0.25 * (TILE_PIXELS - 1 - i)) * (4.0 / TILE_PIXELS);
            if (bound <= beat) return 0.0;
        }
    }
    return s * (4.0 / TILE_PIXELS);
}

inline std::array<unsigned char, TILE_PIXELS> tile_key(const Tile& t) {
    std::array<unsigned char, TILE_PIXELS> k;
    for (int i = 0; i < TILE_PIXELS; ++i)
        k[i] = static_cast<unsigned char>(t[i] * 255.0f + 0.5f);
    return k;
}

} // namespace detail

struct L1Match {
    int index = 0; // 1-based; 0 = miss
    double output = 0.0;
};

// Winner = node with the strictly largest aggregate above T; exact ties
// keep the earlier (lower-index) node.
inline L1Match l1_match(const ArnNet& net, const Tile& tile) {
    L1Match best;
    for (std::size_t i = 0; i < net.layer1.size(); ++i) {
        double y = detail::tile_aggregate(tile, net.layer1[i].resonant, net.cfg.rho,
                                          best.output);
        if (y > best.output) {
            best.output = y;
            best.index = int(i) + 1;
        }
    }
    if (best.output <= net.cfg.T) best.index = 0;
    return best;
}

// Tile-to-index memo; valid because an appended prototype reproduces its
// own tile at peak output 1.0, which no later node can beat.
using TileCache = std::map<std::array<unsigned char, TILE_PIXELS>, int>;

namespace detail {

inline int l1_resolve(ArnNet& net, const Tile& tile, bool create, TileCache* cache) {
    TileCache::iterator it;
    if (cache) {
        it = cache->find(tile_key(tile));
        if (it != cache->end()) return it->second;
    }
    L1Match m = l1_match(net, tile);
    int idx = m.index;
    if (idx == 0 && create) {
        L1Node n;
        n.resonant = tile;
        net.layer1.push_back(n);
        idx = int(net.layer1.size());
    }
    if (cache && (idx != 0 || !create)) (*cache)[tile_key(tile)] = idx;
    return idx;
}

} // namespace detail

inline TilePattern image_pattern(ArnNet& net, const std::vector<float>& img, bool create,
                                 TileCache* cache = nullptr) {
    auto tiles = tile_image(img);
    TilePattern p{};
    for (int t = 0; t < TILES_PER_IMAGE; ++t)
        p[t] = detail::l1_resolve(net, tiles[t], create, cache);
    return p;
}

// Fraction of positions where the two patterns carry the same node
// index. The miss sentinel 0 never counts as agreement.
inline double pattern_score(const TilePattern& a, const TilePattern& b) {
    int hits = 0;
    for (int i = 0; i < TILES_PER_IMAGE; ++i)
        if (a[i] != 0 && a[i] == b[i]) ++hits;
    return hits / double(TILES_PER_IMAGE);
}

inline ArnNet train(const Dataset& ds, const NetConfig& cfg) {
    ArnNet net;
    net.cfg = cfg;
    net.cfg.train_size = int(ds.size());
    TileCache cache;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        int label = ds.labels[i];
        if (label < 0 || label > 9) throw std::invalid_argument("train: label outside 0-9");
        TilePattern p = image_pattern(net, ds.images[i], true, &cache);
        double best = -1.0;
        for (const auto& n : net.layer2)
            if (n.label == label) best = std::max(best, pattern_score(p, n.pattern));
        if (best < cfg.T2) net.layer2.push_back({label, p});
    }
    // Consolidation pass: layer-1 keeps growing during the first sweep,
    // so patterns stored early can name weaker prototypes than the ones
    // the finished layer would pick. Re-resolve every image against the
    // final layer 1 and rebuild layer 2 from those stable patterns; the
    // prototypes themselves are untouched.
    net.layer2.clear();
    TileCache stable;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        TilePattern p = image_pattern(net, ds.images[i], false, &stable);
        double best = -1.0;
        for (const auto& n : net.layer2)
            if (n.label == ds.labels[i]) best = std::max(best, pattern_score(p, n.pattern));
        if (best < cfg.T2) net.layer2.push_back({ds.labels[i], p});
    }
    return net;
}

struct Verdict {
    enum class Kind { NoRecognition, Single, Multiple };
    Kind kind = Kind::NoRecognition;
    int label = -1;   // set for single winners
    double output = 0; // winning score
    std::vector<std::pair<int, double>> winners; // (layer-2 node index, score)
    TilePattern path{};
};

// Score a resolved tile pattern against layer 2: per class the best
// node (ties keep the earlier node), then the verdict goes to the class
// or classes holding the global maximum. A zero global maximum means
// nothing recognized the pattern.
inline Verdict classify_pattern(const ArnNet& net, const TilePattern& p) {
    Verdict v;
    v.path = p;
    std::array<int, 10> best_node;
    std::array<double, 10> best_score;
    best_node.fill(-1);
    best_score.fill(0.0);
    for (std::size_t i = 0; i < net.layer2.size(); ++i) {
        double s = pattern_score(p, net.layer2[i].pattern);
        int c = net.layer2[i].label;
        if (s > best_score[c]) {
            best_score[c] = s;
            best_node[c] = int(i);
        }
    }
    double top = 0.0;
    for (int c = 0; c < 10; ++c) top = std::max(top, best_score[c]);
    if (top <= 0.0) return v;
    for (int c = 0; c < 10; ++c)
        if (best_score[c] == top) v.winners.emplace_back(best_node[c], top);
    v.output = top;
    if (v.winners.size() == 1) {
        v.kind = Verdict::Kind::Single;
        v.label = net.layer2[v.winners[0].first].label;
    } else {
        v.kind = Verdict::Kind::Multiple;
    }
    return v;
}

inline Verdict classify(const ArnNet& net, const std::vector<float>& img,
                        TileCache* cache = nullptr) {
    ArnNet& mut = const_cast<ArnNet&>(net); // create=false leaves net untouched
    return classify_pattern(net, image_pattern(mut, img, false, cache));
}

// Replaying a stored path reproduces the verdict without touching the
// image again.
inline Verdict replay_path(const ArnNet& net, const TilePattern& path) {
    return classify_pattern(net, path);
}

// Ambiguity policies. "relax-rho" rescores each tied class with a
// slightly softened steepness: for every layer-2 node of that class,
// each non-sentinel position of its pattern is re-evaluated as the
// aggregate of the image tile against the named layer-1 prototype at
// rho*(1-delta), averaged over the 16 positions. The class whose best
// node sits closest to the image pulls ahead.
enum class AmbiguityPolicy { Report, RelaxRho };

inline Verdict resolve_ambiguity(const ArnNet& net, const std::vector<float>& img,
                                 const Verdict& v, AmbiguityPolicy policy,
                                 double delta = 0.05) {
    if (v.kind != Verdict::Kind::Multiple || policy == AmbiguityPolicy::Report ||
        delta == 0.0)
        return v;
    auto tiles = tile_image(img);
    double rho = net.cfg.rho * (1.0 - delta);
    Verdict out = v;
    double best = -1.0;
    int best_node = -1;
    bool tie = false;
    for (auto [node_idx, score] : v.winners) {
        int cls = net.layer2[node_idx].label;
        double class_best = -1.0;
        int class_node = node_idx;
        for (std::size_t n = 0; n < net.layer2.size(); ++n) {
            if (net.layer2[n].label != cls) continue;
            const auto& pat = net.layer2[n].pattern;
            double s = 0.0;
            for (int t = 0; t < TILES_PER_IMAGE; ++t)
                if (pat[t] != 0)
                    s += detail::tile_aggregate(tiles[t], net.layer1[pat[t] - 1].resonant, rho);
            s /= TILES_PER_IMAGE;
            if (s > class_best) {
                class_best = s;
                class_node = int(n);
            }
        }
        if (class_best > best) {
            best = class_best;
            best_node = class_node;
            tie = false;
        } else if (class_best == best) {
            tie = true;
        }
    }
    if (tie || best_node < 0) return v;
    out.kind = Verdict::Kind::Single;
    out.label = net.layer2[best_node].label;
    out.winners = {{best_node, v.output}};
    return out;
}

struct ConfusionResult {
    std::array<std::array<double, 10>, 10> matrix{}; // [true][predicted]
    double accuracy = 0.0;            // diagonal mass / sample count
    double wrong_rate = 0.0;          // mass of winners excluding the true class
    int singles = 0, multiples = 0, rejects = 0;
};

inline ConfusionResult confusion_matrix(const ArnNet& net, const Dataset& test,
                                        AmbiguityPolicy policy = AmbiguityPolicy::Report,
                                        double delta = 0.05) {
    ConfusionResult r;
    TileCache cache;
    for (std::size_t i = 0; i < test.size(); ++i) {
        Verdict v = classify(net, test.images[i], &cache);
        if (v.kind == Verdict::Kind::Multiple)
            v = resolve_ambiguity(net, test.images[i], v, policy, delta);
        int t = test.labels[i];
        switch (v.kind) {
        case Verdict::Kind::NoRecognition: ++r.rejects; break;
        case Verdict::Kind::Single: ++r.singles; break;
        case Verdict::Kind::Multiple: ++r.multiples; break;
        }
        if (v.winners.empty()) continue;
        double share = 1.0 / double(v.winners.size());
        for (auto [node_idx, score] : v.winners)
            r.matrix[t][net.layer2[node_idx].label] += share;
    }
    double diag = 0.0, off = 0.0;
    for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b)
            (a == b ? diag : off) += r.matrix[a][b];
    if (!test.images.empty()) {
        r.accuracy = diag / double(test.size());
        r.wrong_rate = off / double(test.size());
    }
    return r;
}

// Deterministic small perturbations for augmentation.
inline std::vector<float> translate_image(const std::vector<float>& img, int dr, int dc) {
    if (dr < -1 || dr > 1 || dc < -1 || dc > 1)
        throw std::invalid_argument("translate_image: shifts limited to +-1");
    std::vector<float> out(784, 0.0f);
    for (int r = 0; r < 28; ++r)
        for (int c = 0; c < 28; ++c) {
            int sr = r - dr, sc = c - dc;
            if (sr >= 0 && sr < 28 && sc >= 0 && sc < 28) out[r * 28 + c] = img[sr * 28 + sc];
        }
    return out;
}

inline std::vector<float> rotate_image(const std::vector<float>& img, double degrees) {
    if (std::fabs(degrees) > 15.0)
        throw std::invalid_argument("rotate_image: rotation limited to +-15 degrees");
    if (degrees == 0.0) return img;
    std::vector<float> out(784, 0.0f);
    constexpr double pi = 3.14159265358979323846;
    double th = degrees * pi / 180.0, cx = 13.5, cy = 13.5;
    double ct = std::cos(th), st = std::sin(th);
    for (int r = 0; r < 28; ++r)
        for (int c = 0; c < 28; ++c) {
            // Inverse map with nearest-neighbour pick.
            double x = c - cx, y = r - cy;
            int sc = int(std::lround(ct * x + st * y + cx));
            int sr = int(std::lround(-st * x + ct * y + cy));
            if (sr >= 0 && sr < 28 && sc >= 0 && sc < 28) out[r * 28 + c] = img[sr * 28 + sc];
        }
    return out;
}

struct PerturbSpec {
    std::vector<double> rotations; // degrees, each within +-15
    bool translations = false;     // the four +-1 pixel shifts
};

inline std::vector<std::vector<float>> perturb(const std::vector<float>& img,
                                               const PerturbSpec& spec) {
    std::vector<std::vector<float>> out;
    for (double d : spec.rotations) out.push_back(rotate_image(img, d));
    if (spec.translations)
        for (auto [dr, dc] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
            out.push_back(translate_image(img, dr, dc));
    return out;
}

// Standard augmentation recipe: each source image contributes itself,
// rotations of +-3/+-5/+-8 degrees, the four one-pixel shifts, and the
// four shifts of the +-5 degree rotations (19 images per original).
inline Dataset augment_dataset(const Dataset& ds) {
    Dataset out = ds;
    PerturbSpec base;
    base.rotations = {-8.0, -5.0, -3.0, 3.0, 5.0, 8.0};
    base.translations = true;
    PerturbSpec shifts_only;
    shifts_only.translations = true;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (auto& im : perturb(ds.images[i], base)) {
            out.images.push_back(std::move(im));
            out.labels.push_back(ds.labels[i]);
        }
        for (double deg : {-5.0, 5.0}) {
            auto rot = rotate_image(ds.images[i], deg);
            for (auto& im : perturb(rot, shifts_only)) {
                out.images.push_back(std::move(im));
                out.labels.push_back(ds.labels[i]);
            }
        }
    }
    return out;
}

// Flat text model store.
inline void save_model(const ArnNet& net, const std::string& path, bool hex_exact = false) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_model: cannot open " + path);
    os << "arnmodel v1 " << (hex_exact ? "hex" : "dec") << '\n';
    os.precision(9);
    os << net.cfg.rho << ' ' << net.cfg.T << ' ' << net.cfg.rho2 << ' ' << net.cfg.T2 << ' '
       << net.cfg.train_size << ' ' << net.cfg.seed << '\n';
    os << "L1 " << net.layer1.size() << '\n';
    for (const auto& n : net.layer1) {
        for (int i = 0; i < TILE_PIXELS; ++i) {
            if (i) os << ' ';
            if (hex_exact) os << std::hexfloat << double(n.resonant[i]) << std::defaultfloat;
            else os << n.resonant[i];
        }
        os << '\n';
    }
    os << "L2 " << net.layer2.size() << '\n';
    for (const auto& n : net.layer2) {
        os << n.label;
        for (int idx : n.pattern) os << ' ' << idx;
        os << '\n';
    }
}

inline ArnNet load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_model: cannot open " + path);
    std::string magic, ver, enc;
    is >> magic >> ver >> enc;
    if (magic != "arnmodel" || ver != "v1" || (enc != "dec" && enc != "hex"))
        throw std::runtime_error("load_model: unsupported header");
    ArnNet net;
    is >> net.cfg.rho >> net.cfg.T >> net.cfg.rho2 >> net.cfg.T2 >> net.cfg.train_size >>
        net.cfg.seed;
    std::string tag;
    std::size_t n1 = 0, n2 = 0;
    is >> tag >> n1;
    if (tag != "L1" || !is) throw std::runtime_error("load_model: bad layer-1 header");
    for (std::size_t i = 0; i < n1; ++i) {
        L1Node node;
        for (int j = 0; j < TILE_PIXELS; ++j) {
            std::string tok;
            is >> tok; // std::stod also accepts the hex-exact form
            if (tok.empty()) throw std::runtime_error("load_model: truncated layer 1");
            node.resonant[j] = float(std::stod(tok));
        }
        net.layer1.push_back(node);
    }
    is >> tag >> n2;
    if (tag != "L2" || !is) throw std::runtime_error("load_model: bad layer-2 header");
    for (std::size_t i = 0; i < n2; ++i) {
        L2Node node;
        is >> node.label;
        for (int& idx : node.pattern) {
            is >> idx;
            if (idx < 0 || idx > int(n1))
                throw std::runtime_error("load_model: pattern index out of range");
        }
        net.layer2.push_back(node);
    }
    if (!is) throw std::runtime_error("load_model: truncated file");
    return net;
}

} // namespace arn
