#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <arn/neuron.hpp>

#include <random>

using namespace arn;

namespace {

// Register dump of the fabricated 16-resonator node (rho=2.42, no
// normalizer): input, centre and per-lane output words plus the 0x3DA7
// total.
constexpr std::uint16_t kX[16] = {0x0800, 0x0333, 0x0547, 0x0C7A, 0x027D, 0x0428,
                                  0x0333, 0x08F5, 0x0570, 0x0E66, 0x0970, 0x0B33,
                                  0x0800, 0x0A8F, 0x0FDA, 0x0DC2};
constexpr std::uint16_t kXm[16] = {0x0400, 0x0266, 0x0214, 0x0800, 0x00CC, 0x035C,
                                   0x0199, 0x06E1, 0x0333, 0x0B33, 0x0666, 0x0599,
                                   0x03AE, 0x09C2, 0x0D1E, 0x0C51};
constexpr std::uint16_t kLane[16] = {0x03AD, 0x0400, 0x03D7, 0x03AD, 0x03F8, 0x0400,
                                     0x03F8, 0x03EA, 0x03EA, 0x03D7, 0x03D7, 0x036D,
                                     0x03AD, 0x0400, 0x03EA, 0x0400};

const double kMlpX[16] = {0.09, 0.15, 0.12, 0.05, 0.009, 0.123, 0.087, 0.201,
                          0.05, 0.15, 0.27, 0.02, 0.1, 0.07, 0.054, 0.18};
const double kMlpW[16] = {0.1, 0.01, 0.2, 0.5, 0.16, 0.21, 0.19, 0.09,
                          0.25, 0.02, 0.12, 0.26, 0.36, 0.6, 0.29, 0.63};

} // namespace

TEST_CASE("sixteen-resonator node reproduces the register dump") {
    ArnNeuron16 n;
    for (int i = 0; i < 16; ++i) n.centres[i] = Fx16{kXm[i], FxSign::Signed};
    n.lut = hw_resonator_lut_2p42();
    n.normalize = false;
    std::array<Fx16, 16> x;
    for (int i = 0; i < 16; ++i) x[i] = Fx16{kX[i], FxSign::Signed};
    auto r = arn_forward(n, x);
    for (int i = 0; i < 16; ++i) {
        int diff = int(r.lane_outputs[i].raw) - int(kLane[i]);
        CHECK(std::abs(diff) <= 1);
    }
    CHECK(std::abs(int(r.raw_sum) - 0x3DA7) <= 2);
    CHECK(r.sum.raw == r.raw_sum);
    CHECK(r.output.raw == r.raw_sum); // normalizer off
}

TEST_CASE("normalized output peaks at one") {
    std::array<double, 16> centres;
    for (int i = 0; i < 16; ++i) centres[i] = 0.05 * i;
    auto n = make_arn_neuron(centres, 2.42);
    std::array<Fx16, 16> x;
    for (int i = 0; i < 16; ++i) x[i] = fx_encode(centres[i], FxSign::Signed);
    auto r = arn_forward(n, x);
    // Every lane at its centre: lane outputs 0.25, normalized sum 1.0.
    CHECK(fx_decode(r.output) == doctest::Approx(1.0).epsilon(2e-3));
    double exact = arn_forward_exact(centres, centres, 2.42);
    CHECK(exact == doctest::Approx(1.0));
}

TEST_CASE("fixed-point node tracks the exact aggregate") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int iter = 0; iter < 50; ++iter) {
        std::array<double, 16> xs, cs;
        for (int i = 0; i < 16; ++i) {
            xs[i] = U(rng);
            cs[i] = U(rng);
        }
        auto n = make_arn_neuron(cs, 2.42);
        std::array<Fx16, 16> x;
        for (int i = 0; i < 16; ++i) x[i] = fx_encode(xs[i], FxSign::Signed);
        auto r = arn_forward(n, x);
        CHECK(fx_decode(r.output) ==
              doctest::Approx(arn_forward_exact(xs, cs, 2.42)).epsilon(0.02));
    }
}

TEST_CASE("node latency accounting") {
    std::array<double, 16> c{};
    auto n = make_arn_neuron(c, 2.42);
    std::array<Fx16, 16> x{};
    for (auto& v : x) v = Fx16{0, FxSign::Signed};
    auto r = arn_forward(n, x);
    // Lookup + two sum levels + two carry rounds + normalizer multiply.
    CHECK(r.clocks >= 17 + 2 * 17 + 2 * 5);
    CHECK(r.clocks <= 100);
}

TEST_CASE("perceptron exact preactivation and output") {
    std::array<double, 16> xs, ws;
    for (int i = 0; i < 16; ++i) {
        xs[i] = kMlpX[i];
        ws[i] = kMlpW[i];
    }
    double pre = mlp_preact_exact(xs, ws);
    CHECK(std::fabs(pre - 0.38151) < 1e-4);
    double out = logistic(pre);
    CHECK(std::fabs(out - 0.5942) < 1e-3);

    auto p = make_perceptron(ws);
    std::array<Fx16, 16> x;
    for (int i = 0; i < 16; ++i) x[i] = fx_encode(xs[i], FxSign::Signed);
    auto r = mlp_forward(p, x);
    CHECK(std::fabs(fx_decode(r.output) - out) < 0.04);
    CHECK(fx_decode(r.preact) <= pre); // truncation only loses mass
    CHECK(fx_decode(r.preact) == doctest::Approx(pre).epsilon(0.02));
}

TEST_CASE("perceptron with mixed-sign weights") {
    std::array<double, 16> xs{}, ws{};
    for (int i = 0; i < 16; ++i) {
        xs[i] = 0.25;
        ws[i] = (i % 2) ? 0.5 : -0.5;
    }
    auto p = make_perceptron(ws);
    std::array<Fx16, 16> x;
    for (int i = 0; i < 16; ++i) x[i] = fx_encode(xs[i], FxSign::Signed);
    auto r = mlp_forward(p, x);
    CHECK(fx_decode(r.preact) == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(fx_decode(r.output) == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("serial array throughput lemma") {
    auto win = throughput_compare(32, 17, 17 * 1000);
    CHECK(win.serial_wins);
    CHECK(win.serial_ops == 32000);
    CHECK(win.parallel_ops == 17000);
    auto lose = throughput_compare(12, 17, 17 * 1000);
    CHECK_FALSE(lose.serial_wins);
    // Boundary: equal ratios tie on horizons that are multiples of R_T.
    auto tie = throughput_compare(17, 17, 17 * 50);
    CHECK(tie.serial_ops == tie.parallel_ops);
    CHECK_FALSE(tie.serial_wins);
    CHECK(area_ratio(2144, 66) == 32);
}
