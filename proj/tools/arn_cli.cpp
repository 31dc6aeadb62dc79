// Batch front end: train/test the two-layer classifier, audit the LUT
// approximations, verify the multi-operand adder bounds, compare serial
// vs parallel throughput, and dump single-neuron register traces.
//
// Every report is deterministic for a fixed flag set (including the
// seed); the exit status is nonzero iff an internal oracle fails.
#include <CLI11.hpp>

#include <arn/arnnet.hpp>
#include <arn/dataio.hpp>
#include <arn/lut.hpp>
#include <arn/moadder.hpp>
#include <arn/neuron.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace arn;

namespace {

std::ofstream open_report(const std::string& out_dir, const std::string& name) {
    fs::create_directories(out_dir);
    std::ofstream os(fs::path(out_dir) / name);
    if (!os) throw std::runtime_error("cannot open report file " + name + " under " + out_dir);
    return os;
}

Fx16 parse_hex16(const std::string& tok, FxSign sign) {
    std::size_t pos = 0;
    unsigned long v = std::stoul(tok, &pos, 16);
    if (pos != tok.size() || v > 0xFFFF)
        throw CLI::ValidationError("hex word", "'" + tok + "' is not a 16-bit hex value");
    return {static_cast<std::uint16_t>(v), sign};
}

int cmd_train(const std::string& images, const std::string& labels, double rho, double T,
              double rho2, double T2, int train_size, unsigned seed, bool augment,
              const std::string& out_dir) {
    Dataset pool = load_idx(images, labels);
    Dataset tr = sample_per_class(pool, train_size, seed, Split::Train);
    if (augment) tr = augment_dataset(tr);
    NetConfig cfg;
    cfg.rho = rho;
    cfg.T = T;
    cfg.rho2 = rho2;
    cfg.T2 = T2;
    cfg.seed = seed;
    ArnNet net = train(tr, cfg);
    fs::create_directories(out_dir);
    save_model(net, (fs::path(out_dir) / "model.txt").string(), true);

    auto os = open_report(out_dir, "train_summary.txt");
    std::ostringstream body;
    body << "rho=" << rho << " T=" << T << " rho2=" << rho2 << " T2=" << T2
         << " train-size=" << train_size << " seed=" << seed
         << " augment=" << (augment ? 1 : 0) << '\n';
    body << "train images: " << tr.size() << '\n';
    body << "L1 nodes: " << net.layer1.size() << '\n';
    body << "L2 nodes: " << net.layer2.size() << '\n';
    os << body.str();
    std::cout << body.str();
    return 0;
}

int cmd_test(const std::string& model, const std::string& images, const std::string& labels,
             int test_size, unsigned seed, const std::string& resolve, double delta,
             const std::string& out_dir) {
    ArnNet net = load_model(model);
    Dataset pool = load_idx(images, labels);
    Dataset te = sample_per_class(pool, test_size, seed, Split::Test);
    AmbiguityPolicy policy =
        resolve == "relax-rho" ? AmbiguityPolicy::RelaxRho : AmbiguityPolicy::Report;
    ConfusionResult r = confusion_matrix(net, te, policy, delta);

    auto cm = open_report(out_dir, "confusion.csv");
    cm << "true\\pred";
    for (int c = 0; c < 10; ++c) cm << ',' << c;
    cm << '\n';
    for (int a = 0; a < 10; ++a) {
        cm << a;
        for (int b = 0; b < 10; ++b) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", r.matrix[a][b]);
            cm << ',' << buf;
        }
        cm << '\n';
    }

    // Per-verdict example index lists (indices into the sampled test set).
    auto vx = open_report(out_dir, "verdicts.txt");
    TileCache cache;
    std::vector<std::size_t> singles, multiples, rejects;
    for (std::size_t i = 0; i < te.size(); ++i) {
        Verdict v = classify(net, te.images[i], &cache);
        if (v.kind == Verdict::Kind::Multiple)
            v = resolve_ambiguity(net, te.images[i], v, policy, delta);
        switch (v.kind) {
        case Verdict::Kind::Single: singles.push_back(i); break;
        case Verdict::Kind::Multiple: multiples.push_back(i); break;
        case Verdict::Kind::NoRecognition: rejects.push_back(i); break;
        }
    }
    auto dump_list = [&vx](const char* name, const std::vector<std::size_t>& v) {
        vx << name << " (" << v.size() << "):";
        for (std::size_t k = 0; k < v.size() && k < 40; ++k) vx << ' ' << v[k];
        if (v.size() > 40) vx << " ...";
        vx << '\n';
    };
    dump_list("single", singles);
    dump_list("multiple", multiples);
    dump_list("no-recognition", rejects);

    auto os = open_report(out_dir, "test_summary.txt");
    std::ostringstream body;
    char acc[32], wr[32];
    std::snprintf(acc, sizeof acc, "%.4f", r.accuracy);
    std::snprintf(wr, sizeof wr, "%.4f", r.wrong_rate);
    body << "test images: " << te.size() << '\n'
         << "accuracy: " << acc << '\n'
         << "wrong-recognition: " << wr << '\n'
         << "singles: " << r.singles << " multiples: " << r.multiples
         << " rejects: " << r.rejects << '\n';
    os << body.str();
    std::cout << body.str();
    return 0;
}

int cmd_eval_approx(const std::string& curve_name, const std::string& method_name,
                    const std::string& spacing, double rho, double spacing_step,
                    const std::string& out_dir) {
    Curve curve;
    if (curve_name == "sigmoid") curve = {CurveKind::Sigmoid};
    else if (curve_name == "tanh") curve = {CurveKind::Tanh};
    else curve = {CurveKind::Resonator, rho};
    FitMethod method = method_name == "soi" ? FitMethod::Soi : FitMethod::Pwl;

    std::vector<double> pts;
    if (curve.kind == CurveKind::Resonator) pts = resonator_breakpoints(rho);
    else if (spacing == "uniform") pts = uniform_breakpoints(spacing_step);
    else pts = canonical_sigmoid_breakpoints();

    LutTable t = build_lut(curve, method, pts);
    double hi = t.x_max();
    AuditResult real = lut_audit(t, 0.0, hi);
    AuditResult fx = lut_audit_fx(t, 0.0, hi);

    std::ostringstream body;
    char b1[64], b2[64];
    std::snprintf(b1, sizeof b1, "%.4f%% at x=%.6f", real.max_rel_err_pct, real.argmax);
    std::snprintf(b2, sizeof b2, "%.4f%% at x=%.6f", fx.max_rel_err_pct, fx.argmax);
    body << "curve=" << curve_name << " method=" << method_name << " spacing=" << spacing;
    if (curve.kind == CurveKind::Resonator) body << " rho=" << rho;
    body << '\n';
    body << "points: " << t.points.size() << " segments: " << t.segment_count() << '\n';
    body << "max rel error " << b1 << '\n';
    body << "max rel error (Q4.12 datapath) " << b2 << '\n';
    body << "storage bytes (11-point, 4 tables): "
         << lut_storage_bytes(11, 4, method) << '\n';
    body << "eval clocks per query: " << lut_eval_clocks(method) << '\n';
    auto os = open_report(out_dir, "approx_report.txt");
    os << body.str();
    std::cout << body.str();
    return 0;
}

int cmd_verify_adder(int base, int max_n, int max_m, const std::string& out_dir) {
    auto os = open_report(out_dir, "adder_bounds.csv");
    os << "base,N,M,bound,observed_max_carry,transition_N\n";
    int violations = 0;
    for (int n = 2; n <= max_n; ++n) {
        std::uint64_t bound = tight_carry_bound(n, base);
        std::uint64_t observed = max_single_column_carry(n, base);
        if (observed > bound || bound > carry_upper_bound(n)) ++violations;
        for (int m = 1; m <= max_m; ++m) {
            // Smallest operand count that overflows an m-column carry
            // buffer one column wide at this base.
            std::uint64_t trans = column_transition(base, m, 1);
            os << base << ',' << n << ',' << m << ',' << bound << ',' << observed << ','
               << trans << '\n';
        }
    }

    // Exhaustive 4-operand nibble oracle at base 2.
    int add4_bad = 0;
    for (unsigned a = 0; a < 16 && base == 2; ++a)
        for (unsigned b = 0; b < 16; ++b)
            for (unsigned c = 0; c < 16; ++c)
                for (unsigned d = 0; d < 16; ++d) {
                    auto r = add4xm_serial({a, b, c, d}, 4);
                    if (((std::uint64_t(r.carry) << 4) | r.sum) != a + b + c + d) ++add4_bad;
                }

    std::ostringstream body;
    body << "base=" << base << " max-n=" << max_n << " max-m=" << max_m << '\n';
    body << "bound violations: " << violations << '\n';
    if (base == 2) body << "4-operand nibble oracle failures: " << add4_bad << '\n';
    auto sum = open_report(out_dir, "adder_summary.txt");
    sum << body.str();
    std::cout << body.str();
    return (violations || add4_bad) ? 1 : 0;
}

int cmd_bench_throughput(std::uint64_t area, std::uint64_t tpc, std::uint64_t horizon,
                         const std::string& out_dir) {
    auto os = open_report(out_dir, "throughput.csv");
    os << "clocks,parallel_ops,serial_ops\n";
    for (std::uint64_t t = tpc; t <= horizon; t += tpc) {
        ThroughputCompare c = throughput_compare(area, tpc, t);
        os << t << ',' << c.parallel_ops << ',' << c.serial_ops << '\n';
    }
    ThroughputCompare fin = throughput_compare(area, tpc, horizon);
    std::ostringstream body;
    body << "area-ratio=" << area << " clocks-per-op=" << tpc << " horizon=" << horizon << '\n';
    body << "parallel ops: " << fin.parallel_ops << '\n';
    body << "serial ops:   " << fin.serial_ops << '\n';
    body << "serial wins:  " << (fin.serial_wins ? "yes" : "no") << '\n';
    auto sum = open_report(out_dir, "throughput_summary.txt");
    sum << body.str();
    std::cout << body.str();
    return 0;
}

int cmd_neuron_sim(const std::vector<std::string>& inputs_hex,
                   const std::vector<std::string>& centres_hex,
                   const std::vector<std::string>& weights_hex, double rho, bool hw_lut,
                   const std::string& out_dir) {
    std::array<Fx16, 16> x{};
    for (int i = 0; i < 16; ++i) x[i] = parse_hex16(inputs_hex[i], FxSign::Signed);

    std::ostringstream body;
    if (!weights_hex.empty()) {
        Perceptron16 p = make_perceptron({});
        for (int i = 0; i < 16; ++i) p.weights[i] = parse_hex16(weights_hex[i], FxSign::Signed);
        MlpForwardResult r = mlp_forward(p, x);
        body << "lane  x     w     x*w\n";
        for (int i = 0; i < 16; ++i) {
            Fx16 prod = fx_mul_trunc(x[i], p.weights[i]);
            body << (i < 10 ? " " : "") << i << "    " << fx_to_hex(x[i]) << "  "
                 << fx_to_hex(p.weights[i]) << "  " << fx_to_hex(prod) << '\n';
        }
        body << "preact: " << fx_to_hex(r.preact) << '\n';
        body << "output: " << fx_to_hex(r.output) << '\n';
        body << "clocks: " << r.clocks << '\n';
    } else {
        ArnNeuron16 n = make_arn_neuron({}, rho);
        if (hw_lut) n.lut = hw_resonator_lut_2p42();
        for (int i = 0; i < 16; ++i)
            n.centres[i] = centres_hex.empty() ? Fx16{0, FxSign::Signed}
                                               : parse_hex16(centres_hex[i], FxSign::Signed);
        ArnForwardResult r = arn_forward(n, x);
        body << "lane  x     x_m   out\n";
        for (int i = 0; i < 16; ++i)
            body << (i < 10 ? " " : "") << i << "    " << fx_to_hex(x[i]) << "  "
                 << fx_to_hex(n.centres[i]) << "  " << fx_to_hex(r.lane_outputs[i]) << '\n';
        body << "sum:    " << fx_to_hex(r.sum) << '\n';
        body << "output: " << fx_to_hex(r.output) << '\n';
        body << "clocks: " << r.clocks << '\n';
    }
    auto os = open_report(out_dir, "neuron_trace.txt");
    os << body.str();
    std::cout << body.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Auto-resonance network simulator"};
    app.require_subcommand(1);

    std::string images = "data/mnist-images-idx3-ubyte";
    std::string labels = "data/mnist-labels-idx1-ubyte";
    std::string model = "model.txt";
    std::string out_dir = "reports";
    double rho = 2.42, threshold = 0.9, rho2 = 2.42, threshold2 = 0.9, delta = 0.05;
    int train_size = 50, test_size = 60, base = 2, max_n = 64, max_m = 4;
    unsigned seed = 1;
    bool augment = false, hw_lut = false;
    std::string curve = "sigmoid", method = "pwl", spacing = "nonuniform", resolve = "relax-rho";
    double spacing_step = 0.5;
    std::uint64_t area = 32, tpc = 17, horizon = 1700;
    std::vector<std::string> inputs_hex, centres_hex, weights_hex;

    auto* tr = app.add_subcommand("train", "Train the two-layer classifier");
    tr->add_option("--images", images);
    tr->add_option("--labels", labels);
    tr->add_option("--rho", rho)->check(CLI::PositiveNumber);
    tr->add_option("--threshold", threshold)->check(CLI::Range(1e-9, 1.0 - 1e-9));
    tr->add_option("--rho2", rho2)->check(CLI::PositiveNumber);
    tr->add_option("--threshold2", threshold2)->check(CLI::Range(1e-9, 1.0 - 1e-9));
    tr->add_option("--train-size", train_size)->check(CLI::PositiveNumber);
    tr->add_option("--seed", seed);
    tr->add_flag("--augment", augment, "augment the training set before training");
    tr->add_option("--out", out_dir);

    auto* te = app.add_subcommand("test", "Evaluate a trained model");
    te->add_option("--model", model);
    te->add_option("--images", images);
    te->add_option("--labels", labels);
    te->add_option("--test-size", test_size)->check(CLI::PositiveNumber);
    te->add_option("--seed", seed);
    te->add_option("--resolve", resolve)->check(CLI::IsMember({"report", "relax-rho"}));
    te->add_option("--delta", delta);
    te->add_option("--out", out_dir);

    auto* ea = app.add_subcommand("eval-approx", "Audit a LUT approximation");
    ea->add_option("--curve", curve)->check(CLI::IsMember({"sigmoid", "tanh", "resonator"}));
    ea->add_option("--method", method)->check(CLI::IsMember({"pwl", "soi"}));
    ea->add_option("--spacing", spacing)->check(CLI::IsMember({"nonuniform", "uniform"}));
    ea->add_option("--spacing-step", spacing_step)->check(CLI::PositiveNumber);
    ea->add_option("--rho", rho)->check(CLI::PositiveNumber);
    ea->add_option("--out", out_dir);

    auto* va = app.add_subcommand("verify-adder", "Sweep the carry bounds");
    va->add_option("--base", base)->check(CLI::IsMember({2, 8, 10, 16}));
    va->add_option("--max-n", max_n)->check(CLI::Range(2, 4096));
    va->add_option("--max-m", max_m)->check(CLI::Range(1, 16));
    va->add_option("--out", out_dir);

    auto* bt = app.add_subcommand("bench-throughput", "Serial vs parallel operations over time");
    bt->add_option("--area-ratio", area)->check(CLI::PositiveNumber);
    bt->add_option("--clocks-per-op", tpc)->check(CLI::PositiveNumber);
    bt->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
    bt->add_option("--out", out_dir);

    auto* ns = app.add_subcommand("neuron-sim", "Single-node register trace");
    ns->add_option("--inputs", inputs_hex, "16 hex words")->expected(16)->required();
    ns->add_option("--centres", centres_hex, "16 hex centre words")->expected(16);
    ns->add_option("--weights", weights_hex, "16 hex weights (perceptron mode)")->expected(16);
    ns->add_option("--rho", rho)->check(CLI::PositiveNumber);
    ns->add_flag("--hw-lut", hw_lut, "use the fabricated step-LUT at rho=2.42");
    ns->add_option("--out", out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (tr->parsed())
            return cmd_train(images, labels, rho, threshold, rho2, threshold2, train_size,
                             seed, augment, out_dir);
        if (te->parsed())
            return cmd_test(model, images, labels, test_size, seed, resolve, delta, out_dir);
        if (ea->parsed())
            return cmd_eval_approx(curve, method, spacing, rho, spacing_step, out_dir);
        if (va->parsed()) return cmd_verify_adder(base, max_n, max_m, out_dir);
        if (bt->parsed()) return cmd_bench_throughput(area, tpc, horizon, out_dir);
        if (ns->parsed())
            return cmd_neuron_sim(inputs_hex, centres_hex, weights_hex, rho, hw_lut, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
