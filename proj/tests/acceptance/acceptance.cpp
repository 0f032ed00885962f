// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails or exceeds its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli/commands.hpp"
#include "json.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "targetfill/grid.hpp"
#include "targetfill/lambda_schedule.hpp"
#include "targetfill/montage.hpp"
#include "targetfill/pipeline.hpp"
#include "targetfill/png_io.hpp"

namespace {

using namespace targetfill;
using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// Tolerances and time budgets.
constexpr double kReconstructionTol = 1e-4;
constexpr double kAnalyticMeanTol = 0.02;
constexpr double kAnalyticVarianceRelTol = 0.15;
constexpr double kAnalyticMu = 0.2;
constexpr double kAnalyticVar = 0.01;
constexpr int kAnalyticSamples = 200;
constexpr int kAnalyticT = 50;
constexpr int kReductionCases = 1000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// Smooth 3-channel test pictures and a centred square hole.
ImageTensor gradient(int size, double phase) {
    ImageTensor img(Shape{3, size, size});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                img.at(c, y, x) = static_cast<float>(0.8 * std::sin(phase + 0.3 * x + 0.2 * y + c));
    return img;
}

Mask centre_hole(int size) { return testing::box_mask(size, size, size / 4, 3 * size / 4, size / 4, 3 * size / 4); }

SamplerConfig constant_lambda(int T, int j, int r, double lambda, std::uint64_t seed = 1) {
    SamplerConfig cfg;
    cfg.timesteps = T;
    cfg.jump = j;
    cfg.resample = r;
    cfg.lambda_kind = LambdaSchedule::Kind::constant;
    cfg.lambda0 = lambda;
    cfg.seed = seed;
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome repaint_reduction() {
    const int T = 100;
    const auto scene = gradient(32, 0.0);
    const auto mask = centre_hole(32);
    const auto cfg = constant_lambda(T, 10, 10, 1.0, 11);
    OracleDenoiser d(scene, make_linear_schedule(T));
    const auto a = run(scene, gradient(32, 1.0), mask, cfg, d);
    const auto b = run(scene, gradient(32, 2.5), mask, cfg, d);
    return {bitwise_equal(a, b), "outputs for two different targets are bitwise equal"};
}

Outcome copy_paste() {
    const auto scene = gradient(32, 0.0);
    const auto target = gradient(32, 1.7);
    const auto mask = centre_hole(32);
    const auto cfg = constant_lambda(100, 1, 1, 0.0, 5);
    AnalyticGaussianDenoiser d(scene.shape(), 0.0, 0.25, make_linear_schedule(100));
    const auto out = run(scene, target, mask, cfg, d);
    return {bitwise_equal(out, testing::composite(scene, target, mask)), "output == scene outside, target inside"};
}

Outcome oracle_reconstruction() {
    const auto scene = gradient(32, 0.3);
    const auto target = gradient(32, 2.1);
    const auto mask = centre_hole(32);
    const auto truth = testing::composite(scene, target, mask);
    double worst = 0.0;
    for (int T : {50, 100, 250}) {
        OracleDenoiser d(truth, make_linear_schedule(T));
        worst = std::max(worst, max_abs_diff(run(scene, target, mask, constant_lambda(T, 10, 10, 1.0, T), d), truth));
    }
    return {worst <= kReconstructionTol, "max L-inf " + fmt("%.3g", worst) + " <= " + fmt("%.0e", kReconstructionTol)};
}

// Each pixel of every sample is an independent draw from the chain's output
// law, so n = 200 * 64 = 12800. The exact output variance (prior variance plus
// the finite-T discretisation term) comes from propagating the linear-Gaussian
// moments through the plan. CLT standard errors are sqrt(v/n) ~ 1e-3 for the
// mean and v*sqrt(2/n) ~ 1.3% relative for the variance; the pinned bounds are
// loose multiples of both.
Outcome analytic_statistics() {
    const Shape shape{1, 8, 8};
    const auto sched = make_linear_schedule(kAnalyticT);
    AnalyticGaussianDenoiser d(shape, kAnalyticMu, kAnalyticVar, sched);
    const ImageTensor zeros(shape);
    const Mask hole = Mask::all_hole(8, 8);
    const auto cfg0 = constant_lambda(kAnalyticT, 10, 10, 1.0);
    std::vector<double> values;
    for (int i = 0; i < kAnalyticSamples; ++i) {
        auto cfg = cfg0;
        cfg.seed = 1000 + static_cast<std::uint64_t>(i);
        const auto out = run(zeros, zeros, hole, cfg, d);
        values.insert(values.end(), out.values().begin(), out.values().end());
    }
    const auto st = testing::sample_stats(values);
    const auto exact = testing::analytic_chain_moments(sched, jump_plan(cfg0.timesteps, cfg0.jump, cfg0.resample),
                                                       kAnalyticMu, kAnalyticVar);
    const double rel = std::abs(st.variance - exact.variance) / exact.variance;
    const bool pass = std::abs(st.mean - kAnalyticMu) <= kAnalyticMeanTol && rel <= kAnalyticVarianceRelTol;
    return {pass, "mean " + fmt("%.4f", st.mean) + ", var " + fmt("%.5f", st.variance) + " vs " +
                      fmt("%.5f", exact.variance) + " (prior " + fmt("%.3f", kAnalyticVar) + " + discretisation " +
                      fmt("%.5f", exact.variance - kAnalyticVar) + "), rel err " + fmt("%.3f", rel)};
}

Outcome distance_transform_exact() {
    std::mt19937_64 gen(16);
    int matched = 0, cases = 0;
    while (cases < 100) {
        const auto m = testing::random_mask(16, 16, gen, 0.3 + 0.6 * (cases % 7) / 7.0);
        if (m.all_hole()) continue;
        ++cases;
        matched += distance_transform(m).distance == testing::brute_force_distance(m);
    }
    return {matched == 100, std::to_string(matched) + "/100 random 16x16 masks match brute force"};
}

Outcome jump_plan_conformance() {
    const bool example = jump_plan(4, 2, 2).visited() == std::vector<int>{3, 2, 3, 4, 3, 2, 1, 0};
    bool descent = true;
    for (int T : {1, 5, 37, 200}) {
        const auto v = jump_plan(T, 1, 1).visited();
        for (std::size_t i = 0; i < v.size(); ++i) descent = descent && v[i] == T - 1 - static_cast<int>(i);
        descent = descent && static_cast<int>(v.size()) == T;
    }
    std::mt19937_64 gen(20);
    const Shape shape{1, 4, 4};
    const ImageTensor scene(shape, 0.1f);
    int agree = 0;
    for (int i = 0; i < 20; ++i) {
        const int T = 1 + static_cast<int>(gen() % 60);
        const int j = 1 + static_cast<int>(gen() % 12);
        const int r = 1 + static_cast<int>(gen() % 6);
        AnalyticGaussianDenoiser inner(shape, 0.0, 0.25, make_linear_schedule(T));
        testing::CountingDenoiser d(inner);
        SamplerConfig cfg = constant_lambda(T, j, r, 0.9, static_cast<std::uint64_t>(i));
        run(scene, scene, testing::box_mask(4, 4, 1, 3, 1, 3), cfg, d);
        agree += d.calls() == jump_plan(T, j, r).down_count();
    }
    return {example && descent && agree == 20,
            std::string("(4,2,2) example ") + (example ? "ok" : "WRONG") + ", (T,1,1) descent " +
                (descent ? "ok" : "WRONG") + ", call counts " + std::to_string(agree) + "/20"};
}

Outcome lambda_schedule_values() {
    const auto l = LambdaSchedule::piecewise_linear(0.5, 200);
    const bool pass = l(200) == 0.0 && l(150) == 0.5 && l(100) == 1.0 && l(0) == 1.0;
    return {pass, "lambda(200,150,100,0) = " + fmt("%g", l(200)) + ", " + fmt("%g", l(150)) + ", " + fmt("%g", l(100)) +
                      ", " + fmt("%g", l(0))};
}

Outcome reductions() {
    std::mt19937_64 gen(1000);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int heated_ok = 0, buffer_ok = 0;
    for (int i = 0; i < kReductionCases; ++i) {
        const Shape s{3, 6 + static_cast<int>(gen() % 5), 6 + static_cast<int>(gen() % 5)};
        const auto scene = testing::random_tensor(s, gen, -2, 2);
        const auto target = testing::random_tensor(s, gen, -2, 2);
        const auto repaint = testing::random_tensor(s, gen, -2, 2);
        auto mask = testing::random_mask(s.height, s.width, gen);
        if (mask.all_hole()) mask = testing::box_mask(s.height, s.width, 1, 3, 1, 3);
        heated_ok += bitwise_equal(compose_heated(scene, target, repaint, mask, heated_mask(mask, 1)),
                                   compose_binary(scene, target, repaint, mask, 0.0));
        const double c = unit(gen);
        const auto source = (i % 2) ? RingSource::ddpm : RingSource::lambda_blend;
        buffer_ok += bitwise_equal(compose_scene_buffer(scene, target, repaint, mask, ring(mask, 0), c, unit(gen), source),
                                   compose_binary(scene, target, repaint, mask, c));
    }
    return {heated_ok == kReductionCases && buffer_ok == kReductionCases,
            "heated b=1: " + std::to_string(heated_ok) + "/" + std::to_string(kReductionCases) +
                ", scene-buffer w=0: " + std::to_string(buffer_ok) + "/" + std::to_string(kReductionCases)};
}

struct Fixture {
    testing::TempDir dir;
    std::string scene = dir.file("scene.png");
    std::string target = dir.file("target.png");
    std::string mask = dir.file("mask.png");

    Fixture() {
        save_png(gradient(32, 0.0), scene);
        save_png(gradient(32, 1.3), target);
        save_mask_png(centre_hole(32), mask);
    }
};

int grid(const Fixture& fx, const std::string& file, const std::string& out_dir, std::uint64_t seed) {
    cli::GridOptions opts;
    opts.grid_file = file;
    opts.scene = fx.scene;
    opts.target = fx.target;
    opts.mask = fx.mask;
    opts.out_dir = out_dir;
    opts.denoiser = "gaussian=0:0.25";
    opts.jobs = jobs();
    opts.base.seed = seed;
    std::ostringstream out, err;
    return cli::cmd_grid(opts, out, err);
}

Json manifest_without_timing(const std::string& dir) {
    auto doc = Json::parse(read_file(dir + "/manifest.json"));
    for (auto& cell : doc["cells"]) cell.erase("wall_seconds");
    return doc;
}

Outcome determinism() {
    Fixture fx;
    cli::RunOptions run_opts;
    run_opts.scene = fx.scene;
    run_opts.target = fx.target;
    run_opts.mask = fx.mask;
    run_opts.config.timesteps = 50;
    run_opts.config.jump = 10;
    run_opts.config.resample = 10;
    run_opts.config.seed = 99;
    std::ostringstream sink;
    run_opts.out = fx.dir.file("a.png");
    const int ra = cli::cmd_run(run_opts, sink, sink);
    run_opts.out = fx.dir.file("b.png");
    const int rb = cli::cmd_run(run_opts, sink, sink);
    const bool run_same = ra == 0 && rb == 0 && read_file(fx.dir.file("a.png")) == read_file(fx.dir.file("b.png"));

    std::ofstream(fx.dir.file("grid.json")) << R"({"lambda0": [0.9, 0.993], "T": [20, 30]})";
    const int ga = grid(fx, fx.dir.file("grid.json"), fx.dir.file("ga"), 7);
    const int gb = grid(fx, fx.dir.file("grid.json"), fx.dir.file("gb"), 7);
    bool grid_same = ga == 0 && gb == 0 && manifest_without_timing(fx.dir.file("ga")) ==
                                               manifest_without_timing(fx.dir.file("gb"));
    for (int i = 0; i < 4 && grid_same; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "/cell_%04d.png", i);
        grid_same = read_file(fx.dir.file("ga") + name) == read_file(fx.dir.file("gb") + name);
    }
    grid_same = grid_same && read_file(fx.dir.file("ga/montage.png")) == read_file(fx.dir.file("gb/montage.png"));
    return {run_same && grid_same, std::string("run bytes ") + (run_same ? "identical" : "DIFFER") +
                                       ", 2x2 grid manifest and images " + (grid_same ? "identical" : "DIFFER")};
}

Outcome grid_smoke_one(const Fixture& fx, const std::string& file, const std::string& out, std::size_t cells,
                       int columns) {
    const int code = grid(fx, file, out, 0);
    if (code != 0) return {false, file + ": exit " + std::to_string(code)};
    const auto manifest = Json::parse(read_file(out + "/manifest.json"));
    const auto index = Json::parse(read_file(out + "/montage.json"));
    std::size_t ok = 0;
    for (const auto& c : manifest["cells"]) ok += c["status"] == "ok";
    const auto sheet = load_png(out + "/montage.png");
    const auto layout = montage_layout(cells, columns, Shape{3, 32, 32});
    const bool pass = manifest["cells"].size() == cells && ok == cells && index["cells"].size() == cells &&
                      sheet.height() == layout.height && sheet.width() == layout.width;
    return {pass, std::to_string(ok) + "/" + std::to_string(cells) + " cells ok, montage " +
                      std::to_string(sheet.height()) + "x" + std::to_string(sheet.width())};
}

Outcome sweep_grid_smoke() {
    Fixture fx;
    const std::string dir = TARGETFILL_GRID_DIR;
    const auto a = grid_smoke_one(fx, dir + "/lambda_sweep.json", fx.dir.file("a"), 6 * 4 * 5, 5);
    const auto b = grid_smoke_one(fx, dir + "/knee_sweep.json", fx.dir.file("b"), 5, 5);
    return {a.pass && b.pass, "lambda sweep: " + a.detail + "; knee sweep: " + b.detail};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"repaint_reduction_lambda_one", 10.0, repaint_reduction},
        {"copy_paste_lambda_zero", 10.0, copy_paste},
        {"oracle_reconstruction", 60.0, oracle_reconstruction},
        {"analytic_statistics", 120.0, analytic_statistics},
        {"distance_transform_brute_force", 10.0, distance_transform_exact},
        {"jump_plan", 5.0, jump_plan_conformance},
        {"lambda_schedule_piecewise", 1.0, lambda_schedule_values},
        {"composition_reductions", 30.0, reductions},
        {"determinism", 60.0, determinism},
        {"sweep_grid_smoke", 900.0, sweep_grid_smoke},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s %s: %s [%.2fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                    c.budget_seconds, in_time ? "" : " OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
    return failures == 0 ? 0 : 1;
}
