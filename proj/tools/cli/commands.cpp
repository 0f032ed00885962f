// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "targetfill/errors.hpp"
#include "targetfill/external_denoiser.hpp"
#include "targetfill/grid.hpp"
#include "targetfill/mask.hpp"
#include "targetfill/montage.hpp"
#include "targetfill/noise_schedule.hpp"
#include "targetfill/png_io.hpp"
#include "targetfill/rng.hpp"
#include "targetfill/timestep_plan.hpp"

namespace targetfill::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::shared_ptr<spdlog::logger> logger() {
    static std::shared_ptr<spdlog::logger> instance = [] {
        auto log = std::make_shared<spdlog::logger>("targetfill", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        log->set_pattern("[%H:%M:%S.%e] [%l] %v");
        const char* level = std::getenv("TARGETFILL_LOG");
        log->set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
        return log;
    }();
    return instance;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Inputs {
    ImageTensor scene;
    ImageTensor target;
    Mask mask;
};

// Throws std::invalid_argument or ImageIoError; both map to exit 2.
Inputs load_inputs(const std::string& scene_path, const std::string& target_path, const std::string& mask_path) {
    if (scene_path.empty() || target_path.empty() || mask_path.empty()) {
        throw std::invalid_argument("--scene, --target and --mask are required");
    }
    Inputs in{load_png(scene_path), load_png(target_path), load_mask_png(mask_path)};
    const int channels = std::max(in.scene.channels(), in.target.channels());
    in.scene = broadcast_channels(in.scene, channels);
    in.target = broadcast_channels(in.target, channels);
    if (in.scene.shape() != in.target.shape()) {
        throw std::invalid_argument("scene is " + to_string(in.scene.shape()) + " but target is "
                                    + to_string(in.target.shape()));
    }
    if (in.mask.height() != in.scene.height() || in.mask.width() != in.scene.width()) {
        throw std::invalid_argument("mask is " + std::to_string(in.mask.height()) + "x" + std::to_string(in.mask.width())
                                    + " but scene is " + std::to_string(in.scene.height()) + "x"
                                    + std::to_string(in.scene.width()));
    }
    return in;
}

Json config_json(const SamplerConfig& cfg) {
    Json j;
    j["T"] = cfg.timesteps;
    j["j"] = cfg.jump;
    j["r"] = cfg.resample;
    if (cfg.lambda_kind == LambdaSchedule::Kind::constant) {
        j["lambda_schedule"] = "const";
        j["lambda0"] = cfg.lambda0;
    } else {
        j["lambda_schedule"] = "linear-p";
        j["p"] = cfg.knee;
    }
    j["mask_mode"] = to_string(cfg.mask_mode);
    if (cfg.mask_mode == MaskMode::heated) {
        j["b"] = cfg.heat_buffer;
        j["heat_with_lambda"] = cfg.heat_with_lambda;
    }
    if (cfg.mask_mode == MaskMode::scene_buffer) {
        j["w"] = cfg.ring_width;
        j["c"] = cfg.buffer_blend;
        j["ring_source"] = to_string(cfg.ring_source);
    }
    j["seed"] = cfg.seed;
    return j;
}

Shape parse_shape(const std::string& text) {
    Shape s;
    char x1 = 0;
    char x2 = 0;
    std::istringstream in(text);
    if (!(in >> s.channels >> x1 >> s.height >> x2 >> s.width) || x1 != 'x' || x2 != 'x' || !in.eof()
        || s.channels <= 0 || s.height <= 0 || s.width <= 0) {
        throw std::invalid_argument("shape must look like CxHxW, got '" + text + "'");
    }
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ImageIoError("cannot write " + path.string());
    out << text << '\n';
}

}  // namespace

std::string candidate_path(const std::string& out, int index, int count) {
    if (count <= 1) return out;
    fs::path p(out);
    fs::path name = p.stem();
    name += "." + std::to_string(index);
    name += p.extension();
    return (p.parent_path() / name).string();
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    Inputs in;
    DenoiserSpec spec;
    try {
        options.config.validate();
        if (options.out.empty()) throw std::invalid_argument("--out is required");
        in = load_inputs(options.scene, options.target, options.mask);
        spec = parse_denoiser_spec(options.denoiser);
        spec.timeout = options.worker_timeout;
        load_reference(spec);
        if (in.mask.all_hole() && options.config.mask_mode != MaskMode::binary) {
            throw std::invalid_argument("an all-hole mask is only valid with --mask-mode binary");
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    const int count = options.config.candidates;
    const auto start = Clock::now();
    std::vector<std::string> outputs(static_cast<std::size_t>(count));
    std::vector<std::string> failures;
    std::mutex failure_lock;
    bool invalid = false;

    parallel_for(static_cast<std::size_t>(count), options.jobs, [&](std::size_t i) {
        SamplerConfig cfg = options.config;
        cfg.seed = options.config.seed + i;
        const auto path = candidate_path(options.out, static_cast<int>(i), count);
        try {
            const auto sched = make_linear_schedule(cfg.timesteps);
            auto denoiser = make_denoiser(spec, sched, in.scene.shape());
            logger()->info("candidate {}: seed {} -> {}", i, cfg.seed, path);
            const ImageTensor result = run(in.scene, in.target, in.mask, cfg, *denoiser);
            save_png(result, path);
            outputs[i] = path;
        } catch (const std::invalid_argument& e) {
            std::lock_guard lock(failure_lock);
            invalid = true;
            failures.push_back(e.what());
        } catch (const std::exception& e) {
            std::lock_guard lock(failure_lock);
            failures.push_back(e.what());
        }
    });

    if (!failures.empty()) {
        for (const auto& f : failures) err << "error: " << f << '\n';
        return invalid ? kInvalidInput : kBackendFailure;
    }

    Json summary;
    summary["outputs"] = outputs;
    summary["candidates"] = count;
    summary["denoiser_calls"] =
        denoiser_call_count(options.config.timesteps, options.config.jump, options.config.resample);
    summary["wall_seconds"] = seconds_since(start);
    summary["config"] = config_json(options.config);
    out << summary.dump() << '\n';
    return kOk;
}

int cmd_grid(const GridOptions& options, std::ostream& out, std::ostream& err) {
    Inputs in;
    DenoiserSpec spec;
    GridSpec grid;
    try {
        if (options.out_dir.empty()) throw std::invalid_argument("--out-dir is required");
        std::ifstream file(options.grid_file);
        if (!file) throw std::invalid_argument("cannot read grid file '" + options.grid_file + "'");
        std::stringstream text;
        text << file.rdbuf();
        grid = parse_grid_spec(text.str());
        in = load_inputs(options.scene, options.target, options.mask);
        spec = parse_denoiser_spec(options.denoiser);
        spec.timeout = options.worker_timeout;
        load_reference(spec);
        fs::create_directories(options.out_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    const auto cells = enumerate_cells(grid, options.base);
    std::vector<CellRecord> records(cells.size());
    std::vector<ImageTensor> images(cells.size());
    logger()->info("grid: {} cells on {} job(s)", cells.size(), options.jobs);

    parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
        const auto& cell = cells[i];
        auto& rec = records[i];
        rec.index = cell.index;
        rec.params = cell.params;
        rec.seed = cell.config.seed;
        char name[32];
        std::snprintf(name, sizeof(name), "cell_%04zu.png", cell.index);
        rec.output = name;
        const auto start = Clock::now();
        try {
            cell.config.validate();
            rec.denoiser_calls = denoiser_call_count(cell.config.timesteps, cell.config.jump, cell.config.resample);
            const auto sched = make_linear_schedule(cell.config.timesteps);
            auto denoiser = make_denoiser(spec, sched, in.scene.shape());
            images[i] = run(in.scene, in.target, in.mask, cell.config, *denoiser);
            save_png(images[i], fs::path(options.out_dir) / rec.output);
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
            logger()->warn("cell {} failed: {}", cell.index, e.what());
        }
        rec.wall_seconds = seconds_since(start);
        logger()->info("cell {} done in {:.2f}s", cell.index, rec.wall_seconds);
    });

    std::size_t succeeded = 0;
    for (auto& rec : records) {
        if (rec.ok) {
            ++succeeded;
        } else {
            images[rec.index] = ImageTensor(in.scene.shape(), kMontageGray);
        }
    }

    try {
        write_text(fs::path(options.out_dir) / "manifest.json", manifest_json(records, options.base.seed));
        const int columns =
            options.columns > 0 ? options.columns : static_cast<int>(grid.axes.back().values.size());
        save_png(montage(images, columns), fs::path(options.out_dir) / "montage.png");
        auto montage_index = montage_cells(images.size(), columns);
        for (std::size_t i = 0; i < records.size(); ++i) {
            montage_index[i].params = records[i].params;
            montage_index[i].output = records[i].ok ? records[i].output : "";
        }
        write_montage_index(fs::path(options.out_dir) / "montage.json", montage_index);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kBackendFailure;
    }

    Json summary;
    summary["cells"] = records.size();
    summary["succeeded"] = succeeded;
    summary["failed"] = records.size() - succeeded;
    summary["manifest"] = (fs::path(options.out_dir) / "manifest.json").string();
    summary["montage"] = (fs::path(options.out_dir) / "montage.png").string();
    out << summary.dump() << '\n';
    if (succeeded == 0) {
        for (const auto& rec : records) err << "cell " << rec.index << ": " << rec.error << '\n';
        return kAllCellsFailed;
    }
    return kOk;
}

int cmd_mask_tool(const MaskToolOptions& options, std::ostream& out, std::ostream& err) {
    try {
        if (options.out.empty()) throw std::invalid_argument("--out is required");
        const Mask mask = load_mask_png(options.mask);
        RawImage raw{1, mask.height(), mask.width(), {}};
        raw.bytes.reserve(static_cast<std::size_t>(mask.height()) * mask.width());
        if (options.action == "heat") {
            const HeatField heat = heated_mask(mask, options.buffer);
            for (double h : heat.heat) raw.bytes.push_back(static_cast<std::uint8_t>(std::lround(h * 255.0)));
            write_png(options.out, raw);
        } else if (options.action == "dilate") {
            save_mask_png(dilate_hole(mask, options.width), options.out);
        } else if (options.action == "ring") {
            if (options.width < 0) throw std::invalid_argument("ring width must be >= 0");
            const Indicator band = ring(mask, options.width);
            for (int y = 0; y < band.height(); ++y) {
                for (int x = 0; x < band.width(); ++x) raw.bytes.push_back(band.at(y, x) ? 0 : 255);
            }
            write_png(options.out, raw);
        } else {
            throw std::invalid_argument("unknown mask action '" + options.action + "'");
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    out << Json{{"action", options.action}, {"output", options.out}}.dump() << '\n';
    return kOk;
}

int cmd_denoiser_check(const CheckOptions& options, std::ostream& out, std::ostream& err) {
    std::optional<OracleDenoiser> oracle;
    Shape shape;
    std::vector<std::string> command;
    NoiseSchedule sched = make_linear_schedule(1);
    try {
        command = split_command_line(options.worker);
        if (command.empty()) throw std::invalid_argument("--worker is required");
        sched = make_linear_schedule(options.timesteps);
        if (!options.reference.empty()) {
            ImageTensor ref = load_png(options.reference);
            shape = ref.shape();
            oracle.emplace(std::move(ref), sched);
        } else {
            shape = parse_shape(options.shape);
        }
        if (options.probes < 1) throw std::invalid_argument("--probes must be >= 1");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    bool pass = true;
    try {
        auto worker = external_handshake(WorkerOptions{command, options.timeout}, sched, shape);
        out << "handshake: ok (T=" << sched.timesteps() << ", shape=" << to_string(shape) << ", pid=" << worker->pid()
            << ")\n";
        SeededRng rng(options.seed);
        for (int i = 0; i < options.probes; ++i) {
            const auto sub = rng.next("probe", i);
            const int t = 1 + static_cast<int>(sub.key() % static_cast<std::uint64_t>(sched.timesteps()));
            const ImageTensor x = gaussian_draw(shape, sub);
            const ImageTensor eps = worker->predict_epsilon(x, t);
            out << "probe " << i << ": t=" << t << " ok";
            if (oracle) {
                const ImageTensor expected = oracle->predict_epsilon(x, t);
                const bool same = bitwise_equal(eps, expected);
                out << (same ? ", matches in-process oracle" : ", DIFFERS from in-process oracle");
                if (!same) {
                    out << " (max |diff| " << max_abs_diff(eps, expected) << ")";
                    pass = false;
                }
            }
            out << '\n';
        }
        const int status = worker->shutdown();
        out << "shutdown: worker exit status " << status << '\n';
        if (status != 0) pass = false;
    } catch (const std::exception& e) {
        out << "protocol violation: " << e.what() << '\n';
        err << "error: " << e.what() << '\n';
        pass = false;
    }
    out << "result: " << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kOk : kProtocolViolation;
}

int cmd_schedule_dump(const PlanOptions& options, std::ostream& out, std::ostream& err) {
    TimestepPlan plan;
    try {
        plan = jump_plan(options.timesteps, options.jump, options.resample);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    Json doc;
    doc["visited"] = plan.visited();
    doc["down_count"] = plan.down_count();
    doc["up_count"] = plan.up_count();
    out << doc.dump() << '\n';
    return kOk;
}

namespace {

void add_sampler_flags(CLI::App& cmd, SamplerConfig& cfg, std::string& lambda_schedule, std::string& mask_mode,
                       std::string& ring_source, CLI::Option*& lambda_opt) {
    cmd.add_option("--timesteps", cfg.timesteps, "diffusion steps T")->capture_default_str();
    cmd.add_option("--jump-len", cfg.jump, "jump length j")->capture_default_str();
    cmd.add_option("--resample", cfg.resample, "resample count r")->capture_default_str();
    lambda_opt = cmd.add_option("--lambda", cfg.lambda0, "constant lambda (implies --lambda-schedule const)");
    cmd.add_option("--lambda-schedule", lambda_schedule, "const or linear-p")
        ->check(CLI::IsMember({"const", "linear-p"}));
    cmd.add_option("--p", cfg.knee, "knee of the linear-p schedule")->capture_default_str();
    cmd.add_option("--mask-mode", mask_mode, "binary, heated or scene-buffer")
        ->check(CLI::IsMember({"binary", "heated", "scene-buffer"}))
        ->capture_default_str();
    cmd.add_option("--b", cfg.heat_buffer, "heated-mask buffer size")->capture_default_str();
    cmd.add_flag("--heat-with-lambda", cfg.heat_with_lambda, "scale the heat field by (1 - lambda_t)");
    cmd.add_option("--ring-width", cfg.ring_width, "scene-buffer ring width w")->capture_default_str();
    cmd.add_option("--c", cfg.buffer_blend, "scene-buffer hole blend constant")->capture_default_str();
    cmd.add_option("--ring-source", ring_source, "ddpm or lambda-blend")
        ->check(CLI::IsMember({"ddpm", "lambda-blend"}))
        ->capture_default_str();
    cmd.add_option("--seed", cfg.seed, "master seed")->capture_default_str();
}

void finish_sampler_flags(SamplerConfig& cfg, const std::string& lambda_schedule, const std::string& mask_mode,
                          const std::string& ring_source, const CLI::Option* lambda_opt) {
    if (lambda_schedule == "const" || (lambda_schedule.empty() && lambda_opt->count() > 0)) {
        cfg.lambda_kind = LambdaSchedule::Kind::constant;
    } else {
        cfg.lambda_kind = LambdaSchedule::Kind::piecewise_linear;
    }
    cfg.mask_mode = parse_mask_mode(mask_mode);
    cfg.ring_source = parse_ring_source(ring_source);
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Target-guided diffusion inpainting", "targetfill"};
    app.require_subcommand(1);

    RunOptions run_opts;
    GridOptions grid_opts;
    MaskToolOptions mask_opts;
    CheckOptions check_opts;
    PlanOptions plan_opts;
    std::string run_lambda_schedule, run_mask_mode = "binary", run_ring_source = "ddpm";
    std::string grid_lambda_schedule, grid_mask_mode = "binary", grid_ring_source = "ddpm";
    CLI::Option* run_lambda = nullptr;
    CLI::Option* grid_lambda = nullptr;
    int run_timeout_ms = 30000;
    int grid_timeout_ms = 30000;
    int check_timeout_ms = 30000;

    auto* run_cmd = app.add_subcommand("run", "inpaint the target into the scene");
    run_cmd->add_option("--scene", run_opts.scene, "scene PNG")->required();
    run_cmd->add_option("--target", run_opts.target, "target PNG")->required();
    run_cmd->add_option("--mask", run_opts.mask, "mask PNG (white = scene, black = hole)")->required();
    run_cmd->add_option("--out", run_opts.out, "output PNG")->required();
    add_sampler_flags(*run_cmd, run_opts.config, run_lambda_schedule, run_mask_mode, run_ring_source, run_lambda);
    run_cmd->add_option("--denoiser", run_opts.denoiser, "oracle=PATH | gaussian=MU:SIGMA2 | external=CMD")
        ->capture_default_str();
    run_cmd->add_option("--candidates", run_opts.config.candidates, "number of candidate outputs")
        ->capture_default_str();
    run_cmd->add_option("--jobs", run_opts.jobs, "parallel candidates")->capture_default_str();
    run_cmd->add_option("--worker-timeout-ms", run_timeout_ms, "external worker I/O timeout")->capture_default_str();

    auto* grid_cmd = app.add_subcommand("grid", "run a hyperparameter grid");
    grid_cmd->add_option("gridfile", grid_opts.grid_file, "grid spec JSON")->required();
    grid_cmd->add_option("--scene", grid_opts.scene, "scene PNG")->required();
    grid_cmd->add_option("--target", grid_opts.target, "target PNG")->required();
    grid_cmd->add_option("--mask", grid_opts.mask, "mask PNG")->required();
    grid_cmd->add_option("--out-dir", grid_opts.out_dir, "output directory")->required();
    add_sampler_flags(*grid_cmd, grid_opts.base, grid_lambda_schedule, grid_mask_mode, grid_ring_source, grid_lambda);
    grid_cmd->add_option("--denoiser", grid_opts.denoiser, "oracle=PATH | gaussian=MU:SIGMA2 | external=CMD")
        ->capture_default_str();
    grid_cmd->add_option("--jobs", grid_opts.jobs, "parallel cells")->capture_default_str();
    grid_cmd->add_option("--columns", grid_opts.columns, "montage columns (default: last axis length)");
    grid_cmd->add_option("--worker-timeout-ms", grid_timeout_ms, "external worker I/O timeout")->capture_default_str();

    auto* mask_cmd = app.add_subcommand("mask", "mask utilities");
    mask_cmd->require_subcommand(1);
    for (const char* action : {"heat", "dilate", "ring"}) {
        auto* sub = mask_cmd->add_subcommand(action, std::string(action) + " the hole of a mask PNG");
        sub->add_option("--mask", mask_opts.mask, "mask PNG")->required();
        sub->add_option("--out", mask_opts.out, "output PNG")->required();
        if (std::string(action) == "heat") {
            sub->add_option("--b", mask_opts.buffer, "buffer size")->capture_default_str();
        } else {
            sub->add_option("--w", mask_opts.width, "width in pixels")->capture_default_str();
        }
        sub->callback([&mask_opts, action] { mask_opts.action = action; });
    }

    auto* check_cmd = app.add_subcommand("denoiser-check", "probe an external denoiser worker");
    check_cmd->add_option("--worker", check_opts.worker, "worker command line")->required();
    check_cmd->add_option("--timesteps", check_opts.timesteps, "schedule length for the handshake")
        ->capture_default_str();
    check_cmd->add_option("--shape", check_opts.shape, "CxHxW")->capture_default_str();
    check_cmd->add_option("--ref", check_opts.reference, "reference PNG; compare against the in-process oracle");
    check_cmd->add_option("--probes", check_opts.probes, "number of EPS probes")->capture_default_str();
    check_cmd->add_option("--seed", check_opts.seed, "probe seed")->capture_default_str();
    check_cmd->add_option("--timeout-ms", check_timeout_ms, "I/O timeout")->capture_default_str();

    auto* plan_cmd = app.add_subcommand("schedule-dump", "print the resampling timestep plan as JSON");
    plan_cmd->add_option("--timesteps", plan_opts.timesteps)->capture_default_str();
    plan_cmd->add_option("--jump-len", plan_opts.jump)->capture_default_str();
    plan_cmd->add_option("--resample", plan_opts.resample)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInvalidInput;
    }

    try {
        if (run_cmd->parsed()) {
            finish_sampler_flags(run_opts.config, run_lambda_schedule, run_mask_mode, run_ring_source, run_lambda);
            run_opts.worker_timeout = std::chrono::milliseconds(run_timeout_ms);
            return cmd_run(run_opts, out, err);
        }
        if (grid_cmd->parsed()) {
            finish_sampler_flags(grid_opts.base, grid_lambda_schedule, grid_mask_mode, grid_ring_source, grid_lambda);
            grid_opts.worker_timeout = std::chrono::milliseconds(grid_timeout_ms);
            return cmd_grid(grid_opts, out, err);
        }
        if (mask_cmd->parsed()) return cmd_mask_tool(mask_opts, out, err);
        if (check_cmd->parsed()) {
            check_opts.timeout = std::chrono::milliseconds(check_timeout_ms);
            return cmd_denoiser_check(check_opts, out, err);
        }
        if (plan_cmd->parsed()) return cmd_schedule_dump(plan_opts, out, err);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    return kInvalidInput;
}

}  // namespace targetfill::cli
