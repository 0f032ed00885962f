// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "denoiser_spec.hpp"
#include "targetfill/pipeline.hpp"

namespace targetfill::cli {

// Process exit status contract.
enum ExitCode : int {
    kOk = 0,
    kInvalidInput = 2,
    kBackendFailure = 3,
    kAllCellsFailed = 4,
    kProtocolViolation = 5,
};

struct RunOptions {
    std::string scene;
    std::string target;
    std::string mask;
    std::string out;
    SamplerConfig config;
    std::string denoiser = kDefaultDenoiser;
    int jobs = 1;
    std::chrono::milliseconds worker_timeout{30000};
};

struct GridOptions {
    std::string grid_file;
    std::string scene;
    std::string target;
    std::string mask;
    std::string out_dir;
    SamplerConfig base;
    std::string denoiser = kDefaultDenoiser;
    int jobs = 1;
    int columns = 0;  // 0: length of the last grid axis
    std::chrono::milliseconds worker_timeout{30000};
};

struct MaskToolOptions {
    std::string action;  // heat | dilate | ring
    std::string mask;
    std::string out;
    int buffer = 1;
    int width = 4;
};

struct CheckOptions {
    std::string worker;
    int timesteps = 50;
    std::string shape = "3x8x8";
    std::string reference;  // optional: compare against the in-process oracle
    int probes = 3;
    std::uint64_t seed = 0;
    std::chrono::milliseconds timeout{30000};
};

struct PlanOptions {
    int timesteps = 200;
    int jump = 40;
    int resample = 40;
};

// Candidate i of --out a/b.png is written to a/b.i.png when count > 1.
std::string candidate_path(const std::string& out, int index, int count);

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_grid(const GridOptions& options, std::ostream& out, std::ostream& err);
int cmd_mask_tool(const MaskToolOptions& options, std::ostream& out, std::ostream& err);
int cmd_denoiser_check(const CheckOptions& options, std::ostream& out, std::ostream& err);
int cmd_schedule_dump(const PlanOptions& options, std::ostream& out, std::ostream& err);

// Runs fn(0..count-1) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

// Full command-line entry point; returns the process exit status.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace targetfill::cli
