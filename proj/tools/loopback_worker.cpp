// SPDX-License-Identifier: Apache-2.0
//
// Reference FDN1 worker. Serves closed-form noise predictions over
// stdin/stdout so the external-denoiser path can be exercised without a
// trained model:
//
//   targetfill-worker --mode oracle --ref scene.png
//   targetfill-worker --mode gaussian --mu 0.2 --var 0.01
//
// --fault injects a protocol violation for negative tests.

#include <signal.h>
#include <unistd.h>

#include <chrono>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "targetfill/denoiser.hpp"
#include "targetfill/errors.hpp"
#include "targetfill/png_io.hpp"
#include "targetfill/protocol.hpp"

namespace fdn1 = targetfill::fdn1;

namespace {

constexpr std::chrono::milliseconds kWriteTimeout{30000};

void send(const fdn1::Frame& frame) { fdn1::write_frame(STDOUT_FILENO, frame, kWriteTimeout); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FDN1 loopback denoiser worker", "targetfill-worker"};
    std::string mode = "oracle";
    std::string ref_path;
    double mu = 0.0;
    double var = 1.0;
    std::string fault = "none";
    int idle_timeout_ms = 300000;
    app.add_option("--mode", mode)->check(CLI::IsMember({"oracle", "gaussian"}));
    app.add_option("--ref", ref_path, "reference PNG (oracle mode)");
    app.add_option("--mu", mu);
    app.add_option("--var", var);
    app.add_option("--fault", fault)
        ->check(CLI::IsMember({"none", "bad-magic", "wrong-shape", "hang", "crash", "nan", "error"}));
    app.add_option("--idle-timeout-ms", idle_timeout_ms);
    CLI11_PARSE(app, argc, argv);

    ::signal(SIGPIPE, SIG_IGN);
    const std::chrono::milliseconds idle(idle_timeout_ms);

    std::optional<targetfill::ImageTensor> reference;
    if (mode == "oracle") {
        if (ref_path.empty()) {
            std::cerr << "targetfill-worker: --ref is required in oracle mode\n";
            return 2;
        }
        try {
            reference = targetfill::load_png(ref_path);
        } catch (const std::exception& e) {
            std::cerr << "targetfill-worker: " << e.what() << '\n';
            return 2;
        }
    }

    std::unique_ptr<targetfill::Denoiser> model;
    targetfill::Shape shape;
    try {
        for (;;) {
            const auto frame = fdn1::read_frame(STDIN_FILENO, idle);
            switch (frame.type) {
                case fdn1::MessageType::hello: {
                    const auto hello = fdn1::decode_hello(frame.payload);
                    shape = targetfill::Shape{static_cast<int>(hello.channels), static_cast<int>(hello.height),
                                              static_cast<int>(hello.width)};
                    std::vector<double> betas(hello.betas.begin(), hello.betas.end());
                    auto sched = targetfill::NoiseSchedule::from_betas(std::move(betas));
                    if (mode == "oracle") {
                        auto ref = targetfill::broadcast_channels(*reference, shape.channels);
                        if (ref.shape() != shape) {
                            send(fdn1::make_error("reference is " + targetfill::to_string(ref.shape())
                                                  + " but HELLO announced " + targetfill::to_string(shape)));
                            return 1;
                        }
                        model = std::make_unique<targetfill::OracleDenoiser>(std::move(ref), std::move(sched));
                    } else {
                        model = std::make_unique<targetfill::AnalyticGaussianDenoiser>(shape, mu, var, std::move(sched));
                    }
                    if (fault == "bad-magic") {
                        const std::uint8_t bogus[9] = {'F', 'D', 'N', '2', 0x02, 0, 0, 0, 0};
                        ssize_t ignored = ::write(STDOUT_FILENO, bogus, sizeof(bogus));
                        (void)ignored;
                    } else {
                        send(fdn1::make_empty(fdn1::MessageType::hello_ack));
                    }
                    break;
                }
                case fdn1::MessageType::eps_request: {
                    if (!model) {
                        send(fdn1::make_error("EPS_REQ before HELLO"));
                        return 1;
                    }
                    auto req = fdn1::decode_eps_request(frame.payload, shape.size());
                    if (fault == "hang") {
                        std::this_thread::sleep_for(idle);
                        return 1;
                    }
                    if (fault == "crash") return 3;
                    if (fault == "error") {
                        send(fdn1::make_error("injected failure"));
                        break;
                    }
                    const targetfill::ImageTensor x(shape, std::move(req.x));
                    auto eps = model->predict_epsilon(x, static_cast<int>(req.timestep));
                    std::vector<float> values(eps.values().begin(), eps.values().end());
                    if (fault == "wrong-shape") values.pop_back();
                    if (fault == "nan") values.front() = std::numeric_limits<float>::quiet_NaN();
                    send(fdn1::make_eps_response(values));
                    break;
                }
                case fdn1::MessageType::shutdown:
                    return 0;
                default:
                    send(fdn1::make_error(std::string("unexpected ") + fdn1::to_string(frame.type)));
                    return 1;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "targetfill-worker: " << e.what() << '\n';
        try {
            send(fdn1::make_error(e.what()));
        } catch (const std::exception&) {
        }
        return 1;
    }
}
