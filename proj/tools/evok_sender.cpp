// evok-sender: synthetic or recorded PPG -> heart-rate frames over UDP.

#include <atomic>
#include <csignal>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/asio/io_context.hpp>
#include <spdlog/spdlog.h>

#include "evok/net/udp.hpp"
#include "evok/sender.hpp"

namespace {
std::atomic<bool> g_shutdown{false};
void on_signal(int) { g_shutdown.store(true); }
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EvoK sender: turns a PPG stream into heart-rate frames"};

    std::string source = "synthetic";
    std::string profile_path;
    std::string file_path;
    std::string noise = "earlobe";
    std::uint64_t seed = 1;
    int rate = 50;
    int bpm = 75;
    std::optional<std::int64_t> duration_ms;
    std::string dest = "127.0.0.1:45450";
    int group = 0;
    std::uint32_t id = 1;
    std::int64_t cadence_ms = 1000;
    std::string log_path;

    app.add_option("--source", source, "synthetic|file")->check(CLI::IsMember({"synthetic", "file"}));
    app.add_option("--profile", profile_path, "bpm profile CSV (t_ms,bpm) for the synthetic source");
    app.add_option("--file", file_path, "PPG CSV (t_ms,amplitude) for the file source");
    app.add_option("--bpm", bpm, "constant bpm when no --profile is given")->check(CLI::Range(30, 240));
    app.add_option("--noise", noise, "none|earlobe|fingertip")->check(CLI::IsMember({"none", "earlobe", "fingertip"}));
    app.add_option("--seed", seed, "synthetic noise seed");
    app.add_option("--rate", rate, "sample rate in Hz (must divide 1000)");
    app.add_option("--duration-ms", duration_ms, "stop the synthetic source after this much stream time");
    app.add_option("--dest", dest, "receiver or proxy address host:port");
    app.add_option("--group", group, "radio group")->check(CLI::Range(0, 255));
    app.add_option("--id", id, "sender id");
    app.add_option("--cadence-ms", cadence_ms, "frame interval");
    app.add_option("--log", log_path, "NDJSON session log");
    CLI11_PARSE(app, argc, argv);

    evok::SenderConfig config;
    config.sample_rate_hz = rate;
    config.group_id = static_cast<std::uint8_t>(group);
    config.sender_id = id;
    config.cadence_ms = cadence_ms;
    if (!log_path.empty()) config.log_path = log_path;

    try {
        if (source == "file") {
            if (file_path.empty() && !profile_path.empty()) file_path = profile_path;
            if (file_path.empty()) throw std::invalid_argument("--source file requires --file <path>");
            config.source = evok::FileSourceConfig{file_path};
        } else {
            evok::SyntheticSourceConfig syn;
            if (!profile_path.empty()) {
                std::ifstream in(profile_path);
                if (!in) throw evok::SourceError("cannot open profile '" + profile_path + "'");
                std::stringstream text;
                text << in.rdbuf();
                syn.profile = evok::parse_bpm_profile(text.str());
            } else {
                syn.profile = {{0, bpm}};
            }
            syn.noise = evok::noise_preset(noise);
            syn.seed = seed;
            syn.duration_ms = duration_ms;
            config.source = syn;
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }

    boost::asio::io_context ioc;
    std::unique_ptr<evok::net::UdpSink> sink;
    try {
        sink = std::make_unique<evok::net::UdpSink>(ioc, dest);
    } catch (const evok::TransportError& e) {
        spdlog::error("{}", e.what());
        return 3;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    spdlog::info("sending to {}:{} (group {}, id {})", sink->destination().address().to_string(),
                 sink->destination().port(), group, id);
    evok::SteadyClock clock;
    const auto report = evok::run_sender(config, clock, *sink, &g_shutdown);
    if (report.error) spdlog::error("{}", *report.error);
    spdlog::info("sent {} frames", report.frames_sent);
    return report.exit_code;
}
