// evok-ppg: write a synthetic PPG recording plus its ground-truth beat sidecar.

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "evok/ppg.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Synthetic PPG generator"};

    std::string profile_path;
    int bpm = 75;
    std::string noise = "earlobe";
    std::uint64_t seed = 1;
    int rate = 50;
    std::int64_t duration_ms = 120000;
    std::string out = "ppg.csv";

    app.add_option("--profile", profile_path, "bpm profile CSV (t_ms,bpm)");
    app.add_option("--bpm", bpm, "constant bpm when no profile is given")->check(CLI::Range(30, 240));
    app.add_option("--noise", noise, "none|earlobe|fingertip")->check(CLI::IsMember({"none", "earlobe", "fingertip"}));
    app.add_option("--seed", seed, "noise seed");
    app.add_option("--rate", rate, "sample rate in Hz");
    app.add_option("--duration-ms", duration_ms, "recording length");
    app.add_option("-o,--out", out, "output CSV; beats go to <stem>.beats.csv");
    CLI11_PARSE(app, argc, argv);

    try {
        evok::BpmProfile profile{{0, bpm}};
        if (!profile_path.empty()) {
            std::ifstream in(profile_path);
            if (!in) throw std::runtime_error("cannot open profile '" + profile_path + "'");
            std::stringstream text;
            text << in.rdbuf();
            profile = evok::parse_bpm_profile(text.str());
        }
        const auto ppg = evok::generate_ppg(profile, duration_ms, rate, evok::noise_preset(noise), seed);

        std::filesystem::path out_path(out);
        std::ofstream samples(out_path);
        if (!samples) throw std::runtime_error("cannot write '" + out + "'");
        evok::write_ppg_csv(samples, ppg.samples);

        auto beats_path = out_path;
        beats_path.replace_extension(".beats.csv");
        std::ofstream beats(beats_path);
        if (!beats) throw std::runtime_error("cannot write '" + beats_path.string() + "'");
        evok::write_beats_csv(beats, ppg.peak_times_ms);
        spdlog::info("wrote {} samples to {} and {} beats to {}", ppg.samples.size(), out, ppg.peak_times_ms.size(),
                     beats_path.string());
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
