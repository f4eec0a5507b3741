#include "evok/sender.hpp"

#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace evok {

namespace {

class SyntheticSource final : public SampleSource {
public:
    SyntheticSource(const SyntheticSourceConfig& cfg, int sample_rate_hz)
        : generator_(cfg.profile, sample_rate_hz, cfg.noise, cfg.seed), duration_ms_(cfg.duration_ms) {
        if (duration_ms_ && *duration_ms_ <= 0) throw std::invalid_argument("duration_ms must be positive");
    }

    std::optional<PpgSample> next() override {
        PpgSample s = generator_.next();
        if (duration_ms_ && s.t_ms >= *duration_ms_) return std::nullopt;
        return s;
    }

private:
    PpgGenerator generator_;
    std::optional<std::int64_t> duration_ms_;
};

class VectorSource final : public SampleSource {
public:
    explicit VectorSource(std::vector<PpgSample> samples) : samples_(std::move(samples)) {}

    std::optional<PpgSample> next() override {
        if (pos_ >= samples_.size()) return std::nullopt;
        return samples_[pos_++];
    }

private:
    std::vector<PpgSample> samples_;
    std::size_t pos_ = 0;
};

struct SourceOpener {
    const SenderConfig& config;

    std::unique_ptr<SampleSource> operator()(const SyntheticSourceConfig& cfg) const {
        return std::make_unique<SyntheticSource>(cfg, config.sample_rate_hz);
    }

    std::unique_ptr<SampleSource> operator()(const FileSourceConfig& cfg) const {
        std::ifstream in(cfg.path);
        if (!in) throw SourceError(fmt::format("cannot open PPG file '{}'", cfg.path.string()));
        try {
            return std::make_unique<VectorSource>(read_ppg_csv(in));
        } catch (const ParseError& e) {
            throw SourceError(fmt::format("{}: {}", cfg.path.string(), e.what()));
        }
    }
};

}  // namespace

void SenderConfig::validate() const {
    if (cadence_ms < 200) throw std::invalid_argument(fmt::format("cadence_ms {} < 200", cadence_ms));
    if (sample_rate_hz < 25) throw std::invalid_argument(fmt::format("sample rate {} Hz < 25", sample_rate_hz));
}

std::unique_ptr<SampleSource> open_source(const SenderConfig& config) {
    return std::visit(SourceOpener{config}, config.source);
}

std::pair<std::uint16_t, std::uint8_t> frame_payload(const HeartRateEstimate& estimate) {
    std::uint8_t f = 0;
    if (!estimate.warmed_up) f |= protocol::flags::kWarmup;
    if (!estimate.contact_ok || !estimate.bpm) f |= protocol::flags::kContactLost;
    if (f != 0) return {0, f};
    return {static_cast<std::uint16_t>(*estimate.bpm), 0};
}

SenderReport run_sender(const SenderConfig& config, Clock& clock, DatagramSink& sink,
                        const std::atomic<bool>* shutdown) {
    SenderReport report;
    std::unique_ptr<SampleSource> source;
    std::ofstream log;
    try {
        config.validate();
        source = open_source(config);
        if (config.log_path) {
            log.open(*config.log_path, std::ios::out | std::ios::trunc);
            if (!log) throw SourceError(fmt::format("cannot open log '{}'", config.log_path->string()));
        }
    } catch (const std::exception& e) {
        report.exit_code = 2;
        report.error = e.what();
        return report;
    }

    const auto stopping = [shutdown] { return shutdown && shutdown->load(std::memory_order_relaxed); };
    std::uint32_t seq = 0;
    const auto send_frame = [&](protocol::Frame frame) {
        frame.group_id = config.group_id;
        frame.sender_id = config.sender_id;
        frame.seq = seq++;
        frame.timestamp_ms = static_cast<std::uint64_t>(clock.now_ms());
        const auto bytes = protocol::encode(frame);
        sink.send(bytes);
        ++report.frames_sent;
    };

    try {
        send_frame({.msg_type = protocol::MsgType::Hello});

        auto first = source->next();
        if (!first) return report;
        const std::int64_t stream_t0 = first->t_ms;
        const std::int64_t clock_t0 = clock.now_ms();
        BeatDetector detector(config.detector);
        RateEstimator estimator(config.warmup, stream_t0);
        std::int64_t next_send = stream_t0 + config.cadence_ms;

        for (auto sample = first; sample && !stopping(); sample = source->next()) {
            clock.sleep_until_ms(clock_t0 + (sample->t_ms - stream_t0));
            if (auto beat = detector.push(*sample)) estimator.push(*beat);

            while (sample->t_ms >= next_send) {
                const HeartRateEstimate est = estimator.estimate(sample->t_ms);
                const auto [bpm, frame_flags] = frame_payload(est);
                send_frame({.msg_type = protocol::MsgType::HrData, .bpm = bpm, .flags = frame_flags});
                if (log.is_open()) {
                    log << nlohmann::json{{"t_ms", clock.now_ms()}, {"bpm", bpm}, {"flags", frame_flags}}.dump()
                        << '\n';
                }
                next_send += config.cadence_ms;
            }
        }
    } catch (const TransportError& e) {
        report.exit_code = 3;
        report.error = e.what();
    }
    return report;
}

}  // namespace evok
