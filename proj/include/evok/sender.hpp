#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "evok/clock.hpp"
#include "evok/ppg.hpp"
#include "evok/protocol.hpp"

namespace evok {

class SourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fire-and-forget datagram output. Implementations throw TransportError.
class DatagramSink {
public:
    virtual ~DatagramSink() = default;
    virtual void send(std::span<const std::uint8_t> datagram) = 0;
};

/// Records every datagram together with the clock reading at send time.
class MemorySink final : public DatagramSink {
public:
    struct Record {
        std::int64_t t_ms;
        std::vector<std::uint8_t> bytes;
    };

    explicit MemorySink(const Clock& clock) : clock_(clock) {}

    void send(std::span<const std::uint8_t> datagram) override {
        records_.push_back({clock_.now_ms(), {datagram.begin(), datagram.end()}});
    }

    const std::vector<Record>& records() const noexcept { return records_; }

private:
    const Clock& clock_;
    std::vector<Record> records_;
};

class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual std::optional<PpgSample> next() = 0;
};

struct SyntheticSourceConfig {
    BpmProfile profile{{0, 75}};
    NoiseProfile noise = NoiseProfile::earlobe();
    std::uint64_t seed = 1;
    /// Unbounded when empty.
    std::optional<std::int64_t> duration_ms;
};

struct FileSourceConfig {
    std::filesystem::path path;
};

struct SenderConfig {
    std::variant<SyntheticSourceConfig, FileSourceConfig> source = SyntheticSourceConfig{};
    int sample_rate_hz = 50;
    std::uint8_t group_id = 0;
    std::uint32_t sender_id = 1;
    std::int64_t cadence_ms = 1000;
    std::optional<std::filesystem::path> log_path;
    DetectorConfig detector{};
    WarmupPolicy warmup{};

    /// Throws std::invalid_argument on cadence < 200 ms or sample rate < 25 Hz.
    void validate() const;
};

/// Opens the configured source. Throws SourceError for unreadable files and
/// std::invalid_argument for bad synthetic parameters.
std::unique_ptr<SampleSource> open_source(const SenderConfig& config);

/// Maps an estimate to the bpm/flags carried in an HR_DATA frame. bpm is 0
/// exactly when a flag is set.
std::pair<std::uint16_t, std::uint8_t> frame_payload(const HeartRateEstimate& estimate);

struct SenderReport {
    int exit_code = 0;
    std::size_t frames_sent = 0;
    std::optional<std::string> error;
};

/// Sends HELLO, then one HR_DATA frame per cadence of stream time until the
/// source is exhausted or `shutdown` becomes true. Startup failures (bad
/// config, unreadable source, unwritable log) return a nonzero exit code
/// without sending anything.
SenderReport run_sender(const SenderConfig& config, Clock& clock, DatagramSink& sink,
                        const std::atomic<bool>* shutdown = nullptr);

}  // namespace evok
