#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evok/rng.hpp"

namespace evok {

inline constexpr int kMinBpm = 30;
inline constexpr int kMaxBpm = 240;
inline constexpr std::int64_t kMinIbiMs = 250;
inline constexpr std::int64_t kMaxIbiMs = 2000;

struct PpgSample {
    std::int64_t t_ms = 0;
    double amplitude = 0.0;

    friend bool operator==(const PpgSample&, const PpgSample&) = default;
};

struct NoiseProfile {
    double white_noise_sigma = 0.0;
    double baseline_wander_amp = 0.0;
    double baseline_wander_freq_hz = 0.0;
    double artifact_rate_per_min = 0.0;
    double artifact_amp = 0.0;

    static NoiseProfile none() { return {}; }
    static NoiseProfile earlobe();
    static NoiseProfile fingertip();

    /// Throws std::invalid_argument for negative or non-finite fields.
    void validate() const;

    friend bool operator==(const NoiseProfile&, const NoiseProfile&) = default;
};

/// Parses "none", "earlobe" or "fingertip".
NoiseProfile noise_preset(std::string_view name);

struct ProfilePoint {
    std::int64_t t_ms = 0;
    int bpm = 0;

    friend bool operator==(const ProfilePoint&, const ProfilePoint&) = default;
};

using BpmProfile = std::vector<ProfilePoint>;

class InvalidProfile : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Line-numbered parse failure for `t_ms,bpm` profile text.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Throws InvalidProfile on empty input, non-increasing t_ms or bpm outside [30, 240].
void validate_profile(const BpmProfile& profile);

/// Piecewise-linear bpm at time t; clamps to the end points outside the profile.
double profile_bpm_at(const BpmProfile& profile, double t_ms);

/// Parses lines of `t_ms,bpm`. Blank lines and lines starting with '#' are skipped.
BpmProfile parse_bpm_profile(std::string_view text);

struct BeatEvent {
    std::int64_t t_ms = 0;
    std::optional<std::int64_t> ibi_ms;

    friend bool operator==(const BeatEvent&, const BeatEvent&) = default;
};

struct HeartRateEstimate {
    std::optional<int> bpm;  ///< empty when unavailable
    bool warmed_up = false;
    bool contact_ok = true;

    friend bool operator==(const HeartRateEstimate&, const HeartRateEstimate&) = default;
};

// ---------------------------------------------------------------------------
// Synthetic source

struct PulseShape {
    double baseline = 0.25;
    double amplitude = 0.5;
    double sigma_ms = 60.0;
};

/// Streaming synthetic PPG source.
///
/// Each heartbeat is a Gaussian bump on a constant baseline. Peak k+1 follows
/// peak k by 60000 / bpm(t_k) ms, the first peak sits half an interval after
/// t = 0. Noise terms are white Gaussian noise, a sinusoidal baseline wander
/// and Poisson-timed motion artifacts (Gaussian bumps of random sign).
class PpgGenerator {
public:
    PpgGenerator(BpmProfile profile, int sample_rate_hz, NoiseProfile noise, std::uint64_t seed,
                 PulseShape shape = {});

    std::int64_t period_ms() const noexcept { return period_ms_; }

    /// Next sample; the stream is unbounded.
    PpgSample next();

    /// Peaks scheduled so far whose time is <= `until_ms`, in order. Peaks are
    /// scheduled slightly ahead of the emitted samples.
    std::vector<double> peaks_until(double until_ms) const;

private:
    void schedule_until(double t_ms);

    BpmProfile profile_;
    NoiseProfile noise_;
    PulseShape shape_;
    std::int64_t period_ms_;
    std::int64_t index_ = 0;
    Rng noise_rng_;
    Rng artifact_rng_;
    double wander_phase_;
    double next_peak_ms_;
    double next_artifact_ms_;
    std::vector<double> peaks_;
    std::size_t first_live_peak_ = 0;
    struct Artifact {
        double t_ms;
        double amp;
    };
    std::deque<Artifact> artifacts_;
};

struct GeneratedPpg {
    std::vector<PpgSample> samples;
    std::vector<double> peak_times_ms;  ///< ground truth, every peak < duration
};

/// Pure batch form of PpgGenerator. Throws InvalidProfile or std::invalid_argument.
GeneratedPpg generate_ppg(const BpmProfile& profile, std::int64_t duration_ms, int sample_rate_hz,
                          const NoiseProfile& noise, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Beat detection

struct DetectorConfig {
    std::int64_t window_ms = 3000;
    std::int64_t refractory_ms = 250;
    /// Minimum max-min swing over the window before any beat can fire.
    double min_swing = 0.05;
    std::int64_t min_ibi_ms = kMinIbiMs;
    std::int64_t max_ibi_ms = kMaxIbiMs;
};

/// Adaptive-threshold rising-edge detector.
///
/// The threshold is the midpoint of the running min/max over `window_ms`,
/// recomputed on every sample. An upward crossing arms a candidate; the
/// candidate's time is refined to the parabolic peak of the samples above
/// threshold and the event is emitted when the signal falls back below it.
class BeatDetector {
public:
    explicit BeatDetector(DetectorConfig config = {});

    std::optional<BeatEvent> push(const PpgSample& sample);

    const DetectorConfig& config() const noexcept { return config_; }

private:
    struct Extremum {
        std::int64_t t_ms;
        double value;
    };

    std::optional<BeatEvent> finish_candidate();

    DetectorConfig config_;
    std::deque<Extremum> window_max_;
    std::deque<Extremum> window_min_;
    std::optional<PpgSample> prev_;
    bool above_ = false;
    std::int64_t period_ms_ = 0;
    // candidate peak: sample before, at and after the maximum
    double peak_before_ = 0.0;
    PpgSample peak_{};
    std::optional<double> peak_after_;
    std::optional<std::int64_t> last_beat_ms_;
};

std::vector<BeatEvent> detect_beats(std::span<const PpgSample> samples,
                                    const DetectorConfig& config = {});

// ---------------------------------------------------------------------------
// Rate estimation

struct WarmupPolicy {
    std::int64_t min_elapsed_ms = 60000;
    std::size_t min_accepted_ibis = 10;
    std::size_t median_window = 5;
    std::size_t min_ibis_for_rate = 2;
    std::int64_t contact_timeout_ms = 5000;
};

/// Median-of-recent-IBIs heart rate with warm-up and contact tracking.
class RateEstimator {
public:
    explicit RateEstimator(WarmupPolicy policy = {}, std::int64_t stream_start_ms = 0);

    void push(const BeatEvent& beat);
    HeartRateEstimate estimate(std::int64_t now_ms);

    std::size_t accepted_ibis() const noexcept { return accepted_total_; }

private:
    WarmupPolicy policy_;
    std::int64_t start_ms_;
    std::deque<std::int64_t> recent_;
    std::size_t accepted_total_ = 0;
    std::optional<std::int64_t> last_accepted_ms_;
    bool warmed_up_ = false;
};

/// Batch form: feed `beats` and evaluate at `now_ms`.
HeartRateEstimate estimate_rate(std::span<const BeatEvent> beats, std::int64_t now_ms,
                                const WarmupPolicy& policy = {}, std::int64_t stream_start_ms = 0);

// ---------------------------------------------------------------------------
// CSV

/// Reads `t_ms,amplitude` CSV. Throws std::runtime_error with the line number
/// on malformed rows or non-increasing t_ms.
std::vector<PpgSample> read_ppg_csv(std::istream& in);
void write_ppg_csv(std::ostream& out, std::span<const PpgSample> samples);
void write_beats_csv(std::ostream& out, std::span<const double> peak_times_ms);

}  // namespace evok
