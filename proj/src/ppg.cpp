#include "evok/ppg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace evok {

namespace {

constexpr double kArtifactSigmaMs = 100.0;
constexpr double kSupportSigmas = 6.0;

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
std::optional<T> parse_int(std::string_view s) {
    s = trim(s);
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

NoiseProfile NoiseProfile::earlobe() {
    return {.white_noise_sigma = 0.004,
            .baseline_wander_amp = 0.02,
            .baseline_wander_freq_hz = 0.2,
            .artifact_rate_per_min = 0.5,
            .artifact_amp = 0.15};
}

NoiseProfile NoiseProfile::fingertip() {
    return {.white_noise_sigma = 0.02,
            .baseline_wander_amp = 0.06,
            .baseline_wander_freq_hz = 0.3,
            .artifact_rate_per_min = 12.0,
            .artifact_amp = 0.6};
}

void NoiseProfile::validate() const {
    if (!finite_non_negative(white_noise_sigma) || !finite_non_negative(baseline_wander_amp) ||
        !finite_non_negative(baseline_wander_freq_hz) || !finite_non_negative(artifact_rate_per_min) ||
        !finite_non_negative(artifact_amp)) {
        throw std::invalid_argument("noise profile fields must be finite and non-negative");
    }
}

NoiseProfile noise_preset(std::string_view name) {
    if (name == "none") return NoiseProfile::none();
    if (name == "earlobe") return NoiseProfile::earlobe();
    if (name == "fingertip") return NoiseProfile::fingertip();
    throw std::invalid_argument(fmt::format("unknown noise preset '{}'", name));
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line) {}

void validate_profile(const BpmProfile& profile) {
    if (profile.empty()) throw InvalidProfile("bpm profile is empty");
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& p = profile[i];
        if (p.bpm < kMinBpm || p.bpm > kMaxBpm) {
            throw InvalidProfile(fmt::format("profile point {}: bpm {} outside [{}, {}]", i, p.bpm,
                                             kMinBpm, kMaxBpm));
        }
        if (i > 0 && p.t_ms <= profile[i - 1].t_ms) {
            throw InvalidProfile(fmt::format("profile point {}: t_ms {} not increasing", i, p.t_ms));
        }
    }
}

double profile_bpm_at(const BpmProfile& profile, double t_ms) {
    if (t_ms <= static_cast<double>(profile.front().t_ms)) return profile.front().bpm;
    if (t_ms >= static_cast<double>(profile.back().t_ms)) return profile.back().bpm;
    auto hi = std::upper_bound(profile.begin(), profile.end(), t_ms,
                               [](double t, const ProfilePoint& p) { return t < static_cast<double>(p.t_ms); });
    auto lo = hi - 1;
    const double span = static_cast<double>(hi->t_ms - lo->t_ms);
    const double frac = (t_ms - static_cast<double>(lo->t_ms)) / span;
    return lo->bpm + frac * (hi->bpm - lo->bpm);
}

BpmProfile parse_bpm_profile(std::string_view text) {
    BpmProfile out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        if (out.empty() && line == "t_ms,bpm") continue;

        const auto comma = line.find(',');
        if (comma == std::string_view::npos) throw ParseError(line_no, "expected 't_ms,bpm'");
        const auto t = parse_int<std::int64_t>(line.substr(0, comma));
        const auto bpm = parse_int<int>(line.substr(comma + 1));
        if (!t || !bpm) throw ParseError(line_no, "expected two integers 't_ms,bpm'");
        if (*bpm < kMinBpm || *bpm > kMaxBpm) {
            throw ParseError(line_no, fmt::format("bpm {} outside [{}, {}]", *bpm, kMinBpm, kMaxBpm));
        }
        if (!out.empty() && *t <= out.back().t_ms) {
            throw ParseError(line_no, fmt::format("t_ms {} not greater than {}", *t, out.back().t_ms));
        }
        out.push_back({*t, *bpm});
    }
    if (out.empty()) throw ParseError(line_no, "profile has no points");
    return out;
}

// ---------------------------------------------------------------------------

PpgGenerator::PpgGenerator(BpmProfile profile, int sample_rate_hz, NoiseProfile noise,
                           std::uint64_t seed, PulseShape shape)
    : profile_(std::move(profile)),
      noise_(noise),
      shape_(shape),
      period_ms_(0),
      noise_rng_(seed),
      artifact_rng_(seed ^ 0xA076'1D64'78BD'642FULL) {
    validate_profile(profile_);
    noise_.validate();
    if (sample_rate_hz < 25 || 1000 % sample_rate_hz != 0) {
        throw std::invalid_argument(
            fmt::format("sample rate {} Hz must be >= 25 and divide 1000", sample_rate_hz));
    }
    period_ms_ = 1000 / sample_rate_hz;
    wander_phase_ = 2.0 * std::numbers::pi * artifact_rng_.next_double();
    next_peak_ms_ = 0.5 * 60000.0 / profile_bpm_at(profile_, 0.0);
    next_artifact_ms_ = noise_.artifact_rate_per_min > 0.0
                            ? artifact_rng_.exponential(60000.0 / noise_.artifact_rate_per_min)
                            : std::numeric_limits<double>::infinity();
}

void PpgGenerator::schedule_until(double t_ms) {
    while (next_peak_ms_ <= t_ms) {
        peaks_.push_back(next_peak_ms_);
        next_peak_ms_ += 60000.0 / profile_bpm_at(profile_, next_peak_ms_);
    }
    while (next_artifact_ms_ <= t_ms) {
        const double sign = artifact_rng_.next_double() < 0.5 ? -1.0 : 1.0;
        const double scale = 0.5 + 0.5 * artifact_rng_.next_double();
        artifacts_.push_back({next_artifact_ms_, sign * scale * noise_.artifact_amp});
        next_artifact_ms_ += artifact_rng_.exponential(60000.0 / noise_.artifact_rate_per_min);
    }
}

PpgSample PpgGenerator::next() {
    const std::int64_t t = index_++ * period_ms_;
    const double td = static_cast<double>(t);
    const double pulse_support = kSupportSigmas * shape_.sigma_ms;
    const double artifact_support = kSupportSigmas * kArtifactSigmaMs;
    schedule_until(td + std::max(pulse_support, artifact_support));

    while (first_live_peak_ < peaks_.size() && peaks_[first_live_peak_] < td - pulse_support) {
        ++first_live_peak_;
    }
    while (!artifacts_.empty() && artifacts_.front().t_ms < td - artifact_support) artifacts_.pop_front();

    double value = shape_.baseline;
    const double two_sigma_sq = 2.0 * shape_.sigma_ms * shape_.sigma_ms;
    for (std::size_t i = first_live_peak_; i < peaks_.size() && peaks_[i] <= td + pulse_support; ++i) {
        const double d = td - peaks_[i];
        value += shape_.amplitude * std::exp(-d * d / two_sigma_sq);
    }
    const double two_art_sq = 2.0 * kArtifactSigmaMs * kArtifactSigmaMs;
    for (const auto& a : artifacts_) {
        if (a.t_ms > td + artifact_support) break;
        const double d = td - a.t_ms;
        value += a.amp * std::exp(-d * d / two_art_sq);
    }
    if (noise_.baseline_wander_amp > 0.0) {
        value += noise_.baseline_wander_amp *
                 std::sin(2.0 * std::numbers::pi * noise_.baseline_wander_freq_hz * td / 1000.0 + wander_phase_);
    }
    if (noise_.white_noise_sigma > 0.0) value += noise_.white_noise_sigma * noise_rng_.gaussian();
    return {t, value};
}

std::vector<double> PpgGenerator::peaks_until(double until_ms) const {
    auto end = std::upper_bound(peaks_.begin(), peaks_.end(), until_ms);
    return {peaks_.begin(), end};
}

GeneratedPpg generate_ppg(const BpmProfile& profile, std::int64_t duration_ms, int sample_rate_hz,
                          const NoiseProfile& noise, std::uint64_t seed) {
    if (duration_ms <= 0) throw std::invalid_argument("duration_ms must be positive");
    PpgGenerator gen(profile, sample_rate_hz, noise, seed);
    GeneratedPpg out;
    const auto count = static_cast<std::size_t>((duration_ms + gen.period_ms() - 1) / gen.period_ms());
    out.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.samples.push_back(gen.next());
    out.peak_times_ms = gen.peaks_until(static_cast<double>(duration_ms));
    if (!out.peak_times_ms.empty() && out.peak_times_ms.back() >= static_cast<double>(duration_ms)) {
        out.peak_times_ms.pop_back();
    }
    return out;
}

// ---------------------------------------------------------------------------

BeatDetector::BeatDetector(DetectorConfig config) : config_(config) {}

std::optional<BeatEvent> BeatDetector::push(const PpgSample& sample) {
    if (prev_) period_ms_ = sample.t_ms - prev_->t_ms;

    while (!window_max_.empty() && window_max_.back().value <= sample.amplitude) window_max_.pop_back();
    window_max_.push_back({sample.t_ms, sample.amplitude});
    while (!window_min_.empty() && window_min_.back().value >= sample.amplitude) window_min_.pop_back();
    window_min_.push_back({sample.t_ms, sample.amplitude});
    const std::int64_t horizon = sample.t_ms - config_.window_ms;
    while (window_max_.front().t_ms <= horizon) window_max_.pop_front();
    while (window_min_.front().t_ms <= horizon) window_min_.pop_front();

    const double hi = window_max_.front().value;
    const double lo = window_min_.front().value;
    const double threshold = 0.5 * (hi + lo);

    std::optional<BeatEvent> event;
    if (above_) {
        if (!peak_after_) peak_after_ = sample.amplitude;
        if (sample.amplitude > peak_.amplitude) {
            peak_before_ = prev_->amplitude;
            peak_ = sample;
            peak_after_.reset();
        }
        if (sample.amplitude < threshold) {
            above_ = false;
            event = finish_candidate();
        }
    } else if (prev_ && hi - lo >= config_.min_swing && prev_->amplitude <= threshold &&
               sample.amplitude > threshold) {
        above_ = true;
        peak_before_ = prev_->amplitude;
        peak_ = sample;
        peak_after_.reset();
    }
    prev_ = sample;
    return event;
}

std::optional<BeatEvent> BeatDetector::finish_candidate() {
    double t = static_cast<double>(peak_.t_ms);
    if (peak_after_) {
        const double denom = peak_before_ - 2.0 * peak_.amplitude + *peak_after_;
        if (denom < 0.0) {
            const double delta = std::clamp(0.5 * (peak_before_ - *peak_after_) / denom, -0.5, 0.5);
            t += delta * static_cast<double>(period_ms_);
        }
    }
    const auto t_ms = static_cast<std::int64_t>(std::llround(t));
    if (last_beat_ms_ && t_ms - *last_beat_ms_ < config_.refractory_ms) return std::nullopt;

    BeatEvent beat{t_ms, std::nullopt};
    if (last_beat_ms_) {
        const std::int64_t ibi = t_ms - *last_beat_ms_;
        if (ibi >= config_.min_ibi_ms && ibi <= config_.max_ibi_ms) beat.ibi_ms = ibi;
    }
    last_beat_ms_ = t_ms;
    return beat;
}

std::vector<BeatEvent> detect_beats(std::span<const PpgSample> samples, const DetectorConfig& config) {
    BeatDetector detector(config);
    std::vector<BeatEvent> out;
    for (const auto& s : samples) {
        if (auto beat = detector.push(s)) out.push_back(*beat);
    }
    return out;
}

// ---------------------------------------------------------------------------

RateEstimator::RateEstimator(WarmupPolicy policy, std::int64_t stream_start_ms)
    : policy_(policy), start_ms_(stream_start_ms) {}

void RateEstimator::push(const BeatEvent& beat) {
    if (!beat.ibi_ms) return;
    // Intervals from before a contact gap do not describe the current rhythm.
    if (last_accepted_ms_ && beat.t_ms - *last_accepted_ms_ > policy_.contact_timeout_ms) recent_.clear();
    recent_.push_back(*beat.ibi_ms);
    while (recent_.size() > policy_.median_window) recent_.pop_front();
    ++accepted_total_;
    last_accepted_ms_ = beat.t_ms;
}

HeartRateEstimate RateEstimator::estimate(std::int64_t now_ms) {
    HeartRateEstimate est;
    const std::int64_t reference = last_accepted_ms_.value_or(start_ms_);
    est.contact_ok = now_ms - reference <= policy_.contact_timeout_ms;

    if (!warmed_up_ && accepted_total_ >= policy_.min_accepted_ibis &&
        now_ms - start_ms_ >= policy_.min_elapsed_ms) {
        warmed_up_ = true;
    }
    est.warmed_up = warmed_up_;

    if (est.contact_ok && recent_.size() >= policy_.min_ibis_for_rate) {
        std::vector<std::int64_t> sorted(recent_.begin(), recent_.end());
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double median = n % 2 == 1 ? static_cast<double>(sorted[n / 2])
                                         : 0.5 * static_cast<double>(sorted[n / 2 - 1] + sorted[n / 2]);
        const auto bpm = static_cast<int>(std::lround(60000.0 / median));
        est.bpm = std::clamp(bpm, kMinBpm, kMaxBpm);
    }
    return est;
}

HeartRateEstimate estimate_rate(std::span<const BeatEvent> beats, std::int64_t now_ms,
                                const WarmupPolicy& policy, std::int64_t stream_start_ms) {
    RateEstimator estimator(policy, stream_start_ms);
    for (const auto& b : beats) estimator.push(b);
    return estimator.estimate(now_ms);
}

// ---------------------------------------------------------------------------

std::vector<PpgSample> read_ppg_csv(std::istream& in) {
    std::vector<PpgSample> out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (row != "t_ms,amplitude") throw ParseError(line_no, "expected header 't_ms,amplitude'");
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string_view::npos) throw ParseError(line_no, "expected 't_ms,amplitude'");
        const auto t = parse_int<std::int64_t>(row.substr(0, comma));
        const auto amp = parse_double(row.substr(comma + 1));
        if (!t || !amp) throw ParseError(line_no, "malformed sample row");
        if (!out.empty() && *t <= out.back().t_ms) throw ParseError(line_no, "t_ms not increasing");
        out.push_back({*t, *amp});
    }
    if (!header_seen) throw ParseError(line_no, "empty PPG file");
    return out;
}

void write_ppg_csv(std::ostream& out, std::span<const PpgSample> samples) {
    out << "t_ms,amplitude\n";
    for (const auto& s : samples) out << fmt::format("{},{:.6f}\n", s.t_ms, s.amplitude);
}

void write_beats_csv(std::ostream& out, std::span<const double> peak_times_ms) {
    out << "t_ms\n";
    for (double t : peak_times_ms) out << std::llround(t) << '\n';
}

}  // namespace evok
