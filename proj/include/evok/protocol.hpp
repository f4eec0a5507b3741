#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>

namespace evok::protocol {

inline constexpr std::size_t kFrameSize = 26;
inline constexpr std::uint8_t kMagic0 = 0x45;  // 'E'
inline constexpr std::uint8_t kMagic1 = 0x56;  // 'V'
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 45450;

enum class MsgType : std::uint8_t { HrData = 0, Hello = 1 };

namespace flags {
inline constexpr std::uint8_t kWarmup = 0x01;
inline constexpr std::uint8_t kContactLost = 0x02;
inline constexpr std::uint8_t kAll = kWarmup | kContactLost;
}  // namespace flags

struct Frame {
    std::uint8_t version = kVersion;
    MsgType msg_type = MsgType::HrData;
    std::uint8_t group_id = 0;
    std::uint32_t sender_id = 0;
    std::uint32_t seq = 0;
    std::uint64_t timestamp_ms = 0;
    std::uint16_t bpm = 0;
    std::uint8_t flags = 0;

    bool warmup() const noexcept { return (flags & flags::kWarmup) != 0; }
    bool contact_lost() const noexcept { return (flags & flags::kContactLost) != 0; }

    friend bool operator==(const Frame&, const Frame&) = default;
};

using WireBytes = std::array<std::uint8_t, kFrameSize>;

class InvalidFrame : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class DecodeError { BadMagic, BadLength, BadVersion, BadCrc, FieldOutOfRange };

std::string_view to_string(DecodeError e) noexcept;

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) noexcept;

/// Empty when the frame is valid; otherwise a description of the first violation.
std::optional<std::string_view> validate(const Frame& frame) noexcept;

/// Throws InvalidFrame when `frame` violates a field range.
WireBytes encode(const Frame& frame);

/// Validation order: length, magic, version, CRC, field ranges.
std::variant<Frame, DecodeError> decode(std::span<const std::uint8_t> bytes) noexcept;

/// (a - b) mod 2^32 in [1, 2^31).
constexpr bool seq_newer(std::uint32_t candidate, std::uint32_t last) noexcept {
    const std::uint32_t diff = candidate - last;
    return diff >= 1u && diff < 0x8000'0000u;
}

/// Group match plus wrap-aware freshness against the last accepted sequence.
constexpr bool accepts(std::uint8_t receiver_group, std::optional<std::uint32_t> last_seq,
                       const Frame& frame) noexcept {
    if (frame.group_id != receiver_group) return false;
    return !last_seq || seq_newer(frame.seq, *last_seq);
}

}  // namespace evok::protocol
