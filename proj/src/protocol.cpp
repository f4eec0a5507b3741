#include "evok/protocol.hpp"

namespace evok::protocol {

namespace {

constexpr std::array<std::uint16_t, 256> make_crc_table() {
    std::array<std::uint16_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint16_t crc = static_cast<std::uint16_t>(i << 8);
        for (int bit = 0; bit < 8; ++bit) {
            crc = (crc & 0x8000u) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021u)
                                  : static_cast<std::uint16_t>(crc << 1);
        }
        table[i] = crc;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

template <typename T>
void put_be(std::uint8_t*& out, T value) {
    for (int shift = static_cast<int>(sizeof(T) * 8) - 8; shift >= 0; shift -= 8) {
        *out++ = static_cast<std::uint8_t>(value >> shift);
    }
}

template <typename T>
T get_be(const std::uint8_t*& in) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value = static_cast<T>((value << 8) | *in++);
    return value;
}

}  // namespace

std::string_view to_string(DecodeError e) noexcept {
    switch (e) {
        case DecodeError::BadMagic: return "BadMagic";
        case DecodeError::BadLength: return "BadLength";
        case DecodeError::BadVersion: return "BadVersion";
        case DecodeError::BadCrc: return "BadCrc";
        case DecodeError::FieldOutOfRange: return "FieldOutOfRange";
    }
    return "Unknown";
}

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) noexcept {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : data) {
        crc = static_cast<std::uint16_t>((crc << 8) ^ kCrcTable[((crc >> 8) ^ byte) & 0xFFu]);
    }
    return crc;
}

std::optional<std::string_view> validate(const Frame& frame) noexcept {
    if (frame.version != kVersion) return "unsupported version";
    if (frame.msg_type != MsgType::HrData && frame.msg_type != MsgType::Hello) return "unknown msg_type";
    if (frame.bpm != 0 && (frame.bpm < 30 || frame.bpm > 240)) return "bpm must be 0 or within [30, 240]";
    if (frame.msg_type == MsgType::Hello && frame.bpm != 0) return "HELLO frames carry bpm 0";
    if ((frame.flags & ~flags::kAll) != 0) return "undefined flag bits set";
    return std::nullopt;
}

WireBytes encode(const Frame& frame) {
    if (auto err = validate(frame)) throw InvalidFrame(std::string(*err));
    WireBytes out{};
    std::uint8_t* p = out.data();
    *p++ = kMagic0;
    *p++ = kMagic1;
    *p++ = frame.version;
    *p++ = static_cast<std::uint8_t>(frame.msg_type);
    *p++ = frame.group_id;
    put_be(p, frame.sender_id);
    put_be(p, frame.seq);
    put_be(p, frame.timestamp_ms);
    put_be(p, frame.bpm);
    *p++ = frame.flags;
    put_be(p, crc16_ccitt_false(std::span(out).first(kFrameSize - 2)));
    return out;
}

std::variant<Frame, DecodeError> decode(std::span<const std::uint8_t> bytes) noexcept {
    if (bytes.size() != kFrameSize) return DecodeError::BadLength;
    if (bytes[0] != kMagic0 || bytes[1] != kMagic1) return DecodeError::BadMagic;
    if (bytes[2] != kVersion) return DecodeError::BadVersion;

    const std::uint8_t* crc_ptr = bytes.data() + kFrameSize - 2;
    if (get_be<std::uint16_t>(crc_ptr) != crc16_ccitt_false(bytes.first(kFrameSize - 2))) {
        return DecodeError::BadCrc;
    }

    Frame f;
    const std::uint8_t* p = bytes.data() + 2;
    f.version = *p++;
    const std::uint8_t type = *p++;
    if (type > static_cast<std::uint8_t>(MsgType::Hello)) return DecodeError::FieldOutOfRange;
    f.msg_type = static_cast<MsgType>(type);
    f.group_id = *p++;
    f.sender_id = get_be<std::uint32_t>(p);
    f.seq = get_be<std::uint32_t>(p);
    f.timestamp_ms = get_be<std::uint64_t>(p);
    f.bpm = get_be<std::uint16_t>(p);
    f.flags = *p++;
    if (validate(f)) return DecodeError::FieldOutOfRange;
    return f;
}

}  // namespace evok::protocol
