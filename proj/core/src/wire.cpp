#include "sonarnet/wire.hpp"

#include "sonarnet/detail/bytes.hpp"
#include "sonarnet/errors.hpp"
#include "sonarnet/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cstring>

namespace sonarnet::wire {

namespace {

constexpr std::array<uint8_t, 4> kMagicBytes{0x49, 0x54, 0x52, 0x45}; // 0x45525449 LE

std::array<uint32_t, 256> make_crc_table() {
    std::array<uint32_t, 256> table{};
    for (uint32_t i = 0; i < 256; ++i) {
        uint32_t c = i;
        for (int bit = 0; bit < 8; ++bit) {
            c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        }
        table[i] = c;
    }
    return table;
}

const std::array<uint32_t, 256>& crc_table() {
    static const auto table = make_crc_table();
    return table;
}

struct Header {
    uint32_t magic;
    uint16_t version;
    uint16_t msg_type;
    uint32_t sensor_serial;
    uint64_t timestamp_us;
    uint64_t seq;
    uint64_t payload_len;
};

Header parse_header(const uint8_t* p) {
    Header h;
    std::memcpy(&h.magic, p, 4);
    std::memcpy(&h.version, p + 4, 2);
    std::memcpy(&h.msg_type, p + 6, 2);
    std::memcpy(&h.sensor_serial, p + 8, 4);
    std::memcpy(&h.timestamp_us, p + 12, 8);
    std::memcpy(&h.seq, p + 20, 8);
    std::memcpy(&h.payload_len, p + 28, 8);
    return h;
}

} // namespace

uint32_t crc32(std::span<const uint8_t> bytes) {
    const auto& table = crc_table();
    uint32_t c = 0xFFFFFFFFu;
    for (uint8_t b : bytes) c = table[(c ^ b) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<uint8_t> encode_packet(const Packet& p) {
    if (p.payload.size() > kMaxPayload) {
        throw ProtocolError("encode_packet: payload of " + std::to_string(p.payload.size()) +
                            " bytes exceeds the 2^32 limit");
    }
    std::vector<uint8_t> out;
    out.reserve(kFrameOverhead + p.payload.size());
    detail::append<uint32_t>(out, kMagic);
    detail::append<uint16_t>(out, p.version);
    detail::append<uint16_t>(out, static_cast<uint16_t>(p.msg_type));
    detail::append<uint32_t>(out, p.sensor_serial);
    detail::append<uint64_t>(out, p.timestamp_us);
    detail::append<uint64_t>(out, p.seq);
    detail::append<uint64_t>(out, static_cast<uint64_t>(p.payload.size()));
    detail::append_bytes(out, p.payload);
    detail::append<uint32_t>(out, crc32({out.data(), out.size()}));
    return out;
}

void PacketDecoder::feed(std::span<const uint8_t> bytes) {
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

void PacketDecoder::compact() {
    if (pos_ > 0 && (pos_ >= buffer_.size() || pos_ > 65536)) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<long>(pos_));
        pos_ = 0;
    }
}

PacketDecoder::Event PacketDecoder::next() {
    while (true) {
        const size_t available = buffer_.size() - pos_;
        if (available < 4) {
            compact();
            return {Status::need_more, {}, {}};
        }
        const uint8_t* head = buffer_.data() + pos_;
        if (!std::equal(kMagicBytes.begin(), kMagicBytes.end(), head)) {
            // Scan for the next magic occurrence.
            const auto* begin = buffer_.data() + pos_;
            const auto* end = buffer_.data() + buffer_.size();
            const auto* hit = std::search(begin + 1, end, kMagicBytes.begin(), kMagicBytes.end());
            const size_t skipped = static_cast<size_t>(hit - begin);
            if (hit == end) {
                // Keep a possible magic prefix at the tail.
                const size_t keep = std::min<size_t>(3, available);
                pos_ = buffer_.size() - keep;
                compact();
                return {Status::need_more, {}, {}};
            }
            pos_ += skipped;
            ++framing_errors_;
            return {Status::framing_error, {},
                    "skipped " + std::to_string(skipped) + " bytes before next frame"};
        }
        if (available < kHeaderSize) {
            compact();
            return {Status::need_more, {}, {}};
        }
        const Header h = parse_header(head);
        if (h.payload_len > kMaxPayload) {
            pos_ += 4; // do not trust the corrupt length
            ++framing_errors_;
            return {Status::framing_error, {},
                    "implausible payload length " + std::to_string(h.payload_len)};
        }
        const size_t frame_size = kFrameOverhead + static_cast<size_t>(h.payload_len);
        if (available < frame_size) {
            compact();
            return {Status::need_more, {}, {}};
        }
        uint32_t stored_crc;
        std::memcpy(&stored_crc, head + kHeaderSize + h.payload_len, 4);
        const uint32_t computed =
            crc32({head, kHeaderSize + static_cast<size_t>(h.payload_len)});
        if (stored_crc != computed) {
            pos_ += 4;
            ++integrity_errors_;
            return {Status::integrity_error, {}, "crc mismatch, frame discarded"};
        }
        if (h.version != kVersion || h.msg_type < 1 || h.msg_type > 5) {
            pos_ += frame_size; // crc valid, length trustworthy
            ++framing_errors_;
            return {Status::framing_error, {},
                    h.version != kVersion
                        ? "unsupported version " + std::to_string(h.version)
                        : "unknown message type " + std::to_string(h.msg_type)};
        }
        Packet p;
        p.version = h.version;
        p.msg_type = static_cast<MsgType>(h.msg_type);
        p.sensor_serial = h.sensor_serial;
        p.timestamp_us = h.timestamp_us;
        p.seq = h.seq;
        p.payload.assign(head + kHeaderSize, head + kHeaderSize + h.payload_len);
        pos_ += frame_size;
        ++packets_decoded_;
        compact();
        return {Status::packet, std::move(p), {}};
    }
}

Packet decode_packet(std::span<const uint8_t> bytes, size_t* consumed) {
    PacketDecoder d;
    d.feed(bytes);
    const auto event = d.next();
    switch (event.status) {
        case PacketDecoder::Status::packet:
            if (consumed != nullptr) *consumed = bytes.size() - d.buffered();
            return event.packet;
        case PacketDecoder::Status::need_more:
            throw ProtocolError("decode_packet: truncated frame");
        default:
            throw ProtocolError("decode_packet: " + event.message);
    }
}

std::vector<uint8_t> encode_raw_measurement(const RawMeasurement& m) {
    std::vector<uint8_t> out;
    out.reserve(38 + m.packed.size());
    detail::append<uint32_t>(out, m.sensor_serial);
    detail::append<uint64_t>(out, m.timestamp_us);
    detail::append<uint64_t>(out, m.seq);
    detail::append<uint16_t>(out, m.channels);
    detail::append<uint64_t>(out, m.frames);
    detail::append<double>(out, m.pdm_rate);
    detail::append_bytes(out, m.packed);
    return out;
}

RawMeasurement decode_raw_measurement(std::span<const uint8_t> payload) {
    detail::ByteReader r(payload, "raw measurement");
    RawMeasurement m;
    m.sensor_serial = r.read<uint32_t>();
    m.timestamp_us = r.read<uint64_t>();
    m.seq = r.read<uint64_t>();
    m.channels = r.read<uint16_t>();
    m.frames = r.read<uint64_t>();
    m.pdm_rate = r.read<double>();
    if (m.channels == 0 || m.frames == 0) {
        throw DecodeError("raw measurement: zero channels or frames");
    }
    if (m.frames % 8 != 0) {
        throw DecodeError("raw measurement: frame count " + std::to_string(m.frames) +
                          " not divisible by 8");
    }
    const uint64_t expected = static_cast<uint64_t>(m.channels) * m.frames / 8;
    if (r.remaining() != expected) {
        throw DecodeError("raw measurement: packed data is " + std::to_string(r.remaining()) +
                          " bytes, expected " + std::to_string(expected) +
                          (r.remaining() < expected
                               ? " (missing " + std::to_string(expected - r.remaining()) + ")"
                               : ""));
    }
    const auto view = r.read_bytes(static_cast<size_t>(expected));
    m.packed.assign(view.begin(), view.end());
    return m;
}

std::vector<uint8_t> encode_image(const AcousticImage& image) {
    return image_to_bytes(image);
}

AcousticImage decode_image(std::span<const uint8_t> payload) {
    return image_from_bytes(payload);
}

std::vector<uint8_t> encode_subscribe(std::span<const uint32_t> serials) {
    std::vector<uint8_t> out;
    out.reserve(serials.size() * 4);
    for (uint32_t s : serials) detail::append<uint32_t>(out, s);
    return out;
}

std::vector<uint32_t> decode_subscribe(std::span<const uint8_t> payload) {
    if (payload.size() % 4 != 0) {
        throw DecodeError("subscribe payload: size " + std::to_string(payload.size()) +
                          " is not a multiple of 4");
    }
    std::vector<uint32_t> serials(payload.size() / 4);
    if (!serials.empty()) std::memcpy(serials.data(), payload.data(), payload.size());
    return serials;
}

std::vector<uint8_t> encode_error(const std::string& message) {
    return {message.begin(), message.end()};
}

std::string decode_error(std::span<const uint8_t> payload) {
    return {payload.begin(), payload.end()};
}

std::vector<uint8_t> measurement_frame(const RawMeasurement& m) {
    Packet p;
    p.msg_type = MsgType::raw_measurement;
    p.sensor_serial = m.sensor_serial;
    p.timestamp_us = m.timestamp_us;
    p.seq = m.seq;
    p.payload = encode_raw_measurement(m);
    return encode_packet(p);
}

std::vector<uint8_t> image_frame(const AcousticImage& image, uint64_t seq) {
    Packet p;
    p.msg_type = MsgType::processed_image;
    p.sensor_serial = image.sensor_serial;
    p.timestamp_us = image.timestamp_us;
    p.seq = seq;
    p.payload = encode_image(image);
    return encode_packet(p);
}

std::vector<uint8_t> error_frame(uint32_t serial, uint64_t timestamp_us, uint64_t seq,
                                 const std::string& message) {
    Packet p;
    p.msg_type = MsgType::error;
    p.sensor_serial = serial;
    p.timestamp_us = timestamp_us;
    p.seq = seq;
    p.payload = encode_error(message);
    return encode_packet(p);
}

} // namespace sonarnet::wire
