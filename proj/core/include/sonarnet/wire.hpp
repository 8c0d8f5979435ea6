#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sonarnet {
struct AcousticImage;
}

namespace sonarnet::wire {

// Frame layout (all little-endian), documented byte-by-byte in protocol.md:
//   u32 magic 0x45525449 ("ERTI")
//   u16 version (1)
//   u16 msg_type
//   u32 sensor_serial
//   u64 timestamp_us
//   u64 seq
//   u64 payload_len
//   payload bytes
//   u32 crc32 over header+payload
// Total frame size = 40 + payload_len.

inline constexpr uint32_t kMagic = 0x45525449;
inline constexpr uint16_t kVersion = 1;
inline constexpr size_t kHeaderSize = 36;
inline constexpr size_t kFrameOverhead = kHeaderSize + 4;
inline constexpr uint64_t kMaxPayload = uint64_t{1} << 32;

enum class MsgType : uint16_t {
    raw_measurement = 1,
    processed_image = 2,
    subscribe = 3,
    ack = 4,
    error = 5,
};

struct Packet {
    uint16_t version = kVersion;
    MsgType msg_type = MsgType::ack;
    uint32_t sensor_serial = 0;
    uint64_t timestamp_us = 0;
    uint64_t seq = 0;
    std::vector<uint8_t> payload;

    bool operator==(const Packet&) const = default;
};

// CRC-32 (IEEE 802.3, reflected, init/xorout 0xFFFFFFFF).
uint32_t crc32(std::span<const uint8_t> bytes);

std::vector<uint8_t> encode_packet(const Packet& p);

// Incremental frame decoder, one instance per connection. feed() buffered
// bytes, then drain next() until it reports need_more.
//
// Resync policy: after a bad magic the decoder scans forward to the next
// magic occurrence; after a CRC mismatch or an implausible length field it
// drops only the 4 magic bytes and rescans, never trusting a corrupt
// length. Any intact frame embedded in the stream is therefore always
// recovered.
class PacketDecoder {
public:
    enum class Status { packet, framing_error, integrity_error, need_more };

    struct Event {
        Status status = Status::need_more;
        Packet packet;       // valid when status == packet
        std::string message; // set for the error statuses
    };

    void feed(std::span<const uint8_t> bytes);
    Event next();

    size_t framing_errors() const { return framing_errors_; }
    size_t integrity_errors() const { return integrity_errors_; }
    size_t packets_decoded() const { return packets_decoded_; }
    size_t buffered() const { return buffer_.size() - pos_; }

private:
    void compact();

    std::vector<uint8_t> buffer_;
    size_t pos_ = 0;
    size_t framing_errors_ = 0;
    size_t integrity_errors_ = 0;
    size_t packets_decoded_ = 0;
};

// Convenience for tests and file-based tooling: decodes exactly one frame
// from the span; throws ProtocolError on anything but a clean packet.
Packet decode_packet(std::span<const uint8_t> bytes, size_t* consumed = nullptr);

// Raw PDM capture as it travels the network and rests on disk.
struct RawMeasurement {
    uint32_t sensor_serial = 0;
    uint64_t timestamp_us = 0;
    uint64_t seq = 0;
    uint16_t channels = 0;
    uint64_t frames = 0;
    double pdm_rate = 0.0;
    std::vector<uint8_t> packed; // channels*frames/8 bytes

    bool operator==(const RawMeasurement&) const = default;
};

std::vector<uint8_t> encode_raw_measurement(const RawMeasurement& m);
RawMeasurement decode_raw_measurement(std::span<const uint8_t> payload);

// Image payloads reuse the AIMG byte layout (see pipeline module).
std::vector<uint8_t> encode_image(const AcousticImage& image);
AcousticImage decode_image(std::span<const uint8_t> payload);

// SUBSCRIBE payload: zero or more u32 serials; empty means "all sensors".
std::vector<uint8_t> encode_subscribe(std::span<const uint32_t> serials);
std::vector<uint32_t> decode_subscribe(std::span<const uint8_t> payload);

// ERROR payload: UTF-8 message.
std::vector<uint8_t> encode_error(const std::string& message);
std::string decode_error(std::span<const uint8_t> payload);

// Whole frames for the common message kinds.
std::vector<uint8_t> measurement_frame(const RawMeasurement& m);
std::vector<uint8_t> image_frame(const AcousticImage& image, uint64_t seq);
std::vector<uint8_t> error_frame(uint32_t serial, uint64_t timestamp_us, uint64_t seq,
                                 const std::string& message);

} // namespace sonarnet::wire
