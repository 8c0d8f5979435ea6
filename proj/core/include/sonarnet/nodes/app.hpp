#pragma once

#include "sonarnet/nodes/tcp.hpp"
#include "sonarnet/pipeline.hpp"
#include "sonarnet/wire.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sonarnet::nodes {

// Application-node subscriber: SUBSCRIBE once, then an ordered per-sensor
// stream of processed images (or worker error reports). Reconnects and
// resubscribes after a dropped connection; seq gaps across outages are
// counted per sensor.
class AppClient {
public:
    struct Event {
        enum class Kind { image, error };
        Kind kind = Kind::image;
        uint32_t serial = 0;
        uint64_t seq = 0;
        uint64_t timestamp_us = 0;
        AcousticImage image;  // kind == image
        std::string message;  // kind == error
    };

    AppClient(Endpoint central, std::vector<uint32_t> filter = {},
              bool auto_resubscribe = true);

    // Connects and sends SUBSCRIBE. Returns nullopt on success, or the
    // ERROR packet's message (e.g. a storage-mode central refusing the
    // stream). Transport failures throw IoError.
    std::optional<std::string> subscribe();

    // Next delivery; nullopt on timeout. Throws IoError when the
    // connection is lost and resubscription is disabled or fails.
    std::optional<Event> next(int timeout_ms);

    void close();

    uint64_t images_received() const { return images_; }
    uint64_t errors_received() const { return errors_; }
    // Per-sensor count of seqs skipped across reconnects.
    const std::map<uint32_t, uint64_t>& gaps() const { return gaps_; }

private:
    std::optional<Event> to_event(const wire::Packet& p);

    Endpoint central_;
    std::vector<uint32_t> filter_;
    bool auto_resubscribe_;
    TcpSocket socket_;
    bool connected_ = false;
    wire::PacketDecoder decoder_;
    std::vector<uint8_t> buffer_;
    std::map<uint32_t, uint64_t> last_seq_;
    std::map<uint32_t, uint64_t> gaps_;
    uint64_t images_ = 0;
    uint64_t errors_ = 0;
};

} // namespace sonarnet::nodes
