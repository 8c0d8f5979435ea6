#include "sonarnet/nodes/app.hpp"

#include "sonarnet/errors.hpp"
#include "sonarnet/nodes/log.hpp"
#include "sonarnet/nodes/sync.hpp"

#include <chrono>
#include <thread>

namespace sonarnet::nodes {

AppClient::AppClient(Endpoint central, std::vector<uint32_t> filter, bool auto_resubscribe)
    : central_(std::move(central)), filter_(std::move(filter)),
      auto_resubscribe_(auto_resubscribe), buffer_(64 * 1024) {}

std::optional<std::string> AppClient::subscribe() {
    socket_ = TcpSocket::connect(central_);
    connected_ = true;
    decoder_ = wire::PacketDecoder();

    wire::Packet sub;
    sub.msg_type = wire::MsgType::subscribe;
    sub.timestamp_us = wall_clock_us();
    sub.payload = wire::encode_subscribe({filter_.data(), filter_.size()});
    const auto frame = wire::encode_packet(sub);
    if (!socket_.send_all({frame.data(), frame.size()})) {
        connected_ = false;
        throw IoError("app: failed to send SUBSCRIBE");
    }

    // First reply is either ACK or ERROR.
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (std::chrono::steady_clock::now() < deadline) {
        auto event = decoder_.next();
        if (event.status == wire::PacketDecoder::Status::packet) {
            if (event.packet.msg_type == wire::MsgType::ack) return std::nullopt;
            if (event.packet.msg_type == wire::MsgType::error) {
                connected_ = false;
                socket_.close();
                return wire::decode_error(
                    {event.packet.payload.data(), event.packet.payload.size()});
            }
            continue; // unexpected type before ACK; keep waiting
        }
        if (event.status != wire::PacketDecoder::Status::need_more) continue;
        const long n = socket_.recv_some({buffer_.data(), buffer_.size()}, 100);
        if (n == 0) {
            connected_ = false;
            throw IoError("app: connection closed during subscribe");
        }
        if (n > 0) decoder_.feed({buffer_.data(), static_cast<size_t>(n)});
    }
    connected_ = false;
    throw IoError("app: no subscribe acknowledgement");
}

std::optional<AppClient::Event> AppClient::to_event(const wire::Packet& p) {
    Event e;
    e.serial = p.sensor_serial;
    e.seq = p.seq;
    e.timestamp_us = p.timestamp_us;
    if (p.msg_type == wire::MsgType::processed_image) {
        e.kind = Event::Kind::image;
        e.image = wire::decode_image({p.payload.data(), p.payload.size()});
        ++images_;
    } else if (p.msg_type == wire::MsgType::error) {
        e.kind = Event::Kind::error;
        e.message = wire::decode_error({p.payload.data(), p.payload.size()});
        ++errors_;
    } else {
        return std::nullopt;
    }

    auto [it, first] = last_seq_.try_emplace(e.serial, e.seq);
    if (!first) {
        if (e.seq > it->second + 1) {
            gaps_[e.serial] += e.seq - it->second - 1;
            log::warn("app: sensor ", e.serial, " gap, seq ", it->second, " -> ", e.seq);
        }
        it->second = e.seq;
    }
    return e;
}

std::optional<AppClient::Event> AppClient::next(int timeout_ms) {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
        if (connected_) {
            auto event = decoder_.next();
            while (event.status != wire::PacketDecoder::Status::need_more) {
                if (event.status == wire::PacketDecoder::Status::packet) {
                    auto mapped = to_event(event.packet);
                    if (mapped) return mapped;
                } else {
                    log::warn("app: ", event.message);
                }
                event = decoder_.next();
            }
            const auto now = std::chrono::steady_clock::now();
            if (now >= deadline) return std::nullopt;
            const auto remaining =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
            const long n = socket_.recv_some(
                {buffer_.data(), buffer_.size()},
                static_cast<int>(std::min<long long>(remaining.count(), 100)));
            if (n > 0) {
                decoder_.feed({buffer_.data(), static_cast<size_t>(n)});
                continue;
            }
            if (n < 0 && socket_.last_was_timeout()) continue;
            connected_ = false;
            socket_.close();
            log::info("app: connection lost");
        }
        if (!auto_resubscribe_) throw IoError("app: disconnected");
        if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
        try {
            auto refused = subscribe();
            if (refused) throw IoError("app: resubscribe refused: " + *refused);
        } catch (const IoError&) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
        }
    }
}

void AppClient::close() {
    connected_ = false;
    socket_.close();
}

} // namespace sonarnet::nodes
