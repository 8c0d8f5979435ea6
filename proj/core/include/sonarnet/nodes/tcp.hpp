#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sonarnet::nodes {

// Minimal blocking TCP wrappers over POSIX sockets (IPv4).

struct Endpoint {
    std::string host = "127.0.0.1";
    uint16_t port = 0;
};

// "host:port" -> Endpoint; throws ConfigError on malformed input.
Endpoint parse_endpoint(const std::string& text);

class TcpSocket {
public:
    TcpSocket() = default;
    explicit TcpSocket(int fd) : fd_(fd) {}
    ~TcpSocket();

    TcpSocket(const TcpSocket&) = delete;
    TcpSocket& operator=(const TcpSocket&) = delete;
    TcpSocket(TcpSocket&& other) noexcept;
    TcpSocket& operator=(TcpSocket&& other) noexcept;

    // Throws IoError when the connection attempt fails.
    static TcpSocket connect(const Endpoint& to);

    bool valid() const { return fd_ >= 0; }
    void close();

    // Sends the whole span; returns false on any error (connection dead).
    bool send_all(std::span<const uint8_t> bytes);

    // Receives up to buffer.size() bytes. Returns the count, 0 on orderly
    // shutdown, or -1 on timeout (when timeout_ms >= 0) or error.
    long recv_some(std::span<uint8_t> buffer, int timeout_ms = -1);

    // Distinguishes "timed out" from "broken" after recv_some returned -1.
    bool last_was_timeout() const { return last_timeout_; }

private:
    int fd_ = -1;
    bool last_timeout_ = false;
};

class TcpListener {
public:
    TcpListener() = default;
    ~TcpListener();

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    TcpListener(TcpListener&& other) noexcept;
    TcpListener& operator=(TcpListener&& other) noexcept;

    // Binds 0.0.0.0:port (port 0 picks an ephemeral port). Throws IoError.
    static TcpListener listen(uint16_t port, int backlog = 16);

    uint16_t port() const { return port_; }

    // Waits up to timeout_ms for a connection; nullopt on timeout.
    std::optional<TcpSocket> accept(int timeout_ms);

    void close();
    bool valid() const { return fd_ >= 0; }

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

} // namespace sonarnet::nodes
