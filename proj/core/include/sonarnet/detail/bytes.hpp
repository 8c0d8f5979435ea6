#pragma once

#include "sonarnet/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace sonarnet::detail {

static_assert(std::endian::native == std::endian::little,
              "wire and file formats assume a little-endian host");

template <typename T>
void append(std::vector<uint8_t>& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const size_t at = out.size();
    out.resize(at + sizeof(T));
    std::memcpy(out.data() + at, &value, sizeof(T));
}

inline void append_bytes(std::vector<uint8_t>& out, std::span<const uint8_t> bytes) {
    out.insert(out.end(), bytes.begin(), bytes.end());
}

// Sequential parser over a byte span; reads past the end raise DecodeError
// naming the missing byte count.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> bytes, std::string context = "payload")
        : bytes_(bytes), context_(std::move(context)) {}

    size_t remaining() const { return bytes_.size() - pos_; }
    size_t position() const { return pos_; }

    template <typename T>
    T read() {
        static_assert(std::is_trivially_copyable_v<T>);
        require(sizeof(T));
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::span<const uint8_t> read_bytes(size_t n) {
        require(n);
        auto view = bytes_.subspan(pos_, n);
        pos_ += n;
        return view;
    }

    void require(size_t n) const {
        if (remaining() < n) {
            throw DecodeError(context_ + ": truncated, need " + std::to_string(n) +
                              " bytes at offset " + std::to_string(pos_) + " but only " +
                              std::to_string(remaining()) + " remain (missing " +
                              std::to_string(n - remaining()) + ")");
        }
    }

private:
    std::span<const uint8_t> bytes_;
    size_t pos_ = 0;
    std::string context_;
};

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> bytes);

} // namespace sonarnet::detail
