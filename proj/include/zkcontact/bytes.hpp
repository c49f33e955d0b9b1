#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zkcontact/errors.hpp"

namespace zkcontact {

using Bytes = std::vector<uint8_t>;

/// Append-only buffer writing fixed-width big-endian integers.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) {
        buf_.push_back(static_cast<uint8_t>(v >> 8));
        buf_.push_back(static_cast<uint8_t>(v));
    }
    void u32(uint32_t v) {
        for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<uint8_t>(v >> s));
    }
    void u64(uint64_t v) {
        for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<uint8_t>(v >> s));
    }
    void raw(std::span<const uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void raw(const Bytes& data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void str16(std::string_view s) {
        if (s.size() > 0xffff) throw Error("string too long for u16 length prefix");
        u16(static_cast<uint16_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }
    void bytes32(std::span<const uint8_t> data) {
        if (data.size() > 0xffffffffULL) throw Error("byte string too long for u32 length prefix");
        u32(static_cast<uint32_t>(data.size()));
        raw(data);
    }

    size_t size() const { return buf_.size(); }
    const Bytes& data() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

/// Cursor over a byte span; every read throws ParseError on underrun.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() { return take(1)[0]; }
    uint16_t u16() {
        auto b = take(2);
        return static_cast<uint16_t>(b[0]) << 8 | b[1];
    }
    uint32_t u32() {
        auto b = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | b[i];
        return v;
    }
    uint64_t u64() {
        auto b = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | b[i];
        return v;
    }
    std::span<const uint8_t> raw(size_t n) { return take(n); }
    std::string str16() {
        size_t n = u16();
        auto b = take(n);
        return std::string(b.begin(), b.end());
    }
    Bytes bytes32() {
        size_t n = u32();
        auto b = take(n);
        return Bytes(b.begin(), b.end());
    }

    size_t remaining() const { return data_.size() - pos_; }
    size_t position() const { return pos_; }
    void expect_end() const {
        if (pos_ != data_.size()) throw ParseError("trailing bytes after record");
    }

private:
    std::span<const uint8_t> take(size_t n) {
        if (n > remaining()) throw ParseError("truncated input");
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

} // namespace zkcontact
