#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vitalcast {

/// On-disk container shared by the bank and checkpoint formats:
///   magic (4 bytes) | version u32 LE | payload_len u64 LE | payload | crc32(payload) u32 LE
/// Lengths are little-endian 64-bit, reals are IEEE-754 doubles. Loading a
/// file distinguishes bad magic, version mismatch, truncation, and checksum
/// failure as separate errors.

std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

class BinaryWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(const std::string& s);
    void f64_vec(const std::vector<double>& v);

    /// Writes magic | version | payload_len | payload | crc32.
    void save(const std::filesystem::path& file, const char magic[4], std::uint32_t version) const;

private:
    std::vector<std::uint8_t> buf_;
};

class BinaryReader {
public:
    /// Verifies magic, payload length, and checksum; the caller checks the
    /// version against what it can parse.
    static BinaryReader load(const std::filesystem::path& file, const char magic[4]);

    std::uint32_t version() const { return version_; }
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    std::vector<double> f64_vec();
    bool exhausted() const { return pos_ == buf_.size(); }

private:
    void need(std::size_t n) const;
    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
    std::uint32_t version_ = 0;
};

}  // namespace vitalcast
