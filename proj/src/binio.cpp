#include "vitalcast/binio.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "vitalcast/errors.hpp"

static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");

namespace vitalcast {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int bit = 0; bit < 8; ++bit) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

}  // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    static const auto table = make_crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void BinaryWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::f64(double v) {
    u64(std::bit_cast<std::uint64_t>(v));
}

void BinaryWriter::str(const std::string& s) {
    u64(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void BinaryWriter::f64_vec(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
}

void BinaryWriter::save(const std::filesystem::path& file, const char magic[4],
                        std::uint32_t version) const {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    out.write(magic, 4);
    std::uint8_t hdr[12];
    for (int i = 0; i < 4; ++i) hdr[i] = static_cast<std::uint8_t>(version >> (8 * i));
    const auto len = static_cast<std::uint64_t>(buf_.size());
    for (int i = 0; i < 8; ++i) hdr[4 + i] = static_cast<std::uint8_t>(len >> (8 * i));
    out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    const std::uint32_t crc = crc32(buf_.data(), buf_.size());
    std::uint8_t tail[4];
    for (int i = 0; i < 4; ++i) tail[i] = static_cast<std::uint8_t>(crc >> (8 * i));
    out.write(reinterpret_cast<const char*>(tail), sizeof tail);
    if (!out) throw IoError("write failed for " + file.string());
}

BinaryReader BinaryReader::load(const std::filesystem::path& file, const char magic[4]) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

    if (raw.size() < 16) throw TruncatedError(file.string() + ": shorter than header");
    if (std::memcmp(raw.data(), magic, 4) != 0)
        throw BadMagicError(file.string() + ": magic mismatch");

    std::uint32_t version = 0;
    for (int i = 0; i < 4; ++i) version |= static_cast<std::uint32_t>(raw[4 + i]) << (8 * i);
    std::uint64_t payload_len = 0;
    for (int i = 0; i < 8; ++i) payload_len |= static_cast<std::uint64_t>(raw[8 + i]) << (8 * i);

    if (raw.size() != 16 + payload_len + 4)
        throw TruncatedError(file.string() + ": size does not match recorded payload length");

    std::uint32_t stored_crc = 0;
    for (int i = 0; i < 4; ++i)
        stored_crc |= static_cast<std::uint32_t>(raw[16 + payload_len + i]) << (8 * i);
    const std::uint32_t actual = crc32(raw.data() + 16, payload_len);
    if (actual != stored_crc) throw ChecksumError(file.string() + ": payload checksum mismatch");

    BinaryReader reader;
    reader.version_ = version;
    reader.buf_.assign(raw.begin() + 16, raw.begin() + 16 + static_cast<std::ptrdiff_t>(payload_len));
    return reader;
}

void BinaryReader::need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw TruncatedError("payload read past end");
}

std::uint8_t BinaryReader::u8() {
    need(1);
    return buf_[pos_++];
}

std::uint32_t BinaryReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t BinaryReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

double BinaryReader::f64() {
    return std::bit_cast<double>(u64());
}

std::string BinaryReader::str() {
    const auto len = u64();
    need(len);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), len);
    pos_ += len;
    return s;
}

std::vector<double> BinaryReader::f64_vec() {
    const auto len = u64();
    std::vector<double> v(len);
    for (auto& x : v) x = f64();
    return v;
}

}  // namespace vitalcast
