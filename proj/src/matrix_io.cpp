#include "ds/matrix_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ds {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

void save_matrix_dsm(const Matrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write matrix file: " + path);

    std::string header;
    header.append(kMagic, 4);
    put_u32(header, kVersion);
    put_u64(header, m.rows);
    put_u64(header, m.cols);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));

    std::string buf;
    buf.reserve(m.data.size() * 8);
    for (double v : m.data) put_u64(buf, std::bit_cast<std::uint64_t>(v));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix load_matrix_dsm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);

    unsigned char header[24];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (in.gcount() != sizeof(header)) throw std::runtime_error(path + ": truncated header");
    if (std::memcmp(header, kMagic, 4) != 0) throw std::runtime_error(path + ": bad magic, not a DSM1 file");
    if (get_u32(header + 4) != kVersion) {
        throw std::runtime_error(path + ": unsupported format version " + std::to_string(get_u32(header + 4)));
    }
    const std::uint64_t rows = get_u64(header + 8);
    const std::uint64_t cols = get_u64(header + 16);

    Matrix m(rows, cols);
    std::string buf(m.data.size() * 8, '\0');
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
        throw std::runtime_error(path + ": truncated payload");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        m.data[i] = std::bit_cast<double>(get_u64(p + i * 8));
    }
    return m;
}

}  // namespace ds
