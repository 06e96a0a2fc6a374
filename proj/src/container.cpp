#include "fasthymix/container.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

namespace fasthymix {

namespace {

constexpr std::array<char, 4> kMagic = {'H', 'Y', 'C', '1'};
// Largest element count accepted on read: keeps the allocation addressable
// and leaves headroom for the 8-byte scalar multiply.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 40;

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

template <typename U>
void put_le(std::byte* dst, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        dst[i] = static_cast<std::byte>((v >> (8 * i)) & 0xFFu);
    }
}

template <typename U>
U get_le(const std::byte* src) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        v |= static_cast<U>(std::to_integer<std::uint8_t>(src[i])) << (8 * i);
    }
    return v;
}

}  // namespace

std::vector<std::byte> encode_container(const HsiCube& cube, ScalarType type) {
    const auto limit = static_cast<Index>(std::numeric_limits<std::uint32_t>::max());
    if (cube.rows() > limit || cube.cols() > limit || cube.bands() > limit) {
        throw ContainerError(ContainerError::Kind::dim_overflow,
                             "cube dimension does not fit in u32");
    }
    const std::size_t scalar = type == ScalarType::f32 ? 4 : 8;
    const auto n = static_cast<std::size_t>(cube.size());

    std::vector<std::byte> out;
    out.reserve(kContainerHeaderBytes + n * scalar);
    for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
    out.push_back(static_cast<std::byte>(type));
    out.insert(out.end(), 3, std::byte{0});
    put_u32(out, static_cast<std::uint32_t>(cube.rows()));
    put_u32(out, static_cast<std::uint32_t>(cube.cols()));
    put_u32(out, static_cast<std::uint32_t>(cube.bands()));

    out.resize(kContainerHeaderBytes + n * scalar);
    std::byte* dst = out.data() + kContainerHeaderBytes;
    const double* src = cube.pixels_by_bands().data();
    for (std::size_t i = 0; i < n; ++i, dst += scalar) {
        if (type == ScalarType::f32) {
            put_le(dst, std::bit_cast<std::uint32_t>(static_cast<float>(src[i])));
        } else {
            put_le(dst, std::bit_cast<std::uint64_t>(src[i]));
        }
    }
    return out;
}

HsiCube decode_container(std::span<const std::byte> bytes) {
    using Kind = ContainerError::Kind;
    if (bytes.size() < kContainerHeaderBytes) {
        if (bytes.size() >= 4 &&
            std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
            throw ContainerError(Kind::bad_magic, "not an HYC1 container");
        }
        throw ContainerError(Kind::truncated, "container header is truncated");
    }
    if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw ContainerError(Kind::bad_magic, "not an HYC1 container");
    }
    const auto flag = std::to_integer<std::uint8_t>(bytes[4]);
    if (flag > 1) {
        throw ContainerError(Kind::bad_header,
                             "unknown scalar type flag " + std::to_string(flag));
    }
    for (std::size_t i = 5; i < 8; ++i) {
        if (bytes[i] != std::byte{0}) {
            throw ContainerError(Kind::bad_header, "reserved header bytes are not zero");
        }
    }
    const auto rows = get_le<std::uint32_t>(bytes.data() + 8);
    const auto cols = get_le<std::uint32_t>(bytes.data() + 12);
    const auto bands = get_le<std::uint32_t>(bytes.data() + 16);
    if (rows == 0 || cols == 0 || bands == 0) {
        throw ContainerError(Kind::bad_header, "zero cube dimension");
    }
    const std::uint64_t pixels = std::uint64_t{rows} * cols;
    if (pixels > kMaxElements || pixels * bands > kMaxElements) {
        throw ContainerError(Kind::dim_overflow, "cube dimensions overflow");
    }
    const std::uint64_t n = pixels * bands;
    const std::size_t scalar = flag == 0 ? 4 : 8;
    const std::uint64_t payload = bytes.size() - kContainerHeaderBytes;
    if (payload < n * scalar) {
        throw ContainerError(Kind::truncated,
                             "payload holds " + std::to_string(payload / scalar) +
                                 " of " + std::to_string(n) + " scalars");
    }
    if (payload > n * scalar) {
        throw ContainerError(Kind::trailing_data, "unexpected bytes after payload");
    }

    Eigen::MatrixXd data(static_cast<Index>(pixels), static_cast<Index>(bands));
    double* dst = data.data();
    const std::byte* src = bytes.data() + kContainerHeaderBytes;
    for (std::uint64_t i = 0; i < n; ++i, src += scalar) {
        const double v =
            flag == 0 ? static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(src)))
                      : std::bit_cast<double>(get_le<std::uint64_t>(src));
        if (!std::isfinite(v)) {
            throw ContainerError(Kind::non_finite,
                                 "non-finite scalar at index " + std::to_string(i));
        }
        dst[i] = v;
    }
    return HsiCube(rows, cols, std::move(data));
}

void write_container(const HsiCube& cube, const std::filesystem::path& path,
                     ScalarType type) {
    const auto bytes = encode_container(cube, type);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ContainerError(ContainerError::Kind::io,
                             "cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw ContainerError(ContainerError::Kind::io, "write failed: " + path.string());
    }
}

HsiCube read_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ContainerError(ContainerError::Kind::io, "cannot open " + path.string());
    }
    std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw ContainerError(ContainerError::Kind::io, "read failed: " + path.string());
    }
    return decode_container(std::as_bytes(std::span(raw)));
}

}  // namespace fasthymix
