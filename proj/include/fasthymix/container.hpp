#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fasthymix/errors.hpp"
#include "fasthymix/hsi_cube.hpp"

namespace fasthymix {

/// HYC1 container layout (all integers little-endian):
///
///   bytes 0-3   ASCII "HYC1"
///   byte  4     scalar type: 0 = float32, 1 = float64
///   bytes 5-7   reserved, zero
///   bytes 8-19  u32 rows, u32 cols, u32 bands
///   bytes 20-   rows*cols*bands scalars, band-sequential; each band plane
///               is column-major over (row, col)
enum class ScalarType : std::uint8_t { f32 = 0, f64 = 1 };

inline constexpr std::size_t kContainerHeaderBytes = 20;

class ContainerError : public Error {
public:
    enum class Kind {
        io,
        bad_magic,
        bad_header,
        dim_overflow,
        truncated,
        trailing_data,
        non_finite,
    };

    ContainerError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

std::vector<std::byte> encode_container(const HsiCube& cube,
                                        ScalarType type = ScalarType::f64);
HsiCube decode_container(std::span<const std::byte> bytes);

void write_container(const HsiCube& cube, const std::filesystem::path& path,
                     ScalarType type = ScalarType::f64);
HsiCube read_container(const std::filesystem::path& path);

}  // namespace fasthymix
