#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace chainorder {

// Fixed-length 32-byte hash value.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    static constexpr std::size_t size() { return 32; }
    static Digest zero() { return Digest{}; }
    bool is_zero() const { return *this == Digest{}; }

    std::string to_hex() const;
    // Expects exactly 64 lowercase hex characters.
    static std::optional<Digest> from_hex(std::string_view hex);
};

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

} // namespace chainorder
