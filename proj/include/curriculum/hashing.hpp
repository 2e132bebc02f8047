#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace curriculum {

// 64-bit FNV-1a. Used for corpus content hashes and feature hashing; stable
// across platforms and runs.
class Fnv1a {
public:
    static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
    static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

    void update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= kPrime;
        }
    }

    void update_u64(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) {
            state_ ^= static_cast<unsigned char>(v >> (8 * i));
            state_ *= kPrime;
        }
    }

    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

    [[nodiscard]] std::string hex() const;

private:
    std::uint64_t state_ = kOffset;
};

[[nodiscard]] inline std::uint64_t fnv1a(std::string_view bytes) noexcept {
    Fnv1a h;
    h.update(bytes);
    return h.digest();
}

[[nodiscard]] std::string to_hex(std::uint64_t v);

}  // namespace curriculum
