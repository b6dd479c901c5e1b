#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace acqroc::prn {

inline constexpr int kCodeLength = 1023;
inline constexpr int kNumPrns = 32;

/// GPS L1 C/A Gold code for one PRN, stored as +/-1 chips.
///
/// Chip mapping: code bit 0 -> +1, code bit 1 -> -1, so that the product of
/// two chips is the XOR of the underlying bits.
class CaCode {
public:
    /// Throws std::domain_error for prn outside [1, 32].
    explicit CaCode(int prn);

    int prn() const { return prn_; }
    std::span<const std::int8_t> chips() const { return chips_; }
    std::int8_t operator[](int i) const { return chips_[static_cast<std::size_t>(i)]; }
    static constexpr int size() { return kCodeLength; }

private:
    int prn_;
    std::array<std::int8_t, kCodeLength> chips_;
};

inline CaCode generate_ca_code(int prn) { return CaCode(prn); }

/// (1/N) sum_n a[n] * b[(n - lag) mod N]. Throws std::invalid_argument on
/// a length mismatch or a lag outside [0, N).
double circular_correlation(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                            int lag);

}  // namespace acqroc::prn
