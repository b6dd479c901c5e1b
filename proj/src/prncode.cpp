#include "acqroc/prncode.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace acqroc::prn {

namespace {

// G2 phase-selector taps (1-based register stages) per PRN.
constexpr std::array<std::pair<int, int>, kNumPrns> kG2Taps = {{
    {2, 6}, {3, 7}, {4, 8}, {5, 9}, {1, 9}, {2, 10}, {1, 8}, {2, 9},
    {3, 10}, {2, 3}, {3, 4}, {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 10},
    {1, 4}, {2, 5}, {3, 6}, {4, 7}, {5, 8}, {6, 9}, {1, 3}, {4, 6},
    {5, 7}, {6, 8}, {7, 9}, {8, 10}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
}};

}  // namespace

CaCode::CaCode(int prn) : prn_(prn), chips_{}
{
    if (prn < 1 || prn > kNumPrns)
        throw std::domain_error("PRN " + std::to_string(prn) + " outside [1, 32]");

    // Both registers start all-ones. G1 = 1 + x^3 + x^10,
    // G2 = 1 + x^2 + x^3 + x^6 + x^8 + x^9 + x^10.
    std::array<int, 10> g1;
    std::array<int, 10> g2;
    g1.fill(1);
    g2.fill(1);
    const auto [s1, s2] = kG2Taps[static_cast<std::size_t>(prn - 1)];

    for (int i = 0; i < kCodeLength; ++i) {
        const int bit = g1[9] ^ g2[s1 - 1] ^ g2[s2 - 1];
        chips_[static_cast<std::size_t>(i)] = bit ? -1 : 1;

        const int f1 = g1[2] ^ g1[9];
        const int f2 = g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9];
        for (int j = 9; j > 0; --j) {
            g1[j] = g1[j - 1];
            g2[j] = g2[j - 1];
        }
        g1[0] = f1;
        g2[0] = f2;
    }
}

double circular_correlation(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                            int lag)
{
    if (a.size() != b.size())
        throw std::invalid_argument("circular_correlation: length mismatch");
    const int n = static_cast<int>(a.size());
    if (n == 0 || lag < 0 || lag >= n)
        throw std::invalid_argument("circular_correlation: lag outside [0, N)");
    long sum = 0;
    for (int i = 0; i < n; ++i) {
        int j = i - lag;
        if (j < 0)
            j += n;
        sum += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    }
    return static_cast<double>(sum) / n;
}

}  // namespace acqroc::prn
