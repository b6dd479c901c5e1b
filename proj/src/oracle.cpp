#include "acqroc/oracle.hpp"

#include <cstdlib>
#include <stdexcept>

namespace acqroc::oracle {

CellProbabilityGrid::CellProbabilityGrid(int num_bins, int num_phases, double fill)
    : bins_(num_bins), phases_(num_phases)
{
    if (num_bins < 1 || num_phases < 1)
        throw std::invalid_argument("cell grid dimensions must be at least 1");
    if (!(fill >= 0.0 && fill <= 1.0))
        throw std::invalid_argument("cell probability outside [0, 1]");
    const auto cells = static_cast<std::size_t>(num_bins) * static_cast<std::size_t>(num_phases);
    probs_.assign(cells, fill);
    accepted_.assign(cells, 0);
}

void CellProbabilityGrid::set_prob(int bin, int phase, double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("cell probability outside [0, 1]");
    probs_.at(index(bin, phase)) = p;
}

void CellProbabilityGrid::set_accepted(int bin, int phase, bool value)
{
    accepted_.at(index(bin, phase)) = value ? 1 : 0;
}

std::vector<std::size_t> visiting_sequence(int num_bins, int num_phases, SearchOrder order)
{
    std::vector<std::size_t> seq;
    seq.reserve(static_cast<std::size_t>(num_bins) * static_cast<std::size_t>(num_phases));
    const auto idx = [&](int bin, int phase) {
        return static_cast<std::size_t>(bin) * static_cast<std::size_t>(num_phases) +
               static_cast<std::size_t>(phase);
    };
    if (order == SearchOrder::CodePhaseFirst) {
        for (int b = 0; b < num_bins; ++b)
            for (int p = 0; p < num_phases; ++p)
                seq.push_back(idx(b, p));
    } else {
        for (int p = 0; p < num_phases; ++p)
            for (int b = 0; b < num_bins; ++b)
                seq.push_back(idx(b, p));
    }
    return seq;
}

StopDistribution stop_distribution(const CellProbabilityGrid& grid, SearchOrder order)
{
    StopDistribution out;
    out.stop.assign(static_cast<std::size_t>(grid.num_bins()) *
                        static_cast<std::size_t>(grid.num_phases()),
                    0.0);
    double survive = 1.0;
    for (std::size_t cell : visiting_sequence(grid.num_bins(), grid.num_phases(), order)) {
        const int bin = static_cast<int>(cell / static_cast<std::size_t>(grid.num_phases()));
        const int phase = static_cast<int>(cell % static_cast<std::size_t>(grid.num_phases()));
        const double p = grid.prob(bin, phase);
        out.stop[cell] = survive * p;
        survive *= 1.0 - p;
    }
    out.no_stop = survive;
    return out;
}

double accepted_stop_probability(const CellProbabilityGrid& grid, SearchOrder order)
{
    const StopDistribution dist = stop_distribution(grid, order);
    double sum = 0.0;
    for (int b = 0; b < grid.num_bins(); ++b)
        for (int p = 0; p < grid.num_phases(); ++p)
            if (grid.accepted(b, p))
                sum += dist.stop[grid.index(b, p)];
    return sum;
}

double averaged_detection(const analytic::CellDetectionTable& cells, int num_bins, int num_phases,
                          int m_accept, SearchOrder order)
{
    if (m_accept < 0 || m_accept >= num_bins)
        throw std::invalid_argument("M must lie in [0, K)");
    const int placements = num_bins * num_phases;
    std::vector<double> per_placement(static_cast<std::size_t>(placements));

#pragma omp parallel for schedule(static)
    for (int idx = 0; idx < placements; ++idx) {
        const int correct_bin = idx / num_phases;
        const int correct_phase = idx % num_phases;
        CellProbabilityGrid grid(num_bins, num_phases, cells.p_fa());
        for (int b = 0; b < num_bins; ++b) {
            const int offset = b - correct_bin;
            grid.set_prob(b, correct_phase, cells.at(offset));
            if (std::abs(offset) <= m_accept)
                grid.set_accepted(b, correct_phase);
        }
        per_placement[static_cast<std::size_t>(idx)] = accepted_stop_probability(grid, order);
    }

    double sum = 0.0;
    for (double v : per_placement)
        sum += v;
    return sum / placements;
}

double averaged_detection(const analytic::NonCentralityProfile& profile, double beta,
                          int num_bins, int num_phases, int m_accept, SearchOrder order,
                          const analytic::ToleranceConfig& tol)
{
    return averaged_detection(analytic::CellDetectionTable::from_profile(profile, beta, tol),
                              num_bins, num_phases, m_accept, order);
}

}  // namespace acqroc::oracle
