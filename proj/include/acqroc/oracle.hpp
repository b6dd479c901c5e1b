#pragma once

#include <vector>

#include "acqroc/analytic.hpp"

namespace acqroc::oracle {

using analytic::SearchOrder;

/// Per-cell threshold-crossing probabilities of a K x N search space
/// (bins x code phases, row-major by bin) with the set of cells whose
/// selection counts as a detection. Cells are independent.
class CellProbabilityGrid {
public:
    CellProbabilityGrid(int num_bins, int num_phases, double fill = 0.0);

    int num_bins() const { return bins_; }
    int num_phases() const { return phases_; }

    double prob(int bin, int phase) const { return probs_[index(bin, phase)]; }
    void set_prob(int bin, int phase, double p);
    bool accepted(int bin, int phase) const { return accepted_[index(bin, phase)] != 0; }
    void set_accepted(int bin, int phase, bool value = true);

    std::size_t index(int bin, int phase) const
    {
        return static_cast<std::size_t>(bin) * static_cast<std::size_t>(phases_) +
               static_cast<std::size_t>(phase);
    }

private:
    int bins_;
    int phases_;
    std::vector<double> probs_;
    std::vector<char> accepted_;
};

struct StopDistribution {
    /// Probability that the search stops at each cell, indexed like the grid.
    std::vector<double> stop;
    double no_stop = 0.0;
};

/// Cell index sequence visited by a serial search in the given order.
std::vector<std::size_t> visiting_sequence(int num_bins, int num_phases, SearchOrder order);

/// Stop probability at the i-th visited cell is p_i * prod_{j<i} (1 - p_j).
StopDistribution stop_distribution(const CellProbabilityGrid& grid, SearchOrder order);

/// Total stop probability over the grid's accepted cells.
double accepted_stop_probability(const CellProbabilityGrid& grid, SearchOrder order);

/// Global detection probability by direct evaluation: for every placement
/// of the correct (bin, phase), build the cell grid (correct-phase cells
/// take P_det of their bin offset, every other cell takes P_fa), accept the
/// correct phase in bins within +/-M (clipped to the grid), and average the
/// accepted stop probability over all K*N placements.
double averaged_detection(const analytic::CellDetectionTable& cells, int num_bins, int num_phases,
                          int m_accept, SearchOrder order);

double averaged_detection(const analytic::NonCentralityProfile& profile, double beta,
                          int num_bins, int num_phases, int m_accept, SearchOrder order,
                          const analytic::ToleranceConfig& tol = {});

}  // namespace acqroc::oracle
