#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acqroc/oracle.hpp"

using namespace acqroc;
using oracle::CellProbabilityGrid;
using analytic::SearchOrder;

TEST_CASE("single cell")
{
    CellProbabilityGrid g(1, 1, 0.3);
    const auto d = oracle::stop_distribution(g, SearchOrder::CodePhaseFirst);
    CHECK(d.stop[0] == doctest::Approx(0.3));
    CHECK(d.no_stop == doctest::Approx(0.7));
}

TEST_CASE("uniform grid closed form")
{
    CellProbabilityGrid g(3, 4, 0.1);
    for (auto order : {SearchOrder::CodePhaseFirst, SearchOrder::DopplerFirst}) {
        const auto d = oracle::stop_distribution(g, order);
        CHECK(d.no_stop == doctest::Approx(std::pow(0.9, 12)).epsilon(1e-14));
        double sum = d.no_stop;
        for (double s : d.stop)
            sum += s;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("2x2 grid by hand")
{
    // bins x phases: [[0.1, 0.2], [0.3, 0.4]]
    CellProbabilityGrid g(2, 2);
    g.set_prob(0, 0, 0.1);
    g.set_prob(0, 1, 0.2);
    g.set_prob(1, 0, 0.3);
    g.set_prob(1, 1, 0.4);
    // Code-first visits (0,0) (0,1) (1,0) (1,1).
    const auto cf = oracle::stop_distribution(g, SearchOrder::CodePhaseFirst);
    CHECK(cf.stop[g.index(0, 0)] == doctest::Approx(0.1));
    CHECK(cf.stop[g.index(0, 1)] == doctest::Approx(0.9 * 0.2));
    CHECK(cf.stop[g.index(1, 0)] == doctest::Approx(0.9 * 0.8 * 0.3));
    CHECK(cf.stop[g.index(1, 1)] == doctest::Approx(0.9 * 0.8 * 0.7 * 0.4));
    CHECK(cf.no_stop == doctest::Approx(0.9 * 0.8 * 0.7 * 0.6));
    // Doppler-first visits (0,0) (1,0) (0,1) (1,1).
    const auto df = oracle::stop_distribution(g, SearchOrder::DopplerFirst);
    CHECK(df.stop[g.index(1, 0)] == doctest::Approx(0.9 * 0.3));
    CHECK(df.stop[g.index(0, 1)] == doctest::Approx(0.9 * 0.7 * 0.2));
    CHECK(df.stop[g.index(1, 1)] == doctest::Approx(0.9 * 0.7 * 0.8 * 0.4));

    g.set_accepted(1, 0);
    g.set_accepted(0, 1);
    CHECK(oracle::accepted_stop_probability(g, SearchOrder::CodePhaseFirst) ==
          doctest::Approx(0.9 * 0.2 + 0.9 * 0.8 * 0.3));
}

TEST_CASE("visiting sequences")
{
    const auto cf = oracle::visiting_sequence(2, 3, SearchOrder::CodePhaseFirst);
    CHECK(cf == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    const auto df = oracle::visiting_sequence(2, 3, SearchOrder::DopplerFirst);
    CHECK(df == std::vector<std::size_t>{0, 3, 1, 4, 2, 5});
}

TEST_CASE("equals the analytic refined formulas")
{
    const analytic::NonCentralityProfile profile({9.0, 3.0, 0.5});
    const auto cells = analytic::CellDetectionTable::from_profile(profile, 3.0);
    CHECK(std::abs(oracle::averaged_detection(cells, 3, 4, 1, SearchOrder::CodePhaseFirst) -
                   analytic::global_pdet_code_first(cells, 1, 4, 3)) <= 1e-12);
    CHECK(std::abs(oracle::averaged_detection(cells, 3, 4, 1, SearchOrder::DopplerFirst) -
                   analytic::global_pdet_doppler_first(cells, 1, 4, 3)) <= 1e-12);
    CHECK(oracle::averaged_detection(profile, 3.0, 3, 4, 1, SearchOrder::CodePhaseFirst) ==
          oracle::averaged_detection(cells, 3, 4, 1, SearchOrder::CodePhaseFirst));

    const auto single = analytic::CellDetectionTable::from_profile(
        analytic::NonCentralityProfile::single_signal(12.0), 4.0);
    CHECK(std::abs(oracle::averaged_detection(single, 4, 5, 0, SearchOrder::CodePhaseFirst) -
                   analytic::global_pdet_naive(12.0, 4.0, 5, 4)) <= 1e-12);
}

TEST_CASE("beta = 0 stops at the first visited cell")
{
    const analytic::NonCentralityProfile profile({9.0, 3.0});
    const auto cells = analytic::CellDetectionTable::from_profile(profile, 0.0);
    // The first cell (bin 0, phase 0) is accepted for placements at phase 0
    // and bins 0..M.
    const int k = 4, n = 3, m = 1;
    CHECK(oracle::averaged_detection(cells, k, n, m, SearchOrder::CodePhaseFirst) ==
          doctest::Approx(2.0 / (k * n)));
    CHECK(oracle::averaged_detection(cells, k, n, m, SearchOrder::DopplerFirst) ==
          doctest::Approx(2.0 / (k * n)));
}

TEST_CASE("invalid input")
{
    CHECK_THROWS_AS(CellProbabilityGrid(0, 1), std::invalid_argument);
    CellProbabilityGrid g(1, 1);
    CHECK_THROWS_AS(g.set_prob(0, 0, 1.5), std::invalid_argument);
    const auto cells = analytic::CellDetectionTable::from_profile(
        analytic::NonCentralityProfile({1.0}), 1.0);
    CHECK_THROWS_AS(oracle::averaged_detection(cells, 2, 2, 2, SearchOrder::CodePhaseFirst),
                    std::invalid_argument);
}
