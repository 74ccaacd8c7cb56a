#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "memnet/kirchhoff.hpp"
#include "oracles.hpp"

using namespace memnet;

namespace {

const DeviceParams kParams = default_device_params();

// Net current leaving every non-terminal live node, worst case.
double worst_kcl(const Lattice& l, const SolveResult& sr) {
    std::vector<double> net(l.node_count(), 0.0);
    for (std::size_t s = 0; s < l.unit_count(); ++s) {
        const auto& u = l.units()[s];
        net[l.index(u.a)] += sr.unit_current(s);
        net[l.index(u.b)] -= sr.unit_current(s);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < l.node_count(); ++i) {
        const auto n = l.node_at(i);
        if (n == l.source() || n == l.sink() || l.is_removed(n)) continue;
        worst = std::max(worst, std::fabs(net[i]));
    }
    return worst;
}

}  // namespace

TEST_CASE("assemble_conductance fixtures") {
    SUBCASE("two nodes, one unit at 100 ohm") {
        const auto l = build_grid(2, 2, kParams, 200.0);
        const UnitId keep[] = {l.unit_id_between({0, 0}, {1, 0}), l.unit_id_between({1, 0}, {1, 1}),
                               l.unit_id_between({0, 1}, {1, 1})};
        const auto single = l.remove_units(keep);
        const auto sys = assemble_conductance(single);
        REQUIRE(sys.nodes.size() == 2);
        CHECK(sys.unit_contributions == 1);
        CHECK(sys.matrix.coeff(0, 0) == doctest::Approx(0.01));
        CHECK(sys.matrix.coeff(0, 1) == doctest::Approx(-0.01));
        CHECK(sys.matrix.coeff(1, 1) == doctest::Approx(0.01));
    }
    SUBCASE("intact 11x11") {
        const auto sys = assemble_conductance(build_grid(11, 11, kParams, 200.0));
        CHECK(sys.nodes.size() == 121);
        CHECK(sys.unit_contributions == 220);
        for (int r = 0; r < sys.matrix.rows(); ++r) {
            double row = 0.0;
            for (int c = 0; c < sys.matrix.cols(); ++c) row += sys.matrix.coeff(r, c);
            REQUIRE(std::fabs(row) < 1e-15);
        }
    }
    SUBCASE("isolated node is excluded") {
        auto l = build_grid(3, 3, kParams, 200.0);
        const UnitId cut[] = {l.unit_id_between({0, 0}, {0, 1}), l.unit_id_between({0, 0}, {1, 0})};
        const auto sys = assemble_conductance(l.remove_units(cut));
        CHECK(sys.nodes.size() == l.live_node_count() - 1);
    }
}

TEST_CASE("solve_potentials examples") {
    SUBCASE("1x2 chain: 6 V across two 200 ohm devices") {
        // A 2x2 grid reduced to the single top-row unit with terminals on it.
        auto l = build_grid(2, 2, kParams, 200.0);
        l.set_terminals({0, 0}, {0, 1});
        const UnitId drop[] = {l.unit_id_between({1, 0}, {1, 1}), l.unit_id_between({0, 0}, {1, 0}),
                               l.unit_id_between({0, 1}, {1, 1})};
        const auto chain = l.remove_units(drop);
        const auto sr = solve_potentials(chain, 6.0);
        CHECK(sr.total_current == doctest::Approx(0.06).epsilon(1e-12));
        REQUIRE(sr.device_currents.size() == 1);
        CHECK(sr.device_currents[0][0] == doctest::Approx(0.03).epsilon(1e-12));
        CHECK(sr.device_currents[0][1] == doctest::Approx(0.03).epsilon(1e-12));
    }
    SUBCASE("three-node chain: middle node sits at half the drive") {
        auto l = build_grid(2, 3, kParams, 200.0);
        l.set_terminals({0, 0}, {0, 2});
        std::vector<UnitId> drop;
        for (const auto& u : l.units())
            if (u.a.row != 0 || u.b.row != 0) drop.push_back(u.id);
        const auto sr = solve_potentials(l.remove_units(drop), 6.0);
        CHECK(sr.potentials[l.index({0, 1})] == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(sr.potentials[l.index({1, 1})] == 0.0);
    }
    SUBCASE("uniform 11x11: mirror symmetry about the middle row and the centre column") {
        const auto l = build_grid(11, 11, kParams, 200.0);
        const auto sr = solve_potentials(l, 6.0);
        for (int r = 0; r < 11; ++r) {
            for (int c = 0; c < 11; ++c) {
                const double v = sr.potentials[l.index({r, c})];
                REQUIRE(v == doctest::Approx(sr.potentials[l.index({10 - r, c})]).epsilon(1e-10));
                REQUIRE(v + sr.potentials[l.index({r, 10 - c})] == doctest::Approx(6.0).epsilon(1e-10));
            }
            REQUIRE(sr.potentials[l.index({r, 5})] == doctest::Approx(3.0).epsilon(1e-10));
        }
        CHECK(sr.residual <= kSolverRelativeTolerance);
    }
    SUBCASE("explicit terminal potentials shift the grounded solution") {
        const auto l = build_grid(5, 5, kParams, 120.0);
        const auto g = solve_potentials(l, 12.0);
        const auto d = solve_potentials(l, 6.0, -6.0);
        for (std::size_t i = 0; i < l.node_count(); ++i)
            REQUIRE(d.potentials[i] == doctest::Approx(g.potentials[i] - 6.0).epsilon(1e-12));
        CHECK(d.total_current == doctest::Approx(g.total_current).epsilon(1e-12));
    }
}

TEST_CASE("disconnected terminals raise NoCircuitError") {
    const auto l = build_grid(3, 3, kParams, 200.0);
    const Node wall[] = {{0, 1}, {1, 1}, {2, 1}};
    const auto cut = remove_nodes(l, wall);
    CHECK_THROWS_AS((void)solve_potentials(cut, 6.0), NoCircuitError);

    auto open = l;
    for (auto& u : open.units()) u.switch_closed = {false, false};
    CHECK_THROWS_AS((void)solve_potentials(open, 6.0), NoCircuitError);
}

TEST_CASE("removed nodes report NaN, floating islands report 0") {
    auto l = build_grid(4, 4, kParams, 200.0);
    l.set_terminals({1, 0}, {1, 3});
    const Node hole[] = {{2, 1}};
    auto d = remove_nodes(l, hole);
    // Cut node (3,0) loose from the rest.
    const UnitId cut[] = {d.unit_id_between({2, 0}, {3, 0}), d.unit_id_between({3, 0}, {3, 1})};
    d = d.remove_units(cut);
    const auto sr = solve_potentials(d, 5.0);
    CHECK(std::isnan(sr.potentials[d.index({2, 1})]));
    CHECK(sr.potentials[d.index({3, 0})] == 0.0);
}

TEST_CASE("cross_section_currents") {
    const auto l = build_grid(11, 11, kParams, 200.0);
    const auto sr = solve_potentials(l, 6.0);
    for (int j = 0; j < 10; ++j) {
        const auto cut = cross_section_currents(sr, l, j);
        REQUIRE(cut.size() == 11);
        REQUIRE(std::accumulate(cut.begin(), cut.end(), 0.0) == doctest::Approx(sr.total_current).epsilon(1e-9));
    }
    CHECK_THROWS_AS((void)cross_section_currents(sr, l, 10), std::out_of_range);
    CHECK_THROWS_AS((void)cross_section_currents(sr, l, -1), std::out_of_range);
}

TEST_CASE("property: solver agrees with the dense oracle on every small lattice") {
    std::mt19937_64 rng(2718);
    int solved = 0;
    for (int rows = 2; rows <= 3; ++rows) {
        for (int cols = 2; cols <= 3; ++cols) {
            for (int trial = 0; trial < 150; ++trial) {
                auto l = oracle::randomize(build_grid(rows, cols, kParams, 200.0), rng, trial % 3 == 0, true);
                const double vs = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
                const double vk = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
                SolveResult sr;
                try {
                    sr = solve_potentials(l, vs, vk);
                } catch (const NoCircuitError&) {
                    continue;
                }
                const auto ref = oracle::dense_potentials(l, vs, vk);
                for (std::size_t i = 0; i < ref.size(); ++i)
                    REQUIRE(sr.potentials[i] == doctest::Approx(ref[i]).epsilon(1e-10).scale(10.0));
                REQUIRE(worst_kcl(l, sr) <= 1e-9);
                ++solved;
            }
        }
    }
    CHECK(solved > 400);
}

TEST_CASE("property: oracle agreement and KCL on larger damaged lattices") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
        auto l = oracle::randomize(build_grid(6, 7, kParams, 200.0), rng, true, false);
        std::vector<Node> damage;
        for (int k = 0; k < 4; ++k) {
            const Node n{static_cast<int>(rng() % 6), static_cast<int>(rng() % 7)};
            if (n != l.source() && n != l.sink()) damage.push_back(n);
        }
        l = remove_nodes(l, damage);
        SolveResult sr;
        try {
            sr = solve_potentials(l, 6.0, -6.0);
        } catch (const NoCircuitError&) {
            continue;
        }
        const auto ref = oracle::dense_potentials(l, 6.0, -6.0);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (std::isnan(ref[i])) {
                REQUIRE(std::isnan(sr.potentials[i]));
            } else {
                REQUIRE(sr.potentials[i] == doctest::Approx(ref[i]).epsilon(1e-10).scale(6.0));
            }
        }
        REQUIRE(worst_kcl(l, sr) <= 1e-9);
    }
}

TEST_CASE("property: linearity, doubling the drive doubles every current exactly") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto l = oracle::randomize(build_grid(5, 5, kParams, 200.0), rng, false, false);
        const auto a = solve_potentials(l, 3.0);
        const auto b = solve_potentials(l, 6.0);
        for (std::size_t s = 0; s < l.unit_count(); ++s) {
            REQUIRE(b.device_currents[s][0] == doctest::Approx(2.0 * a.device_currents[s][0]).epsilon(1e-12));
            REQUIRE(b.device_currents[s][1] == doctest::Approx(2.0 * a.device_currents[s][1]).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: every cut carries the same net current") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const auto l = oracle::randomize(build_grid(7, 9, kParams, 200.0), rng, false, false);
        const auto sr = solve_potentials(l, 6.0, -6.0);
        for (int j = 0; j < 8; ++j) {
            const auto cut = cross_section_currents(sr, l, j);
            REQUIRE(std::accumulate(cut.begin(), cut.end(), 0.0) ==
                    doctest::Approx(sr.total_current).epsilon(1e-9));
        }
    }
}

TEST_CASE("NodalSolver reuse matches fresh solves") {
    std::mt19937_64 rng(77);
    auto l = build_grid(6, 6, kParams, 200.0);
    NodalSolver solver(l);
    std::vector<double> g(l.unit_count()), v(l.node_count());
    for (int trial = 0; trial < 10; ++trial) {
        l = oracle::randomize(l, rng, false, false);
        for (std::size_t s = 0; s < l.unit_count(); ++s) g[s] = l.units()[s].conductance();
        solver.solve(g, 4.0, -4.0, v);
        const auto fresh = solve_potentials(l, 4.0, -4.0);
        for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(v[i] == doctest::Approx(fresh.potentials[i]).epsilon(1e-12));
        CHECK(solver.last_residual() <= kSolverRelativeTolerance);
    }
}
