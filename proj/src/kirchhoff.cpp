#include "memnet/kirchhoff.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace memnet {

namespace {

std::vector<bool> conducting_component(const Lattice& l, std::size_t start) {
    std::vector<std::vector<std::size_t>> adjacency(l.node_count());
    for (const auto& u : l.units()) {
        if (u.conductance() <= 0.0) continue;
        adjacency[l.index(u.a)].push_back(l.index(u.b));
        adjacency[l.index(u.b)].push_back(l.index(u.a));
    }
    std::vector<bool> seen(l.node_count(), false);
    std::deque<std::size_t> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
        const auto n = queue.front();
        queue.pop_front();
        for (auto m : adjacency[n]) {
            if (!seen[m]) {
                seen[m] = true;
                queue.push_back(m);
            }
        }
    }
    return seen;
}

}  // namespace

ConductanceSystem assemble_conductance(const Lattice& l) {
    std::vector<int> row_of(l.node_count(), -1);
    ConductanceSystem sys;
    for (const auto& u : l.units()) {
        if (u.conductance() <= 0.0) continue;
        for (auto n : {l.index(u.a), l.index(u.b)}) {
            if (row_of[n] < 0) row_of[n] = 0;
        }
    }
    for (std::size_t n = 0; n < row_of.size(); ++n) {
        if (row_of[n] == 0) {
            row_of[n] = static_cast<int>(sys.nodes.size());
            sys.nodes.push_back(n);
        }
    }
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& u : l.units()) {
        const double g = u.conductance();
        if (g <= 0.0) continue;
        const int a = row_of[l.index(u.a)];
        const int b = row_of[l.index(u.b)];
        triplets.emplace_back(a, a, g);
        triplets.emplace_back(b, b, g);
        triplets.emplace_back(a, b, -g);
        triplets.emplace_back(b, a, -g);
        ++sys.unit_contributions;
    }
    const auto n = static_cast<Eigen::Index>(sys.nodes.size());
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

NodalSolver::NodalSolver(const Lattice& l)
    : source_(l.index(l.source())), sink_(l.index(l.sink())) {
    in_component_ = conducting_component(l, source_);
    if (!in_component_[sink_]) {
        throw NoCircuitError("no conducting path between source " + to_string(l.source()) + " and sink " +
                             to_string(l.sink()));
    }
    removed_.resize(l.node_count());
    std::vector<int> reduced(l.node_count(), -1);
    for (std::size_t n = 0; n < l.node_count(); ++n) {
        removed_[n] = l.is_removed(l.node_at(n));
        if (in_component_[n] && n != source_ && n != sink_) {
            reduced[n] = static_cast<int>(free_nodes_.size());
            free_nodes_.push_back(n);
        }
    }

    const auto dim = static_cast<Eigen::Index>(free_nodes_.size());
    std::vector<Eigen::Triplet<double>> pattern;
    stamps_.resize(l.unit_count());
    for (std::size_t s = 0; s < l.unit_count(); ++s) {
        const auto& u = l.units()[s];
        auto& st = stamps_[s];
        const auto a = l.index(u.a);
        const auto b = l.index(u.b);
        st.active = u.conductance() > 0.0 && in_component_[a];
        if (!st.active) continue;
        st.free_a = reduced[a];
        st.free_b = reduced[b];
        st.fixed_a = a == source_ ? 0 : (a == sink_ ? 1 : -1);
        st.fixed_b = b == source_ ? 0 : (b == sink_ ? 1 : -1);
        if (st.free_a >= 0) pattern.emplace_back(st.free_a, st.free_a, 1.0);
        if (st.free_b >= 0) pattern.emplace_back(st.free_b, st.free_b, 1.0);
        if (st.free_a >= 0 && st.free_b >= 0) {
            pattern.emplace_back(st.free_a, st.free_b, -1.0);
            pattern.emplace_back(st.free_b, st.free_a, -1.0);
        }
    }
    matrix_.resize(dim, dim);
    matrix_.setFromTriplets(pattern.begin(), pattern.end());
    matrix_.makeCompressed();
    for (auto& st : stamps_) {
        if (!st.active) continue;
        if (st.free_a >= 0) st.diag_a = &matrix_.coeffRef(st.free_a, st.free_a);
        if (st.free_b >= 0) st.diag_b = &matrix_.coeffRef(st.free_b, st.free_b);
        if (st.free_a >= 0 && st.free_b >= 0) {
            st.off_ab = &matrix_.coeffRef(st.free_a, st.free_b);
            st.off_ba = &matrix_.coeffRef(st.free_b, st.free_a);
        }
    }
    if (dim > 0) ldlt_.analyzePattern(matrix_);
    rhs_.resize(dim);
    solution_.resize(dim);
}

void NodalSolver::solve(std::span<const double> unit_conductance, double v_source, double v_sink,
                        std::span<double> potentials) {
    if (unit_conductance.size() != stamps_.size()) throw std::invalid_argument("solve: conductance size mismatch");
    if (potentials.size() != in_component_.size()) throw std::invalid_argument("solve: potentials size mismatch");

    const double fixed[2] = {v_source, v_sink};
    std::fill(matrix_.valuePtr(), matrix_.valuePtr() + matrix_.nonZeros(), 0.0);
    rhs_.setZero();
    for (std::size_t s = 0; s < stamps_.size(); ++s) {
        const auto& st = stamps_[s];
        if (!st.active) continue;
        const double g = unit_conductance[s];
        if (st.diag_a) *st.diag_a += g;
        if (st.diag_b) *st.diag_b += g;
        if (st.off_ab) {
            *st.off_ab -= g;
            *st.off_ba -= g;
        }
        if (st.free_a >= 0 && st.fixed_b >= 0) rhs_[st.free_a] += g * fixed[st.fixed_b];
        if (st.free_b >= 0 && st.fixed_a >= 0) rhs_[st.free_b] += g * fixed[st.fixed_a];
    }

    if (matrix_.rows() > 0) {
        ldlt_.factorize(matrix_);
        if (ldlt_.info() != Eigen::Success) {
            throw SolverError("nodal solve: factorization failed for " + std::to_string(matrix_.rows()) +
                              " unknowns (matrix not positive definite)");
        }
        solution_ = ldlt_.solve(rhs_);
        if (!solution_.allFinite()) throw SolverError("nodal solve: non-finite potentials");
        const double scale = rhs_.norm();
        const double err = (matrix_ * solution_ - rhs_).norm();
        residual_ = scale > 0.0 ? err / scale : err;
        if (residual_ > kSolverRelativeTolerance) {
            throw SolverError("nodal solve: relative residual " + std::to_string(residual_) + " exceeds tolerance");
        }
    } else {
        residual_ = 0.0;
    }

    for (std::size_t n = 0; n < potentials.size(); ++n) {
        potentials[n] = removed_[n] ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    }
    for (std::size_t k = 0; k < free_nodes_.size(); ++k) potentials[free_nodes_[k]] = solution_[static_cast<Eigen::Index>(k)];
    potentials[source_] = v_source;
    potentials[sink_] = v_sink;
}

SolveResult solve_potentials(const Lattice& l, double v_applied) { return solve_potentials(l, v_applied, 0.0); }

SolveResult solve_potentials(const Lattice& l, double v_source, double v_sink) {
    NodalSolver solver(l);
    std::vector<double> g(l.unit_count());
    for (std::size_t s = 0; s < g.size(); ++s) g[s] = l.units()[s].conductance();
    SolveResult out;
    out.potentials.resize(l.node_count());
    solver.solve(g, v_source, v_sink, out.potentials);
    out.residual = solver.last_residual();
    out.device_currents.resize(l.unit_count());
    const auto source = l.index(l.source());
    for (std::size_t s = 0; s < l.unit_count(); ++s) {
        const auto& u = l.units()[s];
        const double dv = out.potentials[l.index(u.a)] - out.potentials[l.index(u.b)];
        out.device_currents[s] = {u.switch_closed[0] ? dv / u.forward.x : 0.0,
                                  u.switch_closed[1] ? dv / u.reverse.x : 0.0};
        if (l.index(u.a) == source) out.total_current += out.unit_current(s);
        if (l.index(u.b) == source) out.total_current -= out.unit_current(s);
    }
    return out;
}

std::vector<double> cross_section_currents(const SolveResult& sr, const Lattice& l, int col_boundary) {
    if (col_boundary < 0 || col_boundary >= l.cols() - 1) {
        throw std::out_of_range("cross section: boundary " + std::to_string(col_boundary) + " outside [0, " +
                                std::to_string(l.cols() - 2) + "]");
    }
    std::vector<double> out(static_cast<std::size_t>(l.rows()), 0.0);
    for (int r = 0; r < l.rows(); ++r) {
        const auto slot = l.slot_of(l.unit_id_between({r, col_boundary}, {r, col_boundary + 1}));
        if (slot >= 0) out[static_cast<std::size_t>(r)] = sr.unit_current(static_cast<std::size_t>(slot));
    }
    return out;
}

}  // namespace memnet
