#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "memnet/lattice.hpp"

namespace memnet {

// Source and sink are not joined by any conducting path.
class NoCircuitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Factorization failed, produced non-finite values, or missed the residual target.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kSolverRelativeTolerance = 1e-10;

struct SolveResult {
    // Indexed by Lattice::index(node). Removed nodes hold NaN; live nodes
    // outside the source/sink component hold 0.
    std::vector<double> potentials;
    // Indexed by unit slot (position in Lattice::units()); currents flow a->b
    // in the unit frame, {forward device, reverse device}.
    std::vector<std::array<double, 2>> device_currents;
    double total_current = 0.0;  // leaving the source into the network
    double residual = 0.0;       // ||A y - b|| / ||b|| of the reduced system

    [[nodiscard]] double unit_current(std::size_t slot) const {
        return device_currents[slot][0] + device_currents[slot][1];
    }
};

// Weighted Laplacian over live nodes with at least one conducting unit.
struct ConductanceSystem {
    std::vector<std::size_t> nodes;  // row k <-> lattice node index nodes[k]
    Eigen::SparseMatrix<double> matrix;
    std::size_t unit_contributions = 0;
};

[[nodiscard]] ConductanceSystem assemble_conductance(const Lattice& l);

// Reusable Dirichlet-reduced nodal solver for one lattice topology. The
// sparsity pattern and fill-reducing ordering are computed once; each solve
// only refactorizes numerically. Not thread-safe; use one per run.
class NodalSolver {
public:
    // Throws NoCircuitError when the terminals are disconnected.
    explicit NodalSolver(const Lattice& l);

    // unit_conductance is indexed by unit slot; potentials by node index.
    // Nodes outside the terminal component are written as 0 (NaN if removed).
    void solve(std::span<const double> unit_conductance, double v_source, double v_sink,
               std::span<double> potentials);

    [[nodiscard]] double last_residual() const { return residual_; }
    [[nodiscard]] std::size_t unknowns() const { return static_cast<std::size_t>(matrix_.rows()); }

private:
    struct UnitStamp {
        int free_a = -1;  // reduced index or -1
        int free_b = -1;
        int fixed_a = -1;  // 0 = source, 1 = sink, -1 = free or outside
        int fixed_b = -1;
        double* diag_a = nullptr;
        double* diag_b = nullptr;
        double* off_ab = nullptr;
        double* off_ba = nullptr;
        bool active = false;
    };

    std::vector<std::size_t> free_nodes_;  // reduced index -> node index
    std::vector<bool> in_component_;
    std::vector<bool> removed_;
    std::size_t source_ = 0;
    std::size_t sink_ = 0;
    std::vector<UnitStamp> stamps_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt_;
    Eigen::VectorXd rhs_;
    Eigen::VectorXd solution_;
    double residual_ = 0.0;
};

// Sink grounded at 0 V, source pinned at v_applied.
[[nodiscard]] SolveResult solve_potentials(const Lattice& l, double v_applied);
// Explicit terminal potentials.
[[nodiscard]] SolveResult solve_potentials(const Lattice& l, double v_source, double v_sink);

// Signed a->b current through the horizontal unit between columns
// col_boundary and col_boundary + 1, one entry per row (0 where absent).
[[nodiscard]] std::vector<double> cross_section_currents(const SolveResult& sr, const Lattice& l, int col_boundary);

}  // namespace memnet
