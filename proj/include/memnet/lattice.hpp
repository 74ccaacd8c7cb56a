#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "memnet/device.hpp"

namespace memnet {

// Grid node, row-major, 0-indexed.
struct Node {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const Node&, const Node&) = default;
};

[[nodiscard]] std::string to_string(const Node& n);

// Stable unit identifier: index into the intact grid's unit enumeration.
// Horizontal units come first (row-major), then vertical units (row-major).
// Ids survive node removal, so units can be compared across damage.
using UnitId = std::size_t;

enum class UnitAxis { Horizontal, Vertical };

// Two antiparallel devices between adjacent nodes a and b, each behind an
// ideal access switch. The forward device is oriented a->b.
struct BasicUnit {
    UnitId id = 0;
    Node a;
    Node b;
    DeviceState forward{200.0, Orientation::Forward};
    DeviceState reverse{200.0, Orientation::Reverse};
    std::array<bool, 2> switch_closed{true, true};  // {forward, reverse}

    [[nodiscard]] UnitAxis axis() const { return a.row == b.row ? UnitAxis::Horizontal : UnitAxis::Vertical; }
    // Sum of closed-device conductances (siemens); 0 when both switches are open.
    [[nodiscard]] double conductance() const;

    friend bool operator==(const BasicUnit&, const BasicUnit&) = default;
};

// Parallel combination of the closed devices; +infinity when both are open.
[[nodiscard]] double unit_resistance(const BasicUnit& u);

enum class InitTarget { Off, On };

class Lattice {
public:
    // Empty placeholder; use build_grid for a usable lattice.
    Lattice() = default;

    // rows, cols >= 2; every device starts at x0 with both switches closed.
    // Terminals default to the middle row on opposite edges.
    static Lattice build_grid(int rows, int cols, const DeviceParams& p, double x0);

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] const DeviceParams& params() const { return params_; }
    [[nodiscard]] Node source() const { return source_; }
    [[nodiscard]] Node sink() const { return sink_; }

    [[nodiscard]] std::size_t node_count() const { return static_cast<std::size_t>(rows_) * cols_; }
    [[nodiscard]] std::size_t live_node_count() const;
    [[nodiscard]] std::size_t index(const Node& n) const { return static_cast<std::size_t>(n.row) * cols_ + n.col; }
    [[nodiscard]] Node node_at(std::size_t index) const;
    [[nodiscard]] bool contains(const Node& n) const;
    [[nodiscard]] bool is_live(const Node& n) const;
    [[nodiscard]] bool is_removed(const Node& n) const { return !is_live(n); }

    // Units present in the lattice, ordered by id.
    [[nodiscard]] std::span<const BasicUnit> units() const { return units_; }
    [[nodiscard]] std::span<BasicUnit> units() { return units_; }
    [[nodiscard]] std::size_t unit_count() const { return units_.size(); }
    // Number of ids in the intact-grid enumeration.
    [[nodiscard]] std::size_t unit_id_count() const;

    // Unit id of the link between two adjacent nodes (present or not).
    [[nodiscard]] UnitId unit_id_between(const Node& a, const Node& b) const;
    // Position in units() or -1 when the unit is absent.
    [[nodiscard]] std::ptrdiff_t slot_of(UnitId id) const;
    [[nodiscard]] const BasicUnit* find_unit(UnitId id) const;
    [[nodiscard]] BasicUnit* find_unit(UnitId id);
    [[nodiscard]] const BasicUnit* find_unit(const Node& a, const Node& b) const;

    // Distinct live nodes; throws std::invalid_argument otherwise.
    void set_terminals(const Node& source, const Node& sink);

    // Replaces device constants; existing states are clamped into the new bounds.
    void set_params(const DeviceParams& p);

    // Deletes the given nodes and every incident unit. Throws if a node is a
    // terminal or outside the grid. Already-removed nodes are ignored.
    [[nodiscard]] Lattice remove_nodes(std::span<const Node> nodes) const;
    // Deletes single units by id (no node is removed).
    [[nodiscard]] Lattice remove_units(std::span<const UnitId> ids) const;

    // Instantaneous write of every device to r_off (Off) or r_on (On).
    [[nodiscard]] Lattice initialize_network(InitTarget target) const;

    // True when every unit endpoint is live and terminals are distinct live nodes.
    [[nodiscard]] bool check_invariants() const;

    friend bool operator==(const Lattice&, const Lattice&) = default;

private:
    void rebuild_slots();

    int rows_ = 0;
    int cols_ = 0;
    DeviceParams params_;
    std::vector<BasicUnit> units_;
    std::vector<std::ptrdiff_t> slot_;  // id -> position in units_ or -1
    std::vector<bool> removed_;         // per node index
    Node source_;
    Node sink_;
};

[[nodiscard]] inline Lattice build_grid(int rows, int cols, const DeviceParams& p, double x0) {
    return Lattice::build_grid(rows, cols, p, x0);
}

[[nodiscard]] inline Lattice remove_nodes(const Lattice& l, std::span<const Node> nodes) { return l.remove_nodes(nodes); }

[[nodiscard]] inline Lattice initialize_network(const Lattice& l, InitTarget target) {
    return l.initialize_network(target);
}

}  // namespace memnet
