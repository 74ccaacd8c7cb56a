#include "memnet/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace memnet {

std::string to_string(const Node& n) { return "(" + std::to_string(n.row) + "," + std::to_string(n.col) + ")"; }

double BasicUnit::conductance() const {
    double g = 0.0;
    if (switch_closed[0]) g += 1.0 / forward.x;
    if (switch_closed[1]) g += 1.0 / reverse.x;
    return g;
}

double unit_resistance(const BasicUnit& u) {
    const double g = u.conductance();
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / g;
}

Lattice Lattice::build_grid(int rows, int cols, const DeviceParams& p, double x0) {
    if (rows < 2 || cols < 2) {
        throw std::invalid_argument("grid: rows and cols must be at least 2 (got " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + ")");
    }
    p.validate();
    if (!(x0 >= p.r_on && x0 <= p.r_off)) {
        throw std::invalid_argument("grid: initial memristance " + std::to_string(x0) + " outside [r_on, r_off]");
    }
    Lattice l;
    l.rows_ = rows;
    l.cols_ = cols;
    l.params_ = p;
    l.removed_.assign(l.node_count(), false);
    l.units_.reserve(l.unit_id_count());
    auto add = [&](Node a, Node b) {
        BasicUnit u;
        u.id = l.unit_id_between(a, b);
        u.a = a;
        u.b = b;
        u.forward = DeviceState{x0, Orientation::Forward};
        u.reverse = DeviceState{x0, Orientation::Reverse};
        l.units_.push_back(u);
    };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) add({r, c}, {r, c + 1});
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < cols; ++c) add({r, c}, {r + 1, c});
    l.rebuild_slots();
    const int mid = (rows - 1) / 2;
    l.source_ = {mid, 0};
    l.sink_ = {mid, cols - 1};
    return l;
}

std::size_t Lattice::unit_id_count() const {
    return static_cast<std::size_t>(rows_) * (cols_ - 1) + static_cast<std::size_t>(rows_ - 1) * cols_;
}

std::size_t Lattice::live_node_count() const {
    return static_cast<std::size_t>(std::count(removed_.begin(), removed_.end(), false));
}

Node Lattice::node_at(std::size_t index) const {
    return Node{static_cast<int>(index / cols_), static_cast<int>(index % cols_)};
}

bool Lattice::contains(const Node& n) const { return n.row >= 0 && n.row < rows_ && n.col >= 0 && n.col < cols_; }

bool Lattice::is_live(const Node& n) const { return contains(n) && !removed_[index(n)]; }

UnitId Lattice::unit_id_between(const Node& a, const Node& b) const {
    if (!contains(a) || !contains(b)) throw std::invalid_argument("unit: node outside grid");
    Node lo = std::min(a, b);
    Node hi = std::max(a, b);
    if (lo.row == hi.row && hi.col == lo.col + 1) {
        return static_cast<UnitId>(lo.row) * (cols_ - 1) + lo.col;
    }
    if (lo.col == hi.col && hi.row == lo.row + 1) {
        return static_cast<UnitId>(rows_) * (cols_ - 1) + static_cast<UnitId>(lo.row) * cols_ + lo.col;
    }
    throw std::invalid_argument("unit: nodes " + to_string(a) + " and " + to_string(b) + " are not adjacent");
}

std::ptrdiff_t Lattice::slot_of(UnitId id) const { return id < slot_.size() ? slot_[id] : -1; }

const BasicUnit* Lattice::find_unit(UnitId id) const {
    const auto s = slot_of(id);
    return s < 0 ? nullptr : &units_[static_cast<std::size_t>(s)];
}

BasicUnit* Lattice::find_unit(UnitId id) {
    const auto s = slot_of(id);
    return s < 0 ? nullptr : &units_[static_cast<std::size_t>(s)];
}

const BasicUnit* Lattice::find_unit(const Node& a, const Node& b) const { return find_unit(unit_id_between(a, b)); }

void Lattice::set_terminals(const Node& source, const Node& sink) {
    if (!is_live(source)) throw std::invalid_argument("source " + to_string(source) + " is not a live node");
    if (!is_live(sink)) throw std::invalid_argument("sink " + to_string(sink) + " is not a live node");
    if (source == sink) throw std::invalid_argument("source and sink must differ");
    source_ = source;
    sink_ = sink;
}

void Lattice::set_params(const DeviceParams& p) {
    p.validate();
    params_ = p;
    for (auto& u : units_) {
        u.forward.x = std::clamp(u.forward.x, p.r_on, p.r_off);
        u.reverse.x = std::clamp(u.reverse.x, p.r_on, p.r_off);
    }
}

Lattice Lattice::remove_nodes(std::span<const Node> nodes) const {
    Lattice out = *this;
    for (const auto& n : nodes) {
        if (!contains(n)) throw std::invalid_argument("damage: node " + to_string(n) + " outside grid");
        if (n == source_ || n == sink_) {
            throw std::invalid_argument("damage: cannot remove terminal node " + to_string(n));
        }
        out.removed_[index(n)] = true;
    }
    std::erase_if(out.units_, [&](const BasicUnit& u) { return out.removed_[index(u.a)] || out.removed_[index(u.b)]; });
    out.rebuild_slots();
    return out;
}

Lattice Lattice::remove_units(std::span<const UnitId> ids) const {
    Lattice out = *this;
    std::erase_if(out.units_, [&](const BasicUnit& u) { return std::find(ids.begin(), ids.end(), u.id) != ids.end(); });
    out.rebuild_slots();
    return out;
}

Lattice Lattice::initialize_network(InitTarget target) const {
    Lattice out = *this;
    const double x = target == InitTarget::Off ? params_.r_off : params_.r_on;
    for (auto& u : out.units_) {
        u.forward.x = x;
        u.reverse.x = x;
    }
    return out;
}

bool Lattice::check_invariants() const {
    if (!is_live(source_) || !is_live(sink_) || source_ == sink_) return false;
    UnitId prev = 0;
    for (std::size_t k = 0; k < units_.size(); ++k) {
        const auto& u = units_[k];
        if (!is_live(u.a) || !is_live(u.b) || u.a == u.b) return false;
        if (unit_id_between(u.a, u.b) != u.id) return false;
        if (k > 0 && u.id <= prev) return false;
        if (u.forward.orientation != Orientation::Forward || u.reverse.orientation != Orientation::Reverse) return false;
        prev = u.id;
    }
    return true;
}

void Lattice::rebuild_slots() {
    slot_.assign(unit_id_count(), -1);
    for (std::size_t k = 0; k < units_.size(); ++k) slot_[units_[k].id] = static_cast<std::ptrdiff_t>(k);
}

}  // namespace memnet
