#include "memnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <set>
#include <stdexcept>

namespace memnet {

EntropySeries entropy_series(const RunResult& run, const DeviceParams& p, double amplitude, int cut) {
    EntropySeries out;
    out.ratio = p.memory_content();
    out.amplitude = amplitude;
    out.cut = cut;
    out.steady = run.steady;
    for (const auto& rec : run.trace) {
        if (rec.entropy) out.samples.push_back({rec.t, rec.t_normalized, *rec.entropy});
    }
    return out;
}

PathReport extract_path(const Lattice& l, std::span<const UnitReading> readings) {
    PathReport report;
    std::vector<std::vector<std::pair<std::size_t, UnitId>>> adjacency(l.node_count());
    for (const auto& r : readings) {
        if (r.cls != UnitClass::On) continue;
        const auto* u = l.find_unit(r.id);
        if (u == nullptr) continue;
        report.on_units.push_back(r.id);
        adjacency[l.index(u->a)].emplace_back(l.index(u->b), r.id);
        adjacency[l.index(u->b)].emplace_back(l.index(u->a), r.id);
    }
    std::sort(report.on_units.begin(), report.on_units.end());
    for (auto& adj : adjacency) std::sort(adj.begin(), adj.end(), [](auto& x, auto& y) { return x.second < y.second; });

    const auto source = l.index(l.source());
    const auto sink = l.index(l.sink());
    constexpr auto kUnseen = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(l.node_count(), kUnseen);
    std::vector<UnitId> via(l.node_count(), 0);
    std::deque<std::size_t> queue{source};
    parent[source] = source;
    while (!queue.empty() && parent[sink] == kUnseen) {
        const auto n = queue.front();
        queue.pop_front();
        for (const auto& [m, id] : adjacency[n]) {
            if (parent[m] != kUnseen) continue;
            parent[m] = n;
            via[m] = id;
            queue.push_back(m);
        }
    }
    if (parent[sink] == kUnseen) {
        report.extra_on_count = report.on_units.size();
        return report;
    }
    std::vector<Node> path;
    std::set<UnitId> path_units;
    for (auto n = sink; n != source; n = parent[n]) {
        path.push_back(l.node_at(n));
        path_units.insert(via[n]);
    }
    path.push_back(l.node_at(source));
    std::reverse(path.begin(), path.end());
    report.path_length = path.size() - 1;
    report.extra_on_count = report.on_units.size() - path_units.size();
    report.path = std::move(path);
    return report;
}

bool path_is_valid(const Lattice& l, std::span<const UnitReading> readings, std::span<const Node> path) {
    if (path.size() < 2 || path.front() != l.source() || path.back() != l.sink()) return false;
    std::set<Node> seen(path.begin(), path.end());
    if (seen.size() != path.size()) return false;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const auto &a = path[k], &b = path[k + 1];
        if (std::abs(a.row - b.row) + std::abs(a.col - b.col) != 1) return false;
        const auto id = l.unit_id_between(a, b);
        if (l.find_unit(id) == nullptr) return false;
        const auto it = std::find_if(readings.begin(), readings.end(), [&](const UnitReading& r) { return r.id == id; });
        if (it == readings.end() || it->cls != UnitClass::On) return false;
    }
    return true;
}

double SwitchingRateSeries::peak_time(std::size_t w) const {
    const auto& r = rates.at(w);
    if (r.empty()) return 0.0;
    const auto it = std::max_element(r.begin(), r.end());
    return t[static_cast<std::size_t>(it - r.begin())];
}

SwitchingRateSeries switching_rate_series(std::span<const TraceRecord> trace, const Lattice& l,
                                          std::span<const UnitId> watch) {
    std::vector<const TraceRecord*> samples;
    for (const auto& rec : trace) {
        if (rec.unit_resistances.size() == l.unit_count()) samples.push_back(&rec);
    }
    if (samples.size() < 2) throw std::invalid_argument("switching rate: need at least two resistance snapshots");
    std::vector<std::size_t> slots;
    for (auto id : watch) {
        const auto s = l.slot_of(id);
        if (s < 0) throw std::invalid_argument("switching rate: unit " + std::to_string(id) + " not in lattice");
        slots.push_back(static_cast<std::size_t>(s));
    }
    SwitchingRateSeries out;
    out.units.assign(watch.begin(), watch.end());
    out.rates.resize(slots.size());
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const auto& a = *samples[k];
        const auto& b = *samples[k + 1];
        const double span = b.t - a.t;
        if (span <= 0.0) continue;
        out.t.push_back(0.5 * (a.t + b.t));
        out.t_normalized.push_back(0.5 * (a.t_normalized + b.t_normalized));
        for (std::size_t w = 0; w < slots.size(); ++w) {
            out.rates[w].push_back(std::fabs(b.unit_resistances[slots[w]] - a.unit_resistances[slots[w]]) / span);
        }
    }
    return out;
}

std::vector<UnitId> source_row_units(const Lattice& l) {
    std::vector<UnitId> out;
    const int row = l.source().row;
    const int c0 = std::min(l.source().col, l.sink().col);
    const int c1 = std::max(l.source().col, l.sink().col);
    for (int c = c0; c < c1; ++c) out.push_back(l.unit_id_between({row, c}, {row, c + 1}));
    return out;
}

std::vector<SweepEntry> sweep_memory_content(const Lattice& base, const PulseSpec& pulse, std::optional<int> cut,
                                             std::span<const MemoryContentPoint> points) {
    auto run_one = [&](MemoryContentPoint point) {
        SweepEntry entry{point, std::nullopt, {}};
        try {
            Lattice l = base;
            DeviceParams p = base.params();
            p.r_on = point.r_on;
            l.set_params(p);
            l = l.initialize_network(InitTarget::Off);
            PulseSpec ps = pulse;
            ps.amplitude = point.amplitude;
            RunOptions opts;
            opts.entropy_cut = cut;
            opts.record_resistances = false;
            const auto run = run_pulse(l, ps, opts);
            entry.series = entropy_series(run, p, point.amplitude, cut.value_or(default_entropy_cut(l)));
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        return entry;
    };
    std::vector<std::future<SweepEntry>> futures;
    futures.reserve(points.size());
    for (const auto& point : points) futures.push_back(std::async(std::launch::async, run_one, point));
    std::vector<SweepEntry> out;
    out.reserve(points.size());
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

}  // namespace memnet
