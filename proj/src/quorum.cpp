#include "qrdv/quorum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qrdv {

const char* scheme_name(SchemeVariant v) {
    switch (v) {
        case SchemeVariant::OneByOne: return "1x1";
        case SchemeVariant::TwoByOne: return "2x1";
        case SchemeVariant::TwoByTwo: return "2x2";
        case SchemeVariant::Adaptive: return "adaptive";
    }
    return "?";
}

GridQuorum build_grid(int num_channels) {
    if (num_channels < 1)
        throw std::invalid_argument("build_grid: num_channels must be >= 1");
    int n = 1;
    while (n * n < num_channels) ++n;
    return GridQuorum{n, num_channels};
}

namespace {

void check_indices(const std::vector<int>& idx, int n, const char* what) {
    if (idx.empty())
        throw std::invalid_argument(std::string("selection: ") + what + " set is empty");
    for (int i : idx) {
        if (i < 1 || i > n)
            throw std::invalid_argument(std::string("selection: ") + what +
                                        " index " + std::to_string(i) + " outside 1.." +
                                        std::to_string(n));
    }
}

std::vector<int> union_slots(int n, const std::vector<int>& rows,
                             const std::vector<int>& cols) {
    std::vector<char> in(static_cast<size_t>(n) * n + 1, 0);
    for (int r : rows)
        for (int c = 1; c <= n; ++c) in[static_cast<size_t>((r - 1) * n + c)] = 1;
    for (int c : cols)
        for (int r = 1; r <= n; ++r) in[static_cast<size_t>((r - 1) * n + c)] = 1;
    std::vector<int> slots;
    for (int s = 1; s <= n * n; ++s)
        if (in[static_cast<size_t>(s)]) slots.push_back(s);
    return slots;
}

// Partial Fisher-Yates over 1..n; first k entries are the draw.
std::vector<int> draw_distinct(int n, int k, RngStream& rng) {
    std::vector<int> pool(static_cast<size_t>(n));
    std::iota(pool.begin(), pool.end(), 1);
    for (int i = 0; i < k; ++i) {
        auto j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    }
    pool.resize(static_cast<size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

QuorumSelection make_selection(const GridQuorum& grid, std::vector<int> rows,
                               std::vector<int> cols) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    check_indices(rows, grid.n, "row");
    check_indices(cols, grid.n, "column");
    QuorumSelection sel;
    sel.slots = union_slots(grid.n, rows, cols);
    sel.rows = std::move(rows);
    sel.cols = std::move(cols);
    return sel;
}

QuorumSelection select(const GridQuorum& grid, int r, int c, RngStream& rng) {
    if (r < 1 || r > grid.n)
        throw std::invalid_argument("select: row count " + std::to_string(r) +
                                    " outside 1.." + std::to_string(grid.n));
    if (c < 1 || c > grid.n)
        throw std::invalid_argument("select: column count " + std::to_string(c) +
                                    " outside 1.." + std::to_string(grid.n));
    QuorumSelection sel;
    sel.rows = draw_distinct(grid.n, r, rng);
    sel.cols = draw_distinct(grid.n, c, rng);
    sel.slots = union_slots(grid.n, sel.rows, sel.cols);
    return sel;
}

std::vector<int> intersection(const QuorumSelection& a, const QuorumSelection& b) {
    std::vector<int> out;
    std::set_intersection(a.slots.begin(), a.slots.end(), b.slots.begin(),
                          b.slots.end(), std::back_inserter(out));
    return out;
}

HopSequence hop_sequence(const GridQuorum& grid, const QuorumSelection& sel) {
    HopSequence seq(static_cast<size_t>(grid.cycle_length()), kNoChannel);
    for (int s : sel.slots) seq[static_cast<size_t>(s - 1)] = grid.channel_at(s);
    return seq;
}

std::pair<int, int> scheme_to_rc(SchemeVariant variant, TrafficRegion region) {
    switch (variant) {
        case SchemeVariant::OneByOne: return {1, 1};
        case SchemeVariant::TwoByOne: return {2, 1};
        case SchemeVariant::TwoByTwo: return {2, 2};
        case SchemeVariant::Adaptive:
            switch (region) {
                case TrafficRegion::Low: return {2, 2};
                case TrafficRegion::Moderate: return {2, 1};
                case TrafficRegion::High: return {1, 1};
            }
    }
    return {1, 1};
}

}  // namespace qrdv
