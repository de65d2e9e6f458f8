#pragma once

#include <utility>
#include <vector>

#include "qrdv/rng.hpp"

namespace qrdv {

// Channel id 0 marks a padding slot with no licensed channel behind it.
inline constexpr int kNoChannel = 0;

// Shared n x n grid over one cycle of n^2 slots. Slot s in {1..n^2} maps to
// channel s for s <= num_channels and to kNoChannel beyond (padding). The
// grid is identical for every user in a simulation.
struct GridQuorum {
    int n = 0;
    int num_channels = 0;

    int cycle_length() const { return n * n; }

    // slot in {1..n^2} -> channel id, or kNoChannel for padding slots.
    int channel_at(int slot) const {
        return slot <= num_channels ? slot : kNoChannel;
    }
};

// A user's pick: full rows and full columns of the grid, plus the induced
// union of slot indices in row-major order. rows/cols/slots are sorted.
struct QuorumSelection {
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<int> slots;
};

enum class SchemeVariant { OneByOne, TwoByOne, TwoByTwo, Adaptive };

// Selection scheme; thresholds apply to the Adaptive variant only and are
// compared against the smoothed offered load (pending attempts / channels).
struct SelectionScheme {
    SchemeVariant variant = SchemeVariant::OneByOne;
    double low_threshold = 0.5;
    double high_threshold = 1.5;
};

enum class TrafficRegion { Low, Moderate, High };

const char* scheme_name(SchemeVariant v);

// n = ceil(sqrt(num_channels)); throws std::invalid_argument on zero.
GridQuorum build_grid(int num_channels);

// Explicit selection from given row/column sets (validated, deduplicated).
QuorumSelection make_selection(const GridQuorum& grid, std::vector<int> rows,
                               std::vector<int> cols);

// Draw r distinct rows and c distinct columns uniformly without replacement.
QuorumSelection select(const GridQuorum& grid, int r, int c, RngStream& rng);

// a.slots intersect b.slots; both selections must come from the same grid.
std::vector<int> intersection(const QuorumSelection& a, const QuorumSelection& b);

// Per-slot schedule for one cycle. Entry k (0-based) covers slot k+1 and
// holds the channel to wake on, or kNoChannel to sleep. Padding slots inside
// the selection become sleep slots.
using HopSequence = std::vector<int>;
HopSequence hop_sequence(const GridQuorum& grid, const QuorumSelection& sel);

// Region-to-(rows, cols) mapping. Fixed variants ignore the region; the
// adaptive variant picks 2x2 / 2x1 / 1x1 for low / moderate / high load.
std::pair<int, int> scheme_to_rc(SchemeVariant variant, TrafficRegion region);

}  // namespace qrdv
