#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qrdv/channel_model.hpp"
#include "qrdv/metrics.hpp"
#include "qrdv/quorum.hpp"
#include "qrdv/rng.hpp"

namespace qrdv {

// What happens when two or more transmitter->receiver pairs meet on the same
// idle channel in the same slot. AllFail drops every contender; RandomWinner
// lets one uniformly chosen pair complete.
enum class ContentionPolicy { AllFail, RandomWinner };

// Persistent: the receiver drawn at attempt start is kept until the attempt
// succeeds. PerSlot: the transmitter redraws its receiver every slot.
enum class PairingPolicy { Persistent, PerSlot };

// Piecewise-constant attempt rate; from_slot is 1-based and inclusive.
struct RatePhase {
    std::uint64_t from_slot = 1;
    double rate = 1.0;
};

struct FixedSelection {
    std::vector<int> rows;
    std::vector<int> cols;
};

struct SimConfig {
    int num_channels = 16;
    int num_users = 50;
    SelectionScheme scheme;
    double target_pi = 0.5;
    // When set, overrides target_pi/sojourn_scale with explicit mean idle and
    // busy durations (alpha, beta) shared by all channels.
    std::optional<std::pair<double, double>> alpha_beta;
    // Per-channel (alpha, beta) overrides; size must equal num_channels when
    // non-empty. Takes precedence over alpha_beta and target_pi.
    std::vector<std::pair<double, double>> per_channel_alpha_beta;
    double sojourn_scale = 10.0;
    std::uint64_t total_slots = 100000;
    std::uint64_t seed = 1;
    ContentionPolicy contention = ContentionPolicy::RandomWinner;
    PairingPolicy pairing = PairingPolicy::Persistent;
    OccupancyMode occupancy = OccupancyMode::Markov;
    double attempt_rate = 1.0;
    // Optional attempt-rate schedule (drives the adaptive controller through
    // load regions); empty means the constant attempt_rate applies.
    std::vector<RatePhase> rate_schedule;
    // 0 = every user transmits; k > 0 restricts attempt formation to users
    // 0..k-1, the rest participate as receivers only.
    int num_transmitters = 0;
    // Test hook: pins each user's selection (size must equal num_users) and
    // disables per-cycle reselection.
    std::vector<FixedSelection> fixed_selections;
    bool collect_controller_log = false;
    bool collect_slot_events = false;
    // Cross-checks every pair's met slots against quorum::intersection() at
    // each cycle boundary; meant for tests, costs O(users^2) per cycle.
    bool check_cycle_invariants = false;
};

enum class PairEventKind { NotMet, Blocked, ContentionLoss, Rdv };

struct PairEvent {
    int tx = 0;
    int rx = 0;
    PairEventKind kind = PairEventKind::NotMet;
};

struct SlotOutcome {
    std::uint64_t slot = 0;
    int successful_rdv_count = 0;
    int blocking_count = 0;
    int contention_loss_count = 0;
    int not_met_count = 0;
    // Filled only when SimConfig::collect_slot_events is set.
    std::vector<PairEvent> events;
};

struct Attempt {
    int receiver = 0;
    std::uint64_t start_slot = 0;
};

struct CrUser {
    int id = 0;
    QuorumSelection selection;
    std::optional<Attempt> pending;
    std::uint64_t awake_slot_count = 0;
    int sel_rows = 1;
    int sel_cols = 1;
};

struct ControllerEvent {
    std::uint64_t slot = 0;
    double smoothed_load = 0.0;
    TrafficRegion region = TrafficRegion::Moderate;
    int rows = 1;
    int cols = 1;
};

struct RunResult {
    MetricsReport report;
    MetricsAccumulator accumulator;
    std::vector<ControllerEvent> controller_log;
};

// One simulation run: the shared grid, the user population with their quorum
// schedules, the per-channel occupancy chains, and the slot loop. Strictly
// sequential; independent runs may execute in parallel.
class Simulation {
public:
    explicit Simulation(const SimConfig& config);

    // Slot phases, in the order run() applies them. Exposed for tests;
    // callers must keep slot numbers consecutive starting at 1.
    void form_attempts(std::uint64_t slot);
    SlotOutcome resolve_slot(std::uint64_t slot);
    void step_channels();
    void reselect_on_cycle(std::uint64_t slot);

    // Region from the last completed smoothing window (one cycle of load
    // samples); Moderate before the first window completes.
    TrafficRegion classify_region() const;

    // Advances one slot through all four phases.
    SlotOutcome step_slot();

    // Runs the remaining slots and finalizes the report. Bit-identical
    // across repeated constructions with the same config.
    RunResult run();

    const GridQuorum& grid() const { return grid_; }
    const std::vector<CrUser>& users() const { return users_; }
    const std::vector<PuChannel>& channels() const { return channels_; }
    const MetricsAccumulator& accumulator() const { return acc_; }
    std::uint64_t pending_attempts() const { return pending_count_; }
    double current_attempt_rate(std::uint64_t slot) const;
    std::pair<int, int> current_rc() const { return {rc_rows_, rc_cols_}; }

    int cycle_position(std::uint64_t slot) const {
        return static_cast<int>((slot - 1) % static_cast<std::uint64_t>(grid_.cycle_length())) + 1;
    }

private:
    void apply_selection(CrUser& user, QuorumSelection sel);
    int draw_receiver(int self, RngStream& rng);
    void verify_cycle_invariants() const;

    SimConfig config_;
    GridQuorum grid_;
    std::vector<CrUser> users_;
    std::vector<std::vector<char>> awake_masks_;  // per user, per cycle position
    std::vector<PuChannel> channels_;
    std::vector<RngStream> user_rngs_;
    std::vector<RngStream> channel_rngs_;
    RngStream engine_rng_;
    MetricsAccumulator acc_;
    std::vector<ControllerEvent> controller_log_;
    std::uint64_t current_slot_ = 0;
    std::uint64_t pending_count_ = 0;
    int rc_rows_ = 1;
    int rc_cols_ = 1;
    double load_sum_ = 0.0;
    std::uint64_t load_samples_ = 0;
    double smoothed_load_ = 0.0;
    bool have_window_ = false;
    std::vector<int> met_scratch_;
    std::vector<char> awake_now_;
};

// Builds the run and executes it; the usual entry point.
RunResult run(const SimConfig& config);

}  // namespace qrdv
