#include "qrdv/engine.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <tuple>

namespace qrdv {

namespace {

constexpr std::uint64_t kEngineStream = 0;
constexpr std::uint64_t kChannelStreamBase = 1ull << 20;
constexpr std::uint64_t kUserStreamBase = 1ull << 21;

void validate(const SimConfig& c) {
    if (c.num_users < 2)
        throw std::invalid_argument("engine: need at least two users to form a pair");
    if (!(c.attempt_rate >= 0.0 && c.attempt_rate <= 1.0))
        throw std::invalid_argument("engine: attempt_rate must lie in [0,1]");
    if (!(c.scheme.low_threshold > 0.0) ||
        !(c.scheme.low_threshold < c.scheme.high_threshold))
        throw std::invalid_argument(
            "engine: adaptive thresholds must satisfy 0 < low < high");
    if (c.num_transmitters < 0 || c.num_transmitters > c.num_users)
        throw std::invalid_argument("engine: num_transmitters outside 0..num_users");
    std::uint64_t prev = 0;
    for (const auto& ph : c.rate_schedule) {
        if (!(ph.rate >= 0.0 && ph.rate <= 1.0))
            throw std::invalid_argument("engine: scheduled rate outside [0,1]");
        if (ph.from_slot < 1 || ph.from_slot <= prev)
            throw std::invalid_argument("engine: rate schedule must be ascending");
        prev = ph.from_slot;
    }
    if (c.alpha_beta) {
        if (!(c.alpha_beta->first > 0.0) || !(c.alpha_beta->second > 0.0))
            throw std::invalid_argument("engine: alpha and beta must be positive");
    }
    if (!c.per_channel_alpha_beta.empty()) {
        if (c.per_channel_alpha_beta.size() != static_cast<size_t>(c.num_channels))
            throw std::invalid_argument(
                "engine: per_channel_alpha_beta must cover every channel");
        for (const auto& [a, b] : c.per_channel_alpha_beta)
            if (!(a > 0.0) || !(b > 0.0))
                throw std::invalid_argument("engine: alpha and beta must be positive");
    }
}

}  // namespace

Simulation::Simulation(const SimConfig& config)
    : config_(config),
      grid_(build_grid(config.num_channels)),
      engine_rng_(derive_stream(config.seed, kEngineStream)) {
    validate(config_);
    if (config_.total_slots < static_cast<std::uint64_t>(grid_.cycle_length()))
        throw std::invalid_argument("engine: total_slots must cover at least one cycle");

    const int n_ch = config_.num_channels;
    channel_rngs_.reserve(static_cast<size_t>(n_ch));
    channels_.reserve(static_cast<size_t>(n_ch));
    double p_i;
    if (config_.alpha_beta)
        p_i = stationary_idle(config_.alpha_beta->first, config_.alpha_beta->second);
    else
        p_i = config_.target_pi;
    for (int i = 1; i <= n_ch; ++i) {
        channel_rngs_.push_back(derive_stream(config_.seed, kChannelStreamBase + static_cast<std::uint64_t>(i)));
        auto& rng = channel_rngs_.back();
        std::optional<std::pair<double, double>> ab = config_.alpha_beta;
        if (!config_.per_channel_alpha_beta.empty())
            ab = config_.per_channel_alpha_beta[static_cast<size_t>(i - 1)];
        if (ab) {
            PuChannel ch;
            ch.alpha = ab->first;
            ch.beta = ab->second;
            ch.channel_id = i;
            ch.idle = rng.bernoulli(stationary_idle(ab->first, ab->second));
            channels_.push_back(ch);
        } else {
            channels_.push_back(
                from_target_pi(config_.target_pi, config_.sojourn_scale, rng, i));
        }
    }

    acc_.key = CellKey{config_.scheme.variant, grid_.n, n_ch, config_.num_users, p_i};

    // Cold start classifies as Moderate; the adaptive variant therefore
    // begins on the 2x1 selection.
    std::tie(rc_rows_, rc_cols_) = scheme_to_rc(config_.scheme.variant, classify_region());

    if (!config_.fixed_selections.empty() &&
        config_.fixed_selections.size() != static_cast<size_t>(config_.num_users))
        throw std::invalid_argument("engine: fixed_selections must cover every user");

    users_.resize(static_cast<size_t>(config_.num_users));
    awake_masks_.resize(users_.size());
    awake_now_.assign(users_.size(), 0);
    user_rngs_.reserve(users_.size());
    for (int u = 0; u < config_.num_users; ++u) {
        user_rngs_.push_back(derive_stream(config_.seed, kUserStreamBase + static_cast<std::uint64_t>(u)));
        users_[static_cast<size_t>(u)].id = u;
    }
    for (int u = 0; u < config_.num_users; ++u) {
        auto& user = users_[static_cast<size_t>(u)];
        if (!config_.fixed_selections.empty()) {
            const auto& fs = config_.fixed_selections[static_cast<size_t>(u)];
            apply_selection(user, make_selection(grid_, fs.rows, fs.cols));
        } else {
            apply_selection(user, select(grid_, rc_rows_, rc_cols_, user_rngs_[static_cast<size_t>(u)]));
        }
    }
    if (config_.check_cycle_invariants) verify_cycle_invariants();
}

void Simulation::apply_selection(CrUser& user, QuorumSelection sel) {
    const auto seq = hop_sequence(grid_, sel);
    auto& mask = awake_masks_[static_cast<size_t>(user.id)];
    mask.assign(seq.size(), 0);
    for (size_t k = 0; k < seq.size(); ++k) mask[k] = seq[k] != kNoChannel ? 1 : 0;
    user.selection = std::move(sel);
    user.sel_rows = static_cast<int>(user.selection.rows.size());
    user.sel_cols = static_cast<int>(user.selection.cols.size());
}

int Simulation::draw_receiver(int self, RngStream& rng) {
    int idx = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(config_.num_users - 1)));
    return idx >= self ? idx + 1 : idx;
}

double Simulation::current_attempt_rate(std::uint64_t slot) const {
    double rate = config_.attempt_rate;
    for (const auto& ph : config_.rate_schedule) {
        if (slot >= ph.from_slot)
            rate = ph.rate;
        else
            break;
    }
    return rate;
}

void Simulation::form_attempts(std::uint64_t slot) {
    const double rate = current_attempt_rate(slot);
    const int n_tx = config_.num_transmitters > 0 ? config_.num_transmitters
                                                  : config_.num_users;
    for (int u = 0; u < n_tx; ++u) {
        auto& user = users_[static_cast<size_t>(u)];
        auto& rng = user_rngs_[static_cast<size_t>(u)];
        if (user.pending) {
            if (config_.pairing == PairingPolicy::PerSlot)
                user.pending->receiver = draw_receiver(u, rng);
            continue;
        }
        if (rng.bernoulli(rate)) {
            const int rx = draw_receiver(u, rng);
            user.pending = Attempt{rx, slot};
            ++pending_count_;
        }
    }
    load_sum_ += static_cast<double>(pending_count_) / static_cast<double>(config_.num_channels);
    ++load_samples_;
}

SlotOutcome Simulation::resolve_slot(std::uint64_t slot) {
    SlotOutcome out;
    out.slot = slot;
    const int pos0 = cycle_position(slot) - 1;

    for (auto& user : users_) {
        const bool awake = awake_masks_[static_cast<size_t>(user.id)][static_cast<size_t>(pos0)] != 0;
        awake_now_[static_cast<size_t>(user.id)] = awake ? 1 : 0;
        if (awake) {
            ++user.awake_slot_count;
            ++acc_.total_awake_slots;
        }
    }

    met_scratch_.clear();
    int pending_seen = 0;
    for (const auto& user : users_) {
        if (!user.pending) continue;
        ++pending_seen;
        if (awake_now_[static_cast<size_t>(user.id)] &&
            awake_now_[static_cast<size_t>(user.pending->receiver)]) {
            met_scratch_.push_back(user.id);
        } else if (config_.collect_slot_events) {
            out.events.push_back({user.id, user.pending->receiver, PairEventKind::NotMet});
        }
    }
    out.not_met_count = pending_seen - static_cast<int>(met_scratch_.size());

    if (!met_scratch_.empty()) {
        // Awake slots always map to a real channel, and every awake user sits
        // on this slot's channel, so all met pairs share it.
        const int channel = grid_.channel_at(pos0 + 1);
        assert(channel != kNoChannel);
        if (!is_idle(channels_[static_cast<size_t>(channel - 1)])) {
            out.blocking_count = static_cast<int>(met_scratch_.size());
            acc_.total_blocking += met_scratch_.size();
            if (config_.collect_slot_events)
                for (int tx : met_scratch_)
                    out.events.push_back({tx, users_[static_cast<size_t>(tx)].pending->receiver,
                                          PairEventKind::Blocked});
        } else {
            int winner = -1;
            if (met_scratch_.size() == 1)
                winner = met_scratch_.front();
            else if (config_.contention == ContentionPolicy::RandomWinner)
                winner = met_scratch_[static_cast<size_t>(
                    engine_rng_.uniform_below(met_scratch_.size()))];
            for (int tx : met_scratch_) {
                if (tx == winner) continue;
                ++out.contention_loss_count;
                ++acc_.contention_losses;
                if (config_.collect_slot_events)
                    out.events.push_back({tx, users_[static_cast<size_t>(tx)].pending->receiver,
                                          PairEventKind::ContentionLoss});
            }
            if (winner >= 0) {
                auto& user = users_[static_cast<size_t>(winner)];
                const std::uint64_t ttr = slot - user.pending->start_slot + 1;
                acc_.record_rdv(ttr);
                out.successful_rdv_count = 1;
                if (config_.collect_slot_events)
                    out.events.push_back({winner, user.pending->receiver, PairEventKind::Rdv});
                user.pending.reset();
                --pending_count_;
            }
        }
    }
    ++acc_.total_slots;
    return out;
}

void Simulation::step_channels() {
    for (size_t i = 0; i < channels_.size(); ++i)
        step(channels_[i], channel_rngs_[i], config_.occupancy);
}

void Simulation::reselect_on_cycle(std::uint64_t slot) {
    if (slot % static_cast<std::uint64_t>(grid_.cycle_length()) != 0) return;
    if (load_samples_ > 0) {
        smoothed_load_ = load_sum_ / static_cast<double>(load_samples_);
        have_window_ = true;
        load_sum_ = 0.0;
        load_samples_ = 0;
    }
    if (config_.check_cycle_invariants) verify_cycle_invariants();
    if (!config_.fixed_selections.empty()) return;
    if (config_.scheme.variant == SchemeVariant::Adaptive)
        std::tie(rc_rows_, rc_cols_) =
            scheme_to_rc(SchemeVariant::Adaptive, classify_region());
    for (auto& user : users_)
        apply_selection(user, select(grid_, rc_rows_, rc_cols_,
                                     user_rngs_[static_cast<size_t>(user.id)]));
    if (config_.collect_controller_log)
        controller_log_.push_back(
            {slot, smoothed_load_, classify_region(), rc_rows_, rc_cols_});
}

TrafficRegion Simulation::classify_region() const {
    if (!have_window_) return TrafficRegion::Moderate;
    if (smoothed_load_ < config_.scheme.low_threshold) return TrafficRegion::Low;
    if (smoothed_load_ < config_.scheme.high_threshold) return TrafficRegion::Moderate;
    return TrafficRegion::High;
}

SlotOutcome Simulation::step_slot() {
    ++current_slot_;
    form_attempts(current_slot_);
    auto out = resolve_slot(current_slot_);
    step_channels();
    reselect_on_cycle(current_slot_);
    return out;
}

RunResult Simulation::run() {
    while (current_slot_ < config_.total_slots) step_slot();
    acc_.censored_attempts = pending_count_;
    RunResult res;
    res.accumulator = acc_;
    res.report = finalize(acc_, config_.seed);
    res.controller_log = controller_log_;
    return res;
}

void Simulation::verify_cycle_invariants() const {
    const int cycle = grid_.cycle_length();
    const bool square = grid_.num_channels == cycle;
    for (size_t i = 0; i < users_.size(); ++i) {
        for (size_t j = i + 1; j < users_.size(); ++j) {
            auto common = intersection(users_[i].selection, users_[j].selection);
            std::vector<int> usable;
            for (int s : common)
                if (grid_.channel_at(s) != kNoChannel) usable.push_back(s);
            std::vector<int> met;
            for (int pos = 1; pos <= cycle; ++pos)
                if (awake_masks_[i][static_cast<size_t>(pos - 1)] &&
                    awake_masks_[j][static_cast<size_t>(pos - 1)])
                    met.push_back(pos);
            if (met != usable)
                throw std::logic_error(
                    "cycle check: met slots diverge from the quorum intersection");
            if (square && grid_.n >= 2 && usable.size() < 2)
                throw std::logic_error(
                    "cycle check: fewer than two meeting slots on a square grid");
        }
    }
}

RunResult run(const SimConfig& config) { return Simulation(config).run(); }

}  // namespace qrdv
