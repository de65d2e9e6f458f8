#pragma once

#include "qrdv/rng.hpp"

namespace qrdv {

enum class OccupancyMode { Markov, Iid };

// One licensed channel's ON-OFF occupancy process. alpha/beta are the mean
// idle/busy durations in slots; sojourns are geometric, so the per-slot flip
// probabilities are 1/alpha and 1/beta (clamped to 1 for sub-slot means).
struct PuChannel {
    double alpha = 1.0;
    double beta = 1.0;
    bool idle = true;
    int channel_id = 0;
};

// alpha / (alpha + beta); throws std::invalid_argument on non-positive input.
double stationary_idle(double alpha, double beta);

// Channel whose stationary idle probability is exactly p_i: alpha = p_i *
// scale, beta = (1 - p_i) * scale. Initial state is drawn from the
// stationary distribution, so runs start without burn-in bias. Throws when
// p_i is outside (0,1) or when the scale puts either mean sojourn below one
// slot (the slotted chain could not realize the target p_i then).
PuChannel from_target_pi(double p_i, double mean_sojourn_scale, RngStream& rng,
                         int channel_id = 0);

// Advance one slot. Markov mode flips with probability 1/alpha (from idle)
// or 1/beta (from busy); Iid mode redraws the state from the stationary
// distribution each slot.
void step(PuChannel& ch, RngStream& rng, OccupancyMode mode = OccupancyMode::Markov);

inline bool is_idle(const PuChannel& ch) { return ch.idle; }

}  // namespace qrdv
