#include "qrdv/channel_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace qrdv {

double stationary_idle(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("stationary_idle: alpha and beta must be positive");
    return alpha / (alpha + beta);
}

PuChannel from_target_pi(double p_i, double mean_sojourn_scale, RngStream& rng,
                         int channel_id) {
    if (!(p_i > 0.0) || !(p_i < 1.0))
        throw std::invalid_argument("from_target_pi: p_i must lie in (0,1)");
    if (!(mean_sojourn_scale > 0.0))
        throw std::invalid_argument("from_target_pi: scale must be positive");
    PuChannel ch;
    ch.alpha = p_i * mean_sojourn_scale;
    ch.beta = (1.0 - p_i) * mean_sojourn_scale;
    if (ch.alpha < 1.0 - 1e-9 || ch.beta < 1.0 - 1e-9)
        throw std::invalid_argument(
            "from_target_pi: scale too small, mean sojourns must be >= 1 slot "
            "to realize the target idle probability");
    ch.channel_id = channel_id;
    ch.idle = rng.bernoulli(p_i);
    return ch;
}

void step(PuChannel& ch, RngStream& rng, OccupancyMode mode) {
    if (mode == OccupancyMode::Iid) {
        ch.idle = rng.bernoulli(stationary_idle(ch.alpha, ch.beta));
        return;
    }
    const double flip = std::min(1.0, ch.idle ? 1.0 / ch.alpha : 1.0 / ch.beta);
    if (rng.bernoulli(flip)) ch.idle = !ch.idle;
}

}  // namespace qrdv
