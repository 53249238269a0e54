#pragma once

#include "mcswarm/geometry.hpp"
#include "mcswarm/rng.hpp"

namespace mcswarm {

/// Distance-dependent broadcast loss model. Delivery probability is capped at
/// pdr_max inside near_cutoff and falls off with the square of the excess
/// distance, scaled by k.
struct ChannelParams {
    double k = 1.0;
    double pdr_max = 0.95;
    double near_cutoff = 0.5;  // metres
};

/// Packet delivery rate at the given sender/receiver distance.
/// pdr(d) = pdr_max / (1 + (k * max(0, d - near_cutoff))^2)
double pdr(double distance_m, const ChannelParams& params);

/// One Bernoulli delivery draw for a single receiver. Draws must be made in
/// ascending receiver id so that a run's channel randomness is reproducible.
bool deliver(const Vec2& sender_pos, const Vec2& receiver_pos, const ChannelParams& params,
             Rng& rng);

}  // namespace mcswarm
