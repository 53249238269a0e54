#include "mcswarm/channel.hpp"

namespace mcswarm {

double pdr(double distance_m, const ChannelParams& params) {
    double x = std::max(0.0, distance_m - params.near_cutoff);
    double kx = params.k * x;
    return params.pdr_max / (1.0 + kx * kx);
}

bool deliver(const Vec2& sender_pos, const Vec2& receiver_pos, const ChannelParams& params,
             Rng& rng) {
    double p = pdr(distance(sender_pos, receiver_pos), params);
    return rng.uniform01() < p;
}

}  // namespace mcswarm
