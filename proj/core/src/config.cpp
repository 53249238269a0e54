#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mcswarm/sim.hpp"

namespace mcswarm {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where,
                std::vector<std::string>& errors) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) errors.push_back(where + key + ": unknown key");
    }
}

void parse_arena(const json& j, ArenaParams& p, std::vector<std::string>& errors) {
    check_keys(j,
               {"width", "height", "cell_size", "n_robots", "start_square", "robot_spacing",
                "robot_radius", "max_obstacles", "obstacle_min_side", "obstacle_max_side",
                "obstacle_separation"},
               "arena.", errors);
    if (j.contains("width")) p.width = j["width"].get<double>();
    if (j.contains("height")) p.height = j["height"].get<double>();
    if (j.contains("cell_size")) p.cell_size = j["cell_size"].get<double>();
    if (j.contains("n_robots")) p.n_robots = j["n_robots"].get<int>();
    if (j.contains("start_square")) p.start_square = j["start_square"].get<double>();
    if (j.contains("robot_spacing")) p.robot_spacing = j["robot_spacing"].get<double>();
    if (j.contains("robot_radius")) p.robot_radius = j["robot_radius"].get<double>();
    if (j.contains("max_obstacles")) p.max_obstacles = j["max_obstacles"].get<int>();
    if (j.contains("obstacle_min_side")) p.obstacle_min_side = j["obstacle_min_side"].get<double>();
    if (j.contains("obstacle_max_side")) p.obstacle_max_side = j["obstacle_max_side"].get<double>();
    if (j.contains("obstacle_separation"))
        p.obstacle_separation = j["obstacle_separation"].get<double>();
    if (p.width <= 0) errors.push_back("arena.width: must be > 0");
    if (p.height <= 0) errors.push_back("arena.height: must be > 0");
    if (p.cell_size <= 0) errors.push_back("arena.cell_size: must be > 0");
    if (p.n_robots < 1) errors.push_back("arena.n_robots: must be >= 1");
    if (p.max_obstacles < 0) errors.push_back("arena.max_obstacles: must be >= 0");
}

void parse_channel(const json& j, ChannelParams& p, std::vector<std::string>& errors) {
    check_keys(j, {"k", "pdr_max", "near_cutoff"}, "channel.", errors);
    if (j.contains("k")) p.k = j["k"].get<double>();
    if (j.contains("pdr_max")) p.pdr_max = j["pdr_max"].get<double>();
    if (j.contains("near_cutoff")) p.near_cutoff = j["near_cutoff"].get<double>();
    if (p.k < 0) errors.push_back("channel.k: must be >= 0");
    if (p.pdr_max <= 0 || p.pdr_max > 1) errors.push_back("channel.pdr_max: must be in (0, 1]");
    if (p.near_cutoff < 0) errors.push_back("channel.near_cutoff: must be >= 0");
}

void parse_weights(const json& j, WeightConfig& w, std::vector<std::string>& errors) {
    check_keys(j,
               {"diagonal", "prev_cell", "linger_rate", "obstacle", "unexplored_bonus",
                "separation_table", "cohesion_coeff", "cohesion_distance_scale",
                "frontier_per_cell"},
               "weights.", errors);
    if (j.contains("diagonal")) w.diagonal = j["diagonal"].get<double>();
    if (j.contains("prev_cell")) w.prev_cell = j["prev_cell"].get<double>();
    if (j.contains("linger_rate")) w.linger_rate = j["linger_rate"].get<double>();
    if (j.contains("obstacle")) w.obstacle = j["obstacle"].get<double>();
    if (j.contains("unexplored_bonus")) w.unexplored_bonus = j["unexplored_bonus"].get<double>();
    if (j.contains("cohesion_coeff")) w.cohesion_coeff = j["cohesion_coeff"].get<double>();
    if (j.contains("cohesion_distance_scale"))
        w.cohesion_distance_scale = j["cohesion_distance_scale"].get<double>();
    if (w.cohesion_distance_scale <= 0)
        errors.push_back("weights.cohesion_distance_scale: must be > 0");
    if (j.contains("frontier_per_cell"))
        w.frontier_per_cell = j["frontier_per_cell"].get<double>();
    if (j.contains("separation_table")) {
        auto table = j["separation_table"].get<std::vector<double>>();
        if (table.size() != w.separation_table.size()) {
            errors.push_back("weights.separation_table: expected 7 entries");
        } else {
            std::copy(table.begin(), table.end(), w.separation_table.begin());
        }
    }
    for (std::size_t i = 1; i < w.separation_table.size(); ++i) {
        if (w.separation_table[i] >= w.separation_table[i - 1]) {
            errors.push_back("weights.separation_table: must be strictly decreasing");
            break;
        }
    }
}

SimConfig parse(const json& j) {
    std::vector<std::string> errors;
    SimConfig cfg;
    check_keys(j,
               {"arena_seed", "arena", "channel", "cohesion_mode", "hi_window_s", "horizon_slots",
                "sample_period_slots", "retx_threshold", "position_ttl_slots", "weights"},
               "", errors);
    if (j.contains("arena_seed")) cfg.arena_seed = j["arena_seed"].get<std::uint64_t>();
    if (j.contains("arena")) parse_arena(j["arena"], cfg.arena, errors);
    if (j.contains("channel")) parse_channel(j["channel"], cfg.channel, errors);
    if (j.contains("cohesion_mode")) {
        try {
            cfg.cohesion = parse_cohesion_mode(j["cohesion_mode"].get<std::string>());
        } catch (const std::invalid_argument&) {
            errors.push_back("cohesion_mode: expected one of none/constant/half/mixed");
        }
    }
    if (j.contains("hi_window_s")) cfg.hi_window_s = j["hi_window_s"].get<double>();
    if (j.contains("horizon_slots")) cfg.horizon_slots = j["horizon_slots"].get<std::uint32_t>();
    if (j.contains("sample_period_slots"))
        cfg.sample_period_slots = j["sample_period_slots"].get<std::uint32_t>();
    if (j.contains("retx_threshold")) cfg.retx_threshold = j["retx_threshold"].get<int>();
    if (j.contains("position_ttl_slots"))
        cfg.position_ttl_slots = j["position_ttl_slots"].get<std::uint32_t>();
    if (j.contains("weights")) parse_weights(j["weights"], cfg.weights, errors);
    if (cfg.hi_window_s <= 0) errors.push_back("hi_window_s: must be > 0");
    if (cfg.retx_threshold < 0) errors.push_back("retx_threshold: must be >= 0");
    if (cfg.position_ttl_slots == 0) errors.push_back("position_ttl_slots: must be > 0");

    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration:";
        for (const auto& e : errors) msg << "\n  " << e;
        throw std::invalid_argument(msg.str());
    }
    return cfg;
}

}  // namespace

SimConfig parse_sim_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return parse(j);
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sim_config(buf.str());
}

}  // namespace mcswarm
