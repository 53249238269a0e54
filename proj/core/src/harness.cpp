#include "mcswarm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace mcswarm {

namespace {

using nlohmann::json;

}  // namespace

ExperimentPlan parse_plan(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("plan parse error: ") + e.what());
    }
    ExperimentPlan plan;
    std::vector<std::string> errors;
    for (const auto& [key, value] : j.items()) {
        static const std::set<std::string> allowed{"arena_count", "arena_base_seed", "k_values",
                                                   "modes",       "repetitions",     "output_dir",
                                                   "write_traces", "base"};
        if (!allowed.contains(key)) errors.push_back(key + ": unknown key");
    }
    if (j.contains("arena_count")) plan.arena_count = j["arena_count"].get<int>();
    if (j.contains("arena_base_seed"))
        plan.arena_base_seed = j["arena_base_seed"].get<std::uint64_t>();
    if (j.contains("k_values")) plan.k_values = j["k_values"].get<std::vector<double>>();
    if (j.contains("modes")) {
        plan.modes.clear();
        for (const auto& name : j["modes"]) {
            try {
                plan.modes.push_back(parse_cohesion_mode(name.get<std::string>()));
            } catch (const std::invalid_argument&) {
                errors.push_back("modes: unknown mode " + name.get<std::string>());
            }
        }
    }
    if (j.contains("repetitions")) plan.repetitions = j["repetitions"].get<int>();
    if (j.contains("output_dir")) plan.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("write_traces")) plan.write_traces = j["write_traces"].get<bool>();
    if (j.contains("base")) plan.base = parse_sim_config(j["base"].dump());
    if (plan.arena_count < 1) errors.push_back("arena_count: must be >= 1");
    if (plan.repetitions < 1) errors.push_back("repetitions: must be >= 1");
    if (plan.k_values.empty()) errors.push_back("k_values: must not be empty");
    if (plan.modes.empty()) errors.push_back("modes: must not be empty");
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid plan:";
        for (const auto& e : errors) msg << "\n  " << e;
        throw std::invalid_argument(msg.str());
    }
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("plan: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_plan(buf.str());
}

SimConfig plan_run_config(const ExperimentPlan& plan, CohesionMode mode, double k,
                          std::uint64_t arena_seed) {
    SimConfig cfg = plan.base;
    cfg.arena_seed = arena_seed;
    cfg.channel.k = k;
    cfg.cohesion = mode;
    return cfg;
}

std::vector<RunRecord> run_experiment(const ExperimentPlan& plan, int workers) {
    struct Task {
        CohesionMode mode;
        double k;
        std::uint64_t seed;
        int rep;
    };
    std::vector<Task> tasks;
    for (CohesionMode mode : plan.modes) {
        for (double k : plan.k_values) {
            for (int a = 0; a < plan.arena_count; ++a) {
                for (int rep = 0; rep < plan.repetitions; ++rep)
                    tasks.push_back({mode, k, plan.arena_base_seed + a, rep});
            }
        }
    }
    std::vector<RunRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            RunRecord& rec = records[i];
            rec.mode = task.mode;
            rec.k = task.k;
            rec.arena_seed = task.seed;
            rec.repetition = task.rep;
            try {
                SimConfig cfg = plan_run_config(plan, task.mode, task.k, task.seed);
                std::ofstream trace;
                if (plan.write_traces && !plan.output_dir.empty()) {
                    trace.open(plan.output_dir + "/trace_" + to_string(task.mode) + "_k" +
                               format_k(task.k) + "_a" + std::to_string(task.seed) + ".csv");
                }
                RunResult result = run_sim(cfg, trace.is_open() ? &trace : nullptr);
                rec.series = std::move(result.series);
                rec.false_occupied_rate = result.false_occupied_rate;
                rec.hi_slot_fraction = result.hi_slot_fraction;
            } catch (const std::exception& e) {
                rec.failed = true;
                rec.error = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return records;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile: empty input");
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

AggregateCurve aggregate(std::span<const CoverageSeries> series, CohesionMode mode, double k) {
    if (series.empty()) throw std::invalid_argument("aggregate: no series");
    std::size_t n_samples = series.front().samples.size();
    for (const auto& s : series) {
        if (s.samples.size() != n_samples)
            throw std::invalid_argument("aggregate: series lengths differ");
    }
    AggregateCurve curve;
    curve.mode = mode;
    curve.k = k;
    for (std::size_t i = 0; i < n_samples; ++i) {
        std::vector<double> values;
        values.reserve(series.size());
        for (const auto& s : series) values.push_back(s.samples[i].mean_coverage);
        curve.time_s.push_back(series.front().samples[i].time_s);
        curve.median.push_back(percentile(values, 0.5));
        curve.q25.push_back(percentile(values, 0.25));
        curve.q75.push_back(percentile(values, 0.75));
    }
    return curve;
}

void write_aggregate_csv(const AggregateCurve& curve, std::ostream& out) {
    out << "time_s,median,q25,q75\n";
    char buf[128];
    for (std::size_t i = 0; i < curve.time_s.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.6f,%.6f,%.6f\n", curve.time_s[i],
                      curve.median[i], curve.q25[i], curve.q75[i]);
        out << buf;
    }
}

AggregateCurve read_aggregate_csv(std::istream& in, CohesionMode mode, double k) {
    AggregateCurve curve;
    curve.mode = mode;
    curve.k = k;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("aggregate csv: empty input");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double t, med, q25, q75;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &med, &q25, &q75) != 4)
            throw std::runtime_error("aggregate csv: malformed row: " + line);
        curve.time_s.push_back(t);
        curve.median.push_back(med);
        curve.q25.push_back(q25);
        curve.q75.push_back(q75);
    }
    return curve;
}

std::vector<CohesionMode> rank_modes(std::span<const AggregateCurve> curves, double k,
                                     double at_time_s) {
    const std::array<CohesionMode, 4> declaration{CohesionMode::None, CohesionMode::Constant,
                                                  CohesionMode::Half,
                                                  CohesionMode::MixedCriticality};
    std::vector<std::pair<CohesionMode, double>> entries;
    for (CohesionMode mode : declaration) {
        const AggregateCurve* found = nullptr;
        for (const auto& c : curves) {
            if (c.mode == mode && c.k == k) {
                found = &c;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("rank: missing mode " + to_string(mode) + " for k=" +
                                        format_k(k));
        if (found->time_s.empty()) throw std::invalid_argument("rank: empty curve");
        // Negative time selects the final sample.
        std::size_t best = found->time_s.size() - 1;
        if (at_time_s >= 0.0) {
            best = 0;
            for (std::size_t i = 1; i < found->time_s.size(); ++i) {
                if (std::abs(found->time_s[i] - at_time_s) <
                    std::abs(found->time_s[best] - at_time_s))
                    best = i;
            }
        }
        entries.emplace_back(mode, found->median[best]);
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<CohesionMode> order;
    for (const auto& [mode, value] : entries) order.push_back(mode);
    return order;
}

std::string format_k(double k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", k);
    return buf;
}

}  // namespace mcswarm
