// Monte Carlo harness: reproducible passage-frequency and martingale
// experiments with undecided bracketing, JSONL persistence, and CSV
// summaries.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sle83/sim.hpp"

namespace sle83 {

inline constexpr const char* kCodeVersion = "sle83 0.1.0";
inline constexpr int kRecordSchemaVersion = 1;

/// An MC estimate with undecided runs bracketed: bracket_low assigns every
/// undecided run to the complement, bracket_high assigns all of them to the
/// event. The bracket width is exactly n_undecided/n.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    std::uint64_t n_undecided = 0;
    double bracket_low = 0.0;
    double bracket_high = 0.0;
};

inline Estimate estimate_from_counts(std::uint64_t n_hit, std::uint64_t n_undecided,
                                     std::uint64_t n) {
    Estimate e;
    e.n = n;
    e.n_undecided = n_undecided;
    const double dn = static_cast<double>(n);
    e.bracket_low = static_cast<double>(n_hit) / dn;
    e.bracket_high = static_cast<double>(n_hit + n_undecided) / dn;
    e.mean = 0.5 * (e.bracket_low + e.bracket_high);
    e.std_error = std::sqrt(std::max(0.0, e.mean * (1.0 - e.mean)) / dn);
    return e;
}

/// Signed z-score of a target value against the undecided bracket: zero if
/// the bracket contains the value (up to rounding noise), otherwise distance
/// to the nearest bracket edge in units of std_error. Capped at +-1e9 so the
/// value stays finite (and JSON-serializable) when std_error degenerates.
inline double bracket_z_score(const Estimate& e, double target) {
    double excess = 0.0;
    if (target < e.bracket_low) excess = target - e.bracket_low;
    if (target > e.bracket_high) excess = target - e.bracket_high;
    if (std::abs(excess) < 1e-12) return 0.0;
    if (e.std_error <= 0.0) return std::copysign(1e9, excess);
    return std::clamp(excess / e.std_error, -1e9, 1e9);
}

struct ExperimentRecord {
    std::string id;
    SimConfig cfg;
    std::vector<HalfPlanePoint> points;
    std::string formula;
    Estimate estimate;
    double formula_value = 0.0;
    double z_score = 0.0;
    double wall_seconds = 0.0;
    std::string code_version = kCodeVersion;
    // auxiliary counters (e.g. the LL/LR/RL/RR cross-tabulation)
    std::vector<std::pair<std::string, std::uint64_t>> counters;

    std::uint64_t counter(const std::string& name) const {
        for (const auto& [k, v] : counters)
            if (k == name) return v;
        throw std::out_of_range("ExperimentRecord: no counter named " + name);
    }
};

namespace detail {

// Resolution near t = 0 must track the smallest point scale; passage
// decisions are scale invariant, so shrink the base step to dt_growth * y^2
// for points close to the real axis.
inline SimConfig scaled_config(SimConfig cfg, const std::vector<HalfPlanePoint>& points) {
    double y_min = std::numeric_limits<double>::infinity();
    for (const auto& p : points) y_min = std::min(y_min, p.y);
    if (std::isfinite(y_min))
        cfg.dt = std::min(cfg.dt, cfg.dt_growth * y_min * y_min);
    return cfg;
}

// Run `body(stream)` for streams [0, n) over `n_threads` contiguous chunks.
// Each stream's work is independent; per-thread accumulators are merged in
// thread order by the caller, so results do not depend on scheduling.
template <typename Body>
void for_each_stream(std::uint64_t n, unsigned n_threads, Body&& body) {
    if (n_threads <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) body(i, 0u);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
        const std::uint64_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi, t] {
            for (std::uint64_t i = lo; i < hi; ++i) body(i, t);
        });
    }
    for (auto& th : pool) th.join();
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Left-passage frequency at each point versus Schramm's one-point formula.
/// All points share each driver.
inline std::vector<ExperimentRecord> run_one_point(const std::vector<HalfPlanePoint>& points,
                                                   std::uint64_t n_samples, SimConfig cfg,
                                                   unsigned n_threads = 1) {
    if (n_samples < 1000) throw std::domain_error("run_one_point: need n_samples >= 1000");
    cfg = detail::scaled_config(cfg, points);
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    struct Counts {
        std::uint64_t left = 0, undecided = 0;
    };
    std::vector<std::vector<Counts>> per_thread(std::max(1u, n_threads),
                                                std::vector<Counts>(points.size()));
    detail::for_each_stream(n_samples, n_threads, [&](std::uint64_t stream, unsigned tid) {
        const auto outcomes = classify_passage_adaptive(points, cfg, stream);
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (outcomes[i] == PassageOutcome::Left) ++per_thread[tid][i].left;
            if (outcomes[i] == PassageOutcome::Undecided) ++per_thread[tid][i].undecided;
        }
    });

    const double wall = detail::seconds_since(t0);
    std::vector<ExperimentRecord> records;
    for (std::size_t i = 0; i < points.size(); ++i) {
        Counts c;
        for (const auto& tc : per_thread) {
            c.left += tc[i].left;
            c.undecided += tc[i].undecided;
        }
        ExperimentRecord r;
        r.id = "one_point_" + std::to_string(i);
        r.cfg = cfg;
        r.points = {points[i]};
        r.formula = "left_passage_one";
        r.estimate = estimate_from_counts(c.left, c.undecided, n_samples);
        r.formula_value = left_passage_one(points[i]);
        r.z_score = bracket_z_score(r.estimate, r.formula_value);
        r.wall_seconds = wall;
        records.push_back(std::move(r));
    }
    return records;
}

/// Joint both-Left frequency per pair versus the two-point formula, with the
/// full LL/LR/RL/RR cross-tabulation. Both points of a pair (and all pairs)
/// share each driver.
inline std::vector<ExperimentRecord> run_two_point(
    const std::vector<std::pair<HalfPlanePoint, HalfPlanePoint>>& pairs,
    std::uint64_t n_samples, SimConfig cfg, unsigned n_threads = 1) {
    if (n_samples < 10000) throw std::domain_error("run_two_point: need n_samples >= 10^4");
    std::vector<HalfPlanePoint> flat;
    for (const auto& [z, w] : pairs) {
        flat.push_back(z);
        flat.push_back(w);
    }
    cfg = detail::scaled_config(cfg, flat);
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    struct Counts {
        std::uint64_t ll = 0, lr = 0, rl = 0, rr = 0, undecided = 0;
    };
    std::vector<std::vector<Counts>> per_thread(std::max(1u, n_threads),
                                                std::vector<Counts>(pairs.size()));
    detail::for_each_stream(n_samples, n_threads, [&](std::uint64_t stream, unsigned tid) {
        const auto outcomes = classify_passage_adaptive(flat, cfg, stream);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const PassageOutcome a = outcomes[2 * i], b = outcomes[2 * i + 1];
            Counts& c = per_thread[tid][i];
            if (a == PassageOutcome::Undecided || b == PassageOutcome::Undecided)
                ++c.undecided;
            else if (a == PassageOutcome::Left)
                b == PassageOutcome::Left ? ++c.ll : ++c.lr;
            else
                b == PassageOutcome::Left ? ++c.rl : ++c.rr;
        }
    });

    const double wall = detail::seconds_since(t0);
    std::vector<ExperimentRecord> records;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        Counts c;
        for (const auto& tc : per_thread) {
            c.ll += tc[i].ll;
            c.lr += tc[i].lr;
            c.rl += tc[i].rl;
            c.rr += tc[i].rr;
            c.undecided += tc[i].undecided;
        }
        ExperimentRecord r;
        r.id = "two_point_" + std::to_string(i);
        r.cfg = cfg;
        r.points = {pairs[i].first, pairs[i].second};
        r.formula = "left_passage_two";
        r.estimate = estimate_from_counts(c.ll, c.undecided, n_samples);
        r.formula_value = left_passage_two(pairs[i].first, pairs[i].second);
        r.z_score = bracket_z_score(r.estimate, r.formula_value);
        r.wall_seconds = wall;
        r.counters = {{"LL", c.ll},
                      {"LR", c.lr},
                      {"RL", c.rl},
                      {"RR", c.rr},
                      {"undecided", c.undecided}};
        records.push_back(std::move(r));
    }
    return records;
}

/// Empirical mean of the two-point martingale observable
/// L~(x_t, y_t, u_t, v_t) at each requested capacity time, versus its exact
/// t = 0 value. One record per time.
inline std::vector<ExperimentRecord> run_martingale_test(const HalfPlanePoint& z,
                                                         const HalfPlanePoint& w,
                                                         const std::vector<double>& times,
                                                         std::uint64_t n_samples, SimConfig cfg,
                                                         unsigned n_threads = 1) {
    cfg = detail::scaled_config(cfg, {z, w});
    cfg.validate();
    for (double t : times)
        if (!(t >= 0.0 && t <= cfg.t_max))
            throw std::domain_error("run_martingale_test: times must lie in [0, t_max]");
    const auto t0 = std::chrono::steady_clock::now();
    const double l0 = left_passage_two(z, w);

    struct Acc {
        std::vector<double> sum, sum2;
    };
    std::vector<Acc> per_thread(std::max(1u, n_threads),
                                Acc{std::vector<double>(times.size(), 0.0),
                                    std::vector<double>(times.size(), 0.0)});
    detail::for_each_stream(n_samples, n_threads, [&](std::uint64_t stream, unsigned tid) {
        const DriverPath d = sample_driver(cfg, stream);
        const auto sz = flow_trajectory(z, d, cfg, times);
        const auto sw = flow_trajectory(w, d, cfg, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            double val;
            if (sz[i].blown_up || sw[i].blown_up) {
                // swallowed points have a resolved side; the observable limit is 0/1
                val = (sz[i].x > 0.0 && sw[i].x > 0.0) ? 1.0 : 0.0;
            } else {
                val = left_passage_two(HalfPlanePoint(sz[i].x, sz[i].y),
                                       HalfPlanePoint(sw[i].x, sw[i].y));
            }
            per_thread[tid].sum[i] += val;
            per_thread[tid].sum2[i] += val * val;
        }
    });

    const double wall = detail::seconds_since(t0);
    std::vector<ExperimentRecord> records;
    const double dn = static_cast<double>(n_samples);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double sum = 0.0, sum2 = 0.0;
        for (const auto& a : per_thread) {
            sum += a.sum[i];
            sum2 += a.sum2[i];
        }
        ExperimentRecord r;
        r.id = "martingale_t" + std::to_string(times[i]);
        r.cfg = cfg;
        r.points = {z, w};
        r.formula = "martingale_two_point";
        r.estimate.n = n_samples;
        r.estimate.mean = sum / dn;
        const double var = std::max(0.0, sum2 / dn - r.estimate.mean * r.estimate.mean);
        r.estimate.std_error = std::sqrt(var / dn);
        r.estimate.bracket_low = r.estimate.mean;
        r.estimate.bracket_high = r.estimate.mean;
        r.formula_value = l0;
        r.z_score = bracket_z_score(r.estimate, l0);
        r.wall_seconds = wall;
        r.counters = {{"time_milli", static_cast<std::uint64_t>(times[i] * 1000.0 + 0.5)}};
        records.push_back(std::move(r));
    }
    return records;
}

// ---- persistence -----------------------------------------------------------

inline nlohmann::json to_json(const SimConfig& c) {
    return {{"kappa", c.kappa},     {"dt", c.dt},
            {"dt_growth", c.dt_growth}, {"t_max", c.t_max},
            {"y_escape", c.y_escape},   {"ratio_threshold", c.ratio_threshold},
            {"y_min", c.y_min},         {"seed", c.seed}};
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
    SimConfig c;
    c.kappa = j.at("kappa");
    c.dt = j.at("dt");
    c.dt_growth = j.at("dt_growth");
    c.t_max = j.at("t_max");
    c.y_escape = j.at("y_escape");
    c.ratio_threshold = j.at("ratio_threshold");
    c.y_min = j.at("y_min");
    c.seed = j.at("seed");
    return c;
}

inline nlohmann::json to_json(const ExperimentRecord& r) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : r.points) pts.push_back({p.x, p.y});
    nlohmann::json counters = nlohmann::json::object();
    for (const auto& [k, v] : r.counters) counters[k] = v;
    return {{"schema_version", kRecordSchemaVersion},
            {"id", r.id},
            {"cfg", to_json(r.cfg)},
            {"points", pts},
            {"formula", r.formula},
            {"estimate",
             {{"mean", r.estimate.mean},
              {"std_error", r.estimate.std_error},
              {"n", r.estimate.n},
              {"n_undecided", r.estimate.n_undecided},
              {"bracket_low", r.estimate.bracket_low},
              {"bracket_high", r.estimate.bracket_high}}},
            {"formula_value", r.formula_value},
            {"z_score", r.z_score},
            {"wall_seconds", r.wall_seconds},
            {"code_version", r.code_version},
            {"counters", counters}};
}

inline ExperimentRecord record_from_json(const nlohmann::json& j) {
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kRecordSchemaVersion)
        throw std::runtime_error("experiment record: schema version mismatch");
    ExperimentRecord r;
    r.id = j.at("id");
    r.cfg = sim_config_from_json(j.at("cfg"));
    for (const auto& p : j.at("points"))
        r.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    r.formula = j.at("formula");
    const auto& e = j.at("estimate");
    r.estimate = {e.at("mean"),       e.at("std_error"),    e.at("n"),
                  e.at("n_undecided"), e.at("bracket_low"), e.at("bracket_high")};
    r.formula_value = j.at("formula_value");
    r.z_score = j.at("z_score");
    r.wall_seconds = j.at("wall_seconds");
    r.code_version = j.at("code_version");
    for (const auto& [k, v] : j.at("counters").items())
        r.counters.emplace_back(k, v.get<std::uint64_t>());
    return r;
}

/// One experiment per line (JSONL).
inline void persist_records(const std::vector<ExperimentRecord>& records,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("persist_records: cannot open " + path);
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

inline std::vector<ExperimentRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_records: cannot open " + path);
    std::vector<ExperimentRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw std::runtime_error("load_records: malformed record line");
        }
        records.push_back(record_from_json(j));
    }
    return records;
}

/// CSV summary: id, point(s), formula, estimate, SE, z, undecided_frac, dt, n.
inline std::string csv_summary(const std::vector<ExperimentRecord>& records) {
    std::ostringstream out;
    out << "id,points,formula,estimate,std_error,z_score,undecided_frac,dt,n\n";
    out.precision(12);
    for (const auto& r : records) {
        out << r.id << ",\"";
        for (std::size_t i = 0; i < r.points.size(); ++i) {
            if (i) out << ' ';
            out << r.points[i].x << (r.points[i].y >= 0 ? "+" : "") << r.points[i].y << "i";
        }
        out << "\"," << r.formula << ',' << r.estimate.mean << ',' << r.estimate.std_error
            << ',' << r.z_score << ','
            << static_cast<double>(r.estimate.n_undecided) / static_cast<double>(r.estimate.n)
            << ',' << r.cfg.dt << ',' << r.estimate.n << '\n';
    }
    return out.str();
}

}  // namespace sle83
