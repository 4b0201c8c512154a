// harness.hpp
// Monte Carlo experiments: spec loading, seeded batch execution, aggregation
// and CSV / JSON-lines reporting.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iterator>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "adversary.hpp"
#include "config.hpp"
#include "core_ops.hpp"
#include "device.hpp"
#include "error.hpp"
#include "protocol.hpp"
#include "random.hpp"

namespace coreqkd {

// One fully specified sweep point.
struct SweepPoint {
    std::string label;
    SessionConfig session;
    int key_length = 0;  // >0: a fresh random control key of this many values per trial
};

struct SweepAxes {
    std::vector<double> noise;
    std::vector<EveKind> eve;
    std::vector<int> key_length;
    std::vector<int> n_blocks;
    std::vector<Mode> mode;
};

// A known_key Eve without an explicit key is handed the session key.
inline void fill_known_key(SessionConfig& s) {
    if (s.eve.kind == EveKind::KnownKey && s.eve.known_key.empty()) s.eve.known_key = s.control_key;
}

struct ExperimentSpec {
    std::string name = "experiment";
    SessionConfig base;
    DeviceModel device;
    SweepAxes sweep;
    std::vector<SweepPoint> points;  // explicit points; when nonempty the sweep is ignored
    int trials = 1;
    std::uint64_t seed = 1;
    std::string output;  // empty: stdout
    std::string format = "csv";

    void validate() const { require(trials >= 1, "trials must be >= 1"); }

    // Materialized grid: explicit points, or the Cartesian product of the
    // sweep axes over the base session.
    std::vector<SweepPoint> grid() const {
        std::vector<SweepPoint> out = points;
        if (!out.empty()) {
            for (auto& p : out) fill_known_key(p.session);
            return out;
        }
        out.push_back(SweepPoint{"base", base, 0});
        auto expand = [&out](const auto& axis, auto&& apply) {
            if (axis.empty()) return;
            std::vector<SweepPoint> next;
            for (const auto& p : out)
                for (const auto& v : axis) {
                    SweepPoint q = p;
                    apply(q, v);
                    next.push_back(std::move(q));
                }
            out = std::move(next);
        };
        expand(sweep.mode, [](SweepPoint& p, Mode m) { p.session.mode = m; });
        expand(sweep.eve, [](SweepPoint& p, EveKind k) { p.session.eve.kind = k; });
        expand(sweep.noise, [](SweepPoint& p, double v) { p.session.noise = v; });
        expand(sweep.key_length, [](SweepPoint& p, int v) { p.key_length = v; });
        expand(sweep.n_blocks, [](SweepPoint& p, int v) { p.session.n_blocks = v; });
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i].label = "p" + std::to_string(i);
            fill_known_key(out[i].session);
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Configuration loading

namespace detail {

inline Direction parse_direction(const ConfigValue& v) {
    const auto xs = v.list<double>();
    if (xs.size() != 3) v.fail("direction needs 3 components");
    try {
        return Direction(xs[0], xs[1], xs[2]);
    } catch (const Error& e) {
        v.fail(e.what());
    }
}

template <class F>
void guarded(const ConfigValue& v, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) throw;
        v.fail(e.what());
    }
}

// Applies one session-level key. Returns false if the key is not a session key.
inline bool apply_session_key(SessionConfig& s, std::string_view key, const ConfigValue& v) {
    if (key == "mode") guarded(v, [&] { s.mode = parse_mode(v.str()); });
    else if (key == "n_blocks") s.n_blocks = v.as<int>();
    else if (key == "block_size") s.block_size = v.as<int>();
    else if (key == "control_key") guarded(v, [&] { s.control_key = ControlKey::from_bits(v.str()); });
    else if (key == "group_size") s.group.group_size = v.as<int>();
    else if (key == "check_fraction") s.check_fraction = v.as<double>();
    else if (key == "error_threshold") s.error_threshold = v.as<double>();
    else if (key == "noise") s.noise = v.as<double>();
    else if (key == "seed") s.seed = v.as<std::uint64_t>();
    else if (key == "bootstrap_key_bits") s.bootstrap_key_bits = v.as<int>();
    else if (key == "permutations") {
        const auto ws = v.words();
        if (ws.size() != 4) v.fail("expected 4 permutations (E0..E3)");
        guarded(v, [&] {
            s.perms = PermutationSet({Permutation::parse(ws[0]), Permutation::parse(ws[1]),
                                      Permutation::parse(ws[2]), Permutation::parse(ws[3])});
        });
    } else return false;
    return true;
}

inline bool apply_eve_key(EveStrategy& e, std::string_view key, const ConfigValue& v) {
    if (key == "kind") guarded(v, [&] { e.kind = parse_eve_kind(v.str()); });
    else if (key == "guess_weights") {
        const auto w = v.list<double>();
        if (w.size() != 4) v.fail("expected 4 weights");
        std::copy(w.begin(), w.end(), e.guess_weights.begin());
    } else if (key == "known_key") guarded(v, [&] { e.known_key = ControlKey::from_bits(v.str()); });
    else if (key == "probe_a") e.probe_a = parse_direction(v);
    else if (key == "probe_b") e.probe_b = parse_direction(v);
    else if (key == "pairing") {
        if (v.str() == "matched") e.pairing = ProbePairing::Matched;
        else if (v.str() == "mismatched") e.pairing = ProbePairing::Mismatched;
        else v.fail("expected matched or mismatched");
    } else if (key == "probe_budget") e.probe_budget = v.as<int>();
    else return false;
    return true;
}

inline void validate_session(const ConfigDoc& doc, const ConfigSection& sec, SessionConfig s) {
    fill_known_key(s);
    try {
        s.validate();
    } catch (const Error& e) {
        throw parse_error(doc.source, sec.line, "[" + sec.name + "] " + e.what());
    }
}

}  // namespace detail

inline ExperimentSpec experiment_from_config(const ConfigDoc& doc) {
    ExperimentSpec spec;
    for (const auto& sec : doc.sections) {
        if (sec.name != "experiment" && sec.name != "session" && sec.name != "eve" &&
            sec.name != "device" && sec.name != "sweep" && sec.name != "point")
            throw parse_error(doc.source, sec.line, "unknown section [" + sec.name + "]");
    }
    auto unknown = [&](const ConfigSection& sec, const ConfigEntry& e) {
        return parse_error(doc.source, e.line, "unknown key '" + e.key + "' in [" + sec.name + "]");
    };

    if (const auto* sec = doc.section("experiment")) {
        for (const auto& e : sec->entries) {
            const ConfigValue v(doc, e);
            if (e.key == "name") spec.name = v.str();
            else if (e.key == "trials") spec.trials = v.as<int>();
            else if (e.key == "seed") spec.seed = v.as<std::uint64_t>();
            else if (e.key == "output") spec.output = v.str();
            else if (e.key == "format") {
                if (v.str() != "csv" && v.str() != "jsonl") v.fail("format must be csv or jsonl");
                spec.format = v.str();
            } else throw unknown(*sec, e);
        }
        if (spec.trials < 1) throw parse_error(doc.source, sec->line, "trials must be >= 1");
        if (spec.name.find_first_of(",\"\n") != std::string::npos)
            throw parse_error(doc.source, sec->line, "name must not contain commas or quotes");
    }
    if (const auto* sec = doc.section("session"))
        for (const auto& e : sec->entries)
            if (!detail::apply_session_key(spec.base, e.key, ConfigValue(doc, e))) throw unknown(*sec, e);
    if (const auto* sec = doc.section("eve"))
        for (const auto& e : sec->entries)
            if (!detail::apply_eve_key(spec.base.eve, e.key, ConfigValue(doc, e))) throw unknown(*sec, e);
    if (const auto* sec = doc.section("device")) {
        for (const auto& e : sec->entries) {
            const ConfigValue v(doc, e);
            if (e.key == "loop_delay") spec.device.loop_delay = v.as<int>();
            else if (e.key == "delay_budget") spec.device.delay_budget = v.as<int>();
            else throw unknown(*sec, e);
        }
    }
    spec.device.block_size = spec.base.block_size;
    if (const auto* sec = doc.section("session")) detail::validate_session(doc, *sec, spec.base);

    if (const auto* sec = doc.section("sweep")) {
        for (const auto& e : sec->entries) {
            const ConfigValue v(doc, e);
            if (e.key == "noise") spec.sweep.noise = v.list<double>();
            else if (e.key == "key_length") spec.sweep.key_length = v.list<int>();
            else if (e.key == "n_blocks") spec.sweep.n_blocks = v.list<int>();
            else if (e.key == "eve")
                for (const auto& w : v.words())
                    detail::guarded(v, [&] { spec.sweep.eve.push_back(parse_eve_kind(w)); });
            else if (e.key == "mode")
                for (const auto& w : v.words())
                    detail::guarded(v, [&] { spec.sweep.mode.push_back(parse_mode(w)); });
            else throw unknown(*sec, e);
        }
    }
    // [point label] sections: session keys, and eve keys prefixed "eve.".
    for (const auto& sec : doc.sections) {
        if (sec.name != "point") continue;
        SweepPoint p{sec.label.empty() ? "p" + std::to_string(spec.points.size()) : sec.label, spec.base, 0};
        if (p.label.find_first_of(",\"") != std::string::npos)
            throw parse_error(doc.source, sec.line, "point label must not contain commas or quotes");
        for (const auto& e : sec.entries) {
            const ConfigValue v(doc, e);
            if (e.key == "key_length") p.key_length = v.as<int>();
            else if (e.key.rfind("eve.", 0) == 0) {
                if (!detail::apply_eve_key(p.session.eve, std::string_view(e.key).substr(4), v))
                    throw unknown(sec, e);
            } else if (!detail::apply_session_key(p.session, e.key, v)) throw unknown(sec, e);
        }
        detail::validate_session(doc, sec, p.session);
        spec.points.push_back(std::move(p));
    }
    for (const auto& p : spec.grid()) {
        if (p.key_length < 0) throw parse_error(doc.source, 0, "key_length must be >= 0");
        try {
            p.session.validate();
        } catch (const Error& e) {
            throw parse_error(doc.source, 0, "sweep point " + p.label + ": " + e.what());
        }
    }
    return spec;
}

inline ExperimentSpec load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open experiment spec '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return experiment_from_config(parse_config(text, path));
}

// Session settings rendered in the config grammar; parse_config +
// experiment_from_config reads them back.
inline std::string to_config_text(const SessionConfig& s) {
    auto num = [](double v) {
        char buf[64];
        auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    std::ostringstream o;
    o << "[session]\n"
      << "mode = " << to_string(s.mode) << "\n"
      << "n_blocks = " << s.n_blocks << "\n"
      << "block_size = " << s.block_size << "\n"
      << "control_key = " << s.control_key.bits() << "\n"
      << "group_size = " << s.group.group_size << "\n"
      << "check_fraction = " << num(s.check_fraction) << "\n"
      << "error_threshold = " << num(s.error_threshold) << "\n"
      << "noise = " << num(s.noise) << "\n"
      << "seed = " << s.seed << "\n"
      << "bootstrap_key_bits = " << s.bootstrap_key_bits << "\n"
      << "permutations =";
    for (const auto& p : s.perms.perms()) o << " " << p.str();
    o << "\n\n[eve]\n"
      << "kind = " << to_string(s.eve.kind) << "\n"
      << "guess_weights =";
    for (double w : s.eve.guess_weights) o << " " << num(w);
    o << "\n";
    if (!s.eve.known_key.empty()) o << "known_key = " << s.eve.known_key.bits() << "\n";
    o << "probe_a = " << num(s.eve.probe_a.x()) << " " << num(s.eve.probe_a.y()) << " "
      << num(s.eve.probe_a.z()) << "\n"
      << "probe_b = " << num(s.eve.probe_b.x()) << " " << num(s.eve.probe_b.y()) << " "
      << num(s.eve.probe_b.z()) << "\n"
      << "pairing = " << to_string(s.eve.pairing) << "\n"
      << "probe_budget = " << s.eve.probe_budget << "\n";
    return o.str();
}

// ---------------------------------------------------------------------------
// Built-in experiments

// Rows for the headline security figures: ideal channel, CORE-guessing
// intercept-resend, Bell probing, an Eve holding the key, and on-site key
// bootstrap.
inline ExperimentSpec reference_table_experiment() {
    ExperimentSpec spec;
    spec.name = "paper-table";
    spec.trials = 4;
    spec.seed = 20031015;
    spec.base.mode = Mode::Keyed;
    spec.base.n_blocks = 6250;  // 25000 pairs per trial, 10^5 per row
    spec.base.check_fraction = 0.5;
    spec.base.error_threshold = 0.1;
    spec.base.control_key = ControlKey::from_bits("0111100100");

    auto point = [&](std::string label, auto&& tweak) {
        SweepPoint p{std::move(label), spec.base, 0};
        tweak(p.session);
        spec.points.push_back(std::move(p));
    };
    point("no-eve", [](SessionConfig&) {});
    point("guess-core", [](SessionConfig& s) { s.eve.kind = EveKind::GuessCore; });
    point("bell-probe", [](SessionConfig& s) {
        s.eve.kind = EveKind::BellProbe;
        s.eve.pairing = ProbePairing::Mismatched;
        s.eve.probe_a = Direction::normalized(1.0, 0.0, 1.0);
        s.eve.probe_b = Direction::normalized(0.0, 1.0, 1.0);
        s.eve.probe_budget = 4;
    });
    point("known-key", [](SessionConfig& s) {
        s.eve.kind = EveKind::KnownKey;
        s.eve.known_key = s.control_key;
    });
    point("bootstrap", [](SessionConfig& s) {
        s.mode = Mode::Bootstrap;
        s.n_blocks = 2500;
    });
    return spec;
}

inline std::optional<ExperimentSpec> builtin_experiment(std::string_view name) {
    if (name == "paper-table") return reference_table_experiment();
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Execution

struct TrialResult {
    double error_rate = 0.0;
    double error_rate_all = 0.0;
    std::optional<double> wrong_guess_error_rate;
    std::optional<double> sift_rate;
    std::optional<double> eve_key_accuracy;
    std::optional<double> probe_mean;
    double key_yield_bits = 0.0;
    bool accepted = false;
};

struct ReportRow {
    std::string experiment;
    std::string point;
    std::string mode;
    std::string eve;
    double noise = 0.0;
    int key_length = 0;
    int n_blocks = 0;
    int trials = 0;
    double error_rate = 0.0, error_rate_se = 0.0;
    double error_rate_all = 0.0, error_rate_all_se = 0.0;
    std::optional<double> wrong_guess_error_rate, wrong_guess_error_rate_se;
    std::optional<double> sift_rate, sift_rate_se;
    double key_yield_bits = 0.0, key_yield_bits_se = 0.0;
    std::optional<double> eve_key_accuracy, eve_key_accuracy_se;
    std::optional<double> probe_mean, probe_mean_se;
    double accept_rate = 0.0;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

inline TrialResult run_trial(const SweepPoint& point, std::uint64_t trial_seed) {
    SessionConfig cfg = point.session;
    cfg.seed = trial_seed;
    if (point.key_length > 0) {
        Rng key_rng(splitmix64(trial_seed ^ 0x6B65795F6C656E67ULL));
        cfg.control_key = ControlKey::random(point.key_length, key_rng);
        if (cfg.eve.kind == EveKind::KnownKey) cfg.eve.known_key = cfg.control_key;
    }
    SessionTranscript t = cfg.mode == Mode::Keyed ? run_keyed_session(cfg)
                                                  : run_bootstrap_session(cfg).transcript;
    TrialResult r;
    r.error_rate = t.stats.error_rate_checked;
    r.error_rate_all = t.stats.error_rate_all;
    r.wrong_guess_error_rate = t.stats.wrong_guess_error_rate;
    r.sift_rate = t.stats.sift_rate;
    r.eve_key_accuracy = t.stats.eve_key_accuracy;
    r.probe_mean = t.stats.probe_mean;
    r.key_yield_bits = static_cast<double>(t.stats.raw_key_bits);
    r.accepted = t.verdict && t.verdict->accepted;
    return r;
}

namespace detail {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

// Mean and standard error from per-trial values (se = 0 for a single trial).
inline MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe m;
    if (xs.empty()) return m;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) m.mean += x;
    m.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return m;
}

inline void aggregate(const std::vector<TrialResult>& trials, auto field, double& mean, double& se) {
    std::vector<double> xs;
    for (const auto& t : trials) xs.push_back(field(t));
    const auto m = mean_se(xs);
    mean = m.mean;
    se = m.se;
}

inline void aggregate_opt(const std::vector<TrialResult>& trials, auto field, std::optional<double>& mean,
                          std::optional<double>& se) {
    std::vector<double> xs;
    for (const auto& t : trials)
        if (const std::optional<double> v = field(t)) xs.push_back(*v);
    if (xs.empty()) return;
    const auto m = mean_se(xs);
    mean = m.mean;
    se = m.se;
}

}  // namespace detail

// Every configured CORE operation must be realizable on the configured device.
inline void check_device(const PermutationSet& perms, const DeviceModel& device) {
    for (const auto& p : perms.perms()) (void)perm_to_schedule(p, device);
}

// Runs every sweep point `spec.trials` times. Trials are independent and may
// run on `jobs` threads; results are aggregated in trial order, so the report
// does not depend on `jobs`.
inline std::vector<ReportRow> run_experiment(const ExperimentSpec& spec, unsigned jobs = 1) {
    spec.validate();
    const auto grid = spec.grid();
    std::vector<ReportRow> rows;
    for (std::size_t pi = 0; pi < grid.size(); ++pi) {
        const auto& point = grid[pi];
        point.session.validate();
        DeviceModel device = spec.device;
        device.block_size = point.session.block_size;
        check_device(point.session.perms, device);

        std::vector<TrialResult> results(static_cast<std::size_t>(spec.trials));
        auto work = [&](std::size_t trial) {
            results[trial] = run_trial(point, derive_seed(spec.seed, pi, trial));
        };
        const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(spec.trials)));
        if (workers == 1) {
            for (std::size_t t = 0; t < results.size(); ++t) work(t);
        } else {
            std::vector<std::exception_ptr> errors(workers);
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t t = w; t < results.size(); t += workers) work(t);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }

        ReportRow row;
        row.experiment = spec.name;
        row.point = point.label;
        row.mode = std::string(to_string(point.session.mode));
        row.eve = std::string(to_string(point.session.eve.kind));
        row.noise = point.session.noise;
        row.key_length = point.key_length > 0 ? point.key_length : point.session.control_key.size();
        row.n_blocks = point.session.n_blocks;
        row.trials = spec.trials;
        using detail::aggregate, detail::aggregate_opt;
        aggregate(results, [](const TrialResult& t) { return t.error_rate; }, row.error_rate, row.error_rate_se);
        aggregate(results, [](const TrialResult& t) { return t.error_rate_all; }, row.error_rate_all,
                  row.error_rate_all_se);
        aggregate_opt(results, [](const TrialResult& t) { return t.wrong_guess_error_rate; },
                      row.wrong_guess_error_rate, row.wrong_guess_error_rate_se);
        aggregate_opt(results, [](const TrialResult& t) { return t.sift_rate; }, row.sift_rate, row.sift_rate_se);
        aggregate(results, [](const TrialResult& t) { return t.key_yield_bits; }, row.key_yield_bits,
                  row.key_yield_bits_se);
        aggregate_opt(results, [](const TrialResult& t) { return t.eve_key_accuracy; }, row.eve_key_accuracy,
                      row.eve_key_accuracy_se);
        aggregate_opt(results, [](const TrialResult& t) { return t.probe_mean; }, row.probe_mean,
                      row.probe_mean_se);
        double accept_se = 0.0;
        aggregate(results, [](const TrialResult& t) { return t.accepted ? 1.0 : 0.0; }, row.accept_rate,
                  accept_se);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Reporting

enum class ReportFormat { Csv, JsonLines };

inline ReportFormat parse_report_format(std::string_view s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "jsonl" || s == "json-lines") return ReportFormat::JsonLines;
    throw Error(ErrorCode::InvalidArgument, "unknown report format '" + std::string(s) + "'");
}

namespace detail {

// Column table shared by the CSV and JSON writers and the CSV reader.
struct Column {
    std::string_view name;
    std::function<std::string(const ReportRow&)> get;        // CSV text
    std::function<nlohmann::ordered_json(const ReportRow&)> json;
    std::function<void(ReportRow&, std::string_view)> set;   // from CSV text
};

inline std::string fmt_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::Parse, "bad number '" + std::string(s) + "' in report");
    return v;
}

inline int parse_int(std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::Parse, "bad integer '" + std::string(s) + "' in report");
    return v;
}

inline const std::vector<Column>& columns() {
    using J = nlohmann::ordered_json;
    static const std::vector<Column> cols = [] {
        std::vector<Column> c;
        auto str = [&c](std::string_view name, std::string ReportRow::*m) {
            c.push_back({name, [m](const ReportRow& r) { return r.*m; },
                         [m](const ReportRow& r) { return J(r.*m); },
                         [m](ReportRow& r, std::string_view s) { r.*m = std::string(s); }});
        };
        auto integer = [&c](std::string_view name, int ReportRow::*m) {
            c.push_back({name, [m](const ReportRow& r) { return std::to_string(r.*m); },
                         [m](const ReportRow& r) { return J(r.*m); },
                         [m](ReportRow& r, std::string_view s) { r.*m = parse_int(s); }});
        };
        auto real = [&c](std::string_view name, double ReportRow::*m) {
            c.push_back({name, [m](const ReportRow& r) { return fmt_double(r.*m); },
                         [m](const ReportRow& r) { return J(r.*m); },
                         [m](ReportRow& r, std::string_view s) { r.*m = parse_double(s); }});
        };
        auto opt = [&c](std::string_view name, std::optional<double> ReportRow::*m) {
            c.push_back({name, [m](const ReportRow& r) { return (r.*m) ? fmt_double(*(r.*m)) : std::string(); },
                         [m](const ReportRow& r) { return (r.*m) ? J(*(r.*m)) : J(nullptr); },
                         [m](ReportRow& r, std::string_view s) {
                             if (s.empty()) r.*m = std::nullopt;
                             else r.*m = parse_double(s);
                         }});
        };
        str("experiment", &ReportRow::experiment);
        str("point", &ReportRow::point);
        str("mode", &ReportRow::mode);
        str("eve", &ReportRow::eve);
        real("noise", &ReportRow::noise);
        integer("key_length", &ReportRow::key_length);
        integer("n_blocks", &ReportRow::n_blocks);
        integer("trials", &ReportRow::trials);
        real("error_rate", &ReportRow::error_rate);
        real("error_rate_se", &ReportRow::error_rate_se);
        real("error_rate_all", &ReportRow::error_rate_all);
        real("error_rate_all_se", &ReportRow::error_rate_all_se);
        opt("wrong_guess_error_rate", &ReportRow::wrong_guess_error_rate);
        opt("wrong_guess_error_rate_se", &ReportRow::wrong_guess_error_rate_se);
        opt("sift_rate", &ReportRow::sift_rate);
        opt("sift_rate_se", &ReportRow::sift_rate_se);
        real("key_yield_bits", &ReportRow::key_yield_bits);
        real("key_yield_bits_se", &ReportRow::key_yield_bits_se);
        opt("eve_key_accuracy", &ReportRow::eve_key_accuracy);
        opt("eve_key_accuracy_se", &ReportRow::eve_key_accuracy_se);
        opt("probe_mean", &ReportRow::probe_mean);
        opt("probe_mean_se", &ReportRow::probe_mean_se);
        real("accept_rate", &ReportRow::accept_rate);
        return c;
    }();
    return cols;
}

}  // namespace detail

inline std::vector<std::string_view> report_columns() {
    std::vector<std::string_view> out;
    for (const auto& c : detail::columns()) out.push_back(c.name);
    return out;
}

inline void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, std::ostream& out) {
    const auto& cols = detail::columns();
    if (format == ReportFormat::Csv) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
        out << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].get(r);
            out << "\n";
        }
    } else {
        for (const auto& r : rows) {
            nlohmann::ordered_json j;
            for (const auto& c : cols) j[std::string(c.name)] = c.json(r);
            out << j.dump() << "\n";
        }
    }
    if (!out) throw Error(ErrorCode::Io, "failed writing report");
}

inline std::string report_string(const std::vector<ReportRow>& rows, ReportFormat format) {
    std::ostringstream o;
    emit_report(rows, format, o);
    return o.str();
}

inline void write_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    try {
        emit_report(rows, format, out);
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "write failed");
    } catch (const Error& e) {
        throw Error(ErrorCode::Io, "'" + path + "': " + e.what());
    }
}

inline std::vector<ReportRow> parse_csv_report(std::string_view text) {
    const auto& cols = detail::columns();
    std::vector<ReportRow> rows;
    std::size_t pos = 0;
    int line_no = 0;
    auto next_line = [&]() -> std::optional<std::string_view> {
        if (pos >= text.size()) return std::nullopt;
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        return line;
    };
    auto split = [](std::string_view line) {
        std::vector<std::string_view> f;
        std::size_t s = 0;
        while (true) {
            const auto c = line.find(',', s);
            f.push_back(line.substr(s, c == std::string_view::npos ? line.npos : c - s));
            if (c == std::string_view::npos) break;
            s = c + 1;
        }
        return f;
    };
    const auto header = next_line();
    if (!header) throw Error(ErrorCode::Parse, "report: missing header");
    const auto names = split(*header);
    if (names.size() != cols.size()) throw Error(ErrorCode::Parse, "report: unexpected header");
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (names[i] != cols[i].name)
            throw Error(ErrorCode::Parse, "report: unexpected column '" + std::string(names[i]) + "'");
    while (const auto line = next_line()) {
        if (line->empty()) continue;
        const auto fields = split(*line);
        if (fields.size() != cols.size())
            throw Error(ErrorCode::Parse, "report line " + std::to_string(line_no) + ": wrong field count");
        ReportRow r;
        for (std::size_t i = 0; i < cols.size(); ++i) cols[i].set(r, fields[i]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace coreqkd
