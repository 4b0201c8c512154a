// coreqkd: run experiment sweeps, trace a single session, or run the
// acceptance checks.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "acceptance.hpp"
#include "coreqkd/coreqkd.hpp"

using namespace coreqkd;

namespace {

struct RunOptions {
    std::string spec;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    unsigned jobs = 1;
};

struct DemoOptions {
    int blocks = 3;
    std::string eve = "none";
    std::string key = "0111";
    std::string mode = "keyed";
    double noise = 0.0;
    std::uint64_t seed = 1;
};

ExperimentSpec resolve_spec(const std::string& name) {
    const std::string prefix = "builtin:";
    const auto key = name.rfind(prefix, 0) == 0 ? name.substr(prefix.size()) : name;
    if (auto spec = builtin_experiment(key)) return *spec;
    return load_experiment(name);
}

int cmd_run(const RunOptions& o) {
    ExperimentSpec spec = resolve_spec(o.spec);
    if (o.seed) spec.seed = *o.seed;
    const auto format = parse_report_format(o.format.empty() ? spec.format : o.format);
    const auto rows = run_experiment(spec, o.jobs);
    const std::string out = o.out.empty() ? spec.output : o.out;
    if (out.empty() || out == "-")
        emit_report(rows, format, std::cout);
    else
        write_report(rows, format, out);
    return 0;
}

const char* symbol_name(BellSymbol s) {
    switch (s) {
        case BellSymbol::PsiMinus: return "psi-";
        case BellSymbol::PsiPlus: return "psi+";
        case BellSymbol::PhiMinus: return "phi-";
        case BellSymbol::PhiPlus: return "phi+";
    }
    return "?";
}

void print_transcript(const SessionConfig& cfg, const SessionTranscript& t) {
    const auto& perms = cfg.perms;
    std::printf("mode %s, %d blocks, noise %g, eve %s\n", std::string(to_string(t.mode)).c_str(), cfg.n_blocks,
                cfg.noise, std::string(to_string(cfg.eve.kind)).c_str());
    for (std::size_t b = 0; b < t.blocks.size(); ++b) {
        const auto& rec = t.blocks[b];
        std::printf("block %zu: alice E%d (%s), bob E%d", b, rec.alice_op, perms.op(rec.alice_op).perm.str().c_str(),
                    rec.bob_op);
        if (rec.eve_guess) std::printf(", eve guessed E%d", *rec.eve_guess);
        if (rec.alice_op != rec.bob_op) std::printf("  [discarded]");
        std::printf("\n");
        for (const auto& p : t.pairs) {
            if (p.block != b) continue;
            std::printf("  pair %d: alice %-4s bob %-4s", p.position, symbol_name(p.alice), symbol_name(p.bob));
            if (p.eve) std::printf(" eve %-4s", symbol_name(*p.eve));
            if (p.sifted && p.checked) std::printf(" checked");
            if (p.error()) std::printf(" ERROR");
            std::printf("\n");
        }
    }
    if (t.verdict)
        std::printf("check: %zu pairs, error %.4f, threshold %.4f -> %s\n", t.verdict->checked_count,
                    t.verdict->measured_error_rate, t.verdict->threshold,
                    t.verdict->accepted ? "accepted" : "rejected");
    if (t.stats.probe_mean) std::printf("probe mean %.4f\n", *t.stats.probe_mean);
    if (t.verdict && t.verdict->accepted) {
        std::string bits;
        for (auto b : extract_raw_key(t)) bits += static_cast<char>('0' + b);
        std::printf("raw key (%zu bits): %s\n", bits.size(), bits.c_str());
    }
}

int cmd_demo(const DemoOptions& o) {
    SessionConfig cfg;
    cfg.n_blocks = o.blocks;
    cfg.mode = parse_mode(o.mode);
    cfg.control_key = ControlKey::from_bits(o.key);
    cfg.noise = o.noise;
    cfg.seed = o.seed;
    cfg.check_fraction = 0.25;
    cfg.eve.kind = parse_eve_kind(o.eve);
    if (cfg.eve.kind == EveKind::KnownKey) cfg.eve.known_key = cfg.control_key;
    std::printf("control key %s, operations:", cfg.control_key.bits().c_str());
    for (int i = 0; i < 4; ++i) std::printf(" E%d=%s", i, cfg.perms.op(i).perm.str().c_str());
    std::printf("\nswitch schedules:");
    for (int i = 0; i < 4; ++i) {
        std::printf("\n  E%d:", i);
        for (const auto& t : perm_to_schedule(cfg.perms.op(i).perm).triples) std::printf(" %s", to_string(t).c_str());
    }
    std::printf("\n");
    if (cfg.mode == Mode::Keyed) {
        print_transcript(cfg, run_keyed_session(cfg));
    } else {
        const auto r = run_bootstrap_session(cfg);
        print_transcript(cfg, r.transcript);
        if (r.candidate) std::printf("candidate control key: %s\n", r.candidate->bits().c_str());
    }
    return 0;
}

int cmd_selftest() {
    return acceptance::all_passed(acceptance::run_all(std::cout)) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for entanglement-based key distribution with controlled order rearrangement"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment spec and write a report");
    run_cmd->add_option("spec", run.spec, "Experiment config file, or a built-in name (paper-table)")->required();
    run_cmd->add_option("--seed", run.seed, "Override the master seed");
    run_cmd->add_option("--out", run.out, "Report path ('-' for stdout)");
    run_cmd->add_option("--format", run.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl", "json-lines"}));
    run_cmd->add_option("--jobs", run.jobs, "Worker threads")->check(CLI::PositiveNumber);

    DemoOptions demo;
    auto* demo_cmd = app.add_subcommand("demo", "Trace a single short session");
    demo_cmd->add_option("--blocks", demo.blocks, "Blocks to send")->check(CLI::PositiveNumber);
    demo_cmd->add_option("--eve", demo.eve, "none, guess_core, known_key or bell_probe");
    demo_cmd->add_option("--key", demo.key, "Control key bits");
    demo_cmd->add_option("--mode", demo.mode, "keyed or bootstrap");
    demo_cmd->add_option("--noise", demo.noise, "Depolarizing probability")->check(CLI::Range(0.0, 1.0));
    demo_cmd->add_option("--seed", demo.seed, "Session seed");

    auto* self_cmd = app.add_subcommand("selftest", "Run the acceptance checks");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return cmd_run(run);
        if (*demo_cmd) return cmd_demo(demo);
        if (*self_cmd) return cmd_selftest();
    } catch (const Error& e) {
        std::cerr << "coreqkd: " << e.what() << "\n";
        return e.code() == ErrorCode::Parse || e.code() == ErrorCode::InvalidArgument ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "coreqkd: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
