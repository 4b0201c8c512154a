// device.hpp
// Discrete-time model of the three-switch, single-delay-loop rearrangement
// device, and the search that maps a permutation back to a switch schedule.
//
// Geometry (DeviceModel):
//   lower line --> [s1] --up--> straight arm ----------------------> output
//                    |down                                       ^
//                    v                                           |
//               delay loop (loop_delay slots) --> [s2] --up--> [s3] --down
//                    ^                             |down          |up
//                    +-----------------------------+              v
//                                                              (dropped)
//
// Each particle carries its own switch triple. Particle k reaches s1 at
// time k. A particle on the straight arm is emitted at its arrival time. A
// particle entering the loop meets s2 after every full circuit; s2=down sends
// it round again, and since its setting does not change it never leaves
// (STUCK). On leaving the loop it meets s3: down merges into the output,
// up deflects it away and it is never emitted (also STUCK).
// The rest position (up, up, down) is the straight path.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core_ops.hpp"
#include "error.hpp"

namespace coreqkd {

enum class Switch : std::uint8_t { Up, Down };

struct SwitchTriple {
    Switch s1 = Switch::Up;
    Switch s2 = Switch::Up;
    Switch s3 = Switch::Down;

    friend bool operator==(const SwitchTriple&, const SwitchTriple&) = default;
};

inline constexpr SwitchTriple kRestTriple{Switch::Up, Switch::Up, Switch::Down};

inline std::string to_string(const SwitchTriple& t) {
    auto s = [](Switch x) { return x == Switch::Up ? "up" : "down"; };
    return std::string("(") + s(t.s1) + "," + s(t.s2) + "," + s(t.s3) + ")";
}

struct SwitchSchedule {
    std::vector<SwitchTriple> triples;  // one per block position, in arrival order

    int size() const noexcept { return static_cast<int>(triples.size()); }
    friend bool operator==(const SwitchSchedule&, const SwitchSchedule&) = default;
};

inline SwitchSchedule rest_schedule(int block_size) {
    return SwitchSchedule{std::vector<SwitchTriple>(block_size, kRestTriple)};
}

// E1 as given for the physical device: (down,up,down), (up,down,up),
// (up,down,down), (up,down,up).
inline SwitchSchedule reference_e1_schedule() {
    using enum Switch;
    return SwitchSchedule{{{Down, Up, Down}, {Up, Down, Up}, {Up, Down, Down}, {Up, Down, Up}}};
}

struct DeviceModel {
    int block_size = kDefaultBlockSize;
    int loop_delay = kDefaultBlockSize;  // slots per loop circuit
    int delay_budget = 2 * kDefaultBlockSize;  // max per-particle latency for perm_to_schedule

    void validate() const {
        require(block_size >= 1 && block_size <= 6, "device block_size must be 1..6");
        require(loop_delay >= 1, "loop_delay must be >= 1");
        require(delay_budget >= 0, "delay_budget must be >= 0");
    }
};

struct DeviceTrace {
    Permutation perm;               // output position -> input particle
    std::vector<int> emit_time;     // per input particle
    int max_latency = 0;            // max(emit_time[k] - k)
};

// Discrete-time routing of one block through the device.
inline DeviceTrace route(const SwitchSchedule& schedule, const DeviceModel& device) {
    device.validate();
    const int n = device.block_size;
    require(schedule.size() == n, "schedule length must equal block size");

    enum class Where { Waiting, Straight, Loop, Emitted, Dropped };
    struct Particle {
        Where where = Where::Waiting;
        int loop_pos = 0;
        int emit = -1;
    };
    std::vector<Particle> ps(n);

    // Every particle either leaves within one circuit of arriving or is
    // recirculating forever; this horizon separates the two.
    const int horizon = n + 2 * device.loop_delay + 1;
    for (int t = 0; t <= horizon; ++t) {
        std::vector<int> emitted_now;
        // Advance particles already in the loop.
        for (int k = 0; k < n; ++k) {
            auto& p = ps[k];
            if (p.where != Where::Loop) continue;
            if (++p.loop_pos < device.loop_delay) continue;
            const auto& sw = schedule.triples[k];
            if (sw.s2 == Switch::Down) {
                p.loop_pos = 0;
            } else if (sw.s3 == Switch::Down) {
                p.where = Where::Emitted;
                p.emit = t;
                emitted_now.push_back(k);
            } else {
                p.where = Where::Dropped;
            }
        }
        // Arrival at s1.
        if (t < n) {
            auto& p = ps[t];
            if (schedule.triples[t].s1 == Switch::Up) {
                p.where = Where::Emitted;
                p.emit = t;
                emitted_now.push_back(t);
            } else {
                p.where = Where::Loop;
                p.loop_pos = 0;
            }
        }
        if (emitted_now.size() > 1)
            throw Error(ErrorCode::Collision, "particles " + std::to_string(emitted_now[0]) + " and " +
                                                  std::to_string(emitted_now[1]) +
                                                  " reach the output at t=" + std::to_string(t));
        // Loop cells hold one particle each.
        std::vector<int> cell(device.loop_delay, -1);
        for (int k = 0; k < n; ++k) {
            if (ps[k].where != Where::Loop) continue;
            int& c = cell[ps[k].loop_pos];
            if (c >= 0)
                throw Error(ErrorCode::Collision, "particles " + std::to_string(c) + " and " +
                                                      std::to_string(k) + " share a loop cell at t=" +
                                                      std::to_string(t));
            c = k;
        }
    }

    DeviceTrace trace;
    trace.emit_time.resize(n);
    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) {
        if (ps[k].where != Where::Emitted)
            throw Error(ErrorCode::Stuck, "particle " + std::to_string(k) + " is never emitted");
        trace.emit_time[k] = ps[k].emit;
        trace.max_latency = std::max(trace.max_latency, ps[k].emit - k);
        order[k] = k;
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return trace.emit_time[a] < trace.emit_time[b]; });
    trace.perm = Permutation(std::move(order));
    return trace;
}

inline Permutation schedule_to_perm(const SwitchSchedule& schedule, const DeviceModel& device = {}) {
    return route(schedule, device).perm;
}

// Bounded search over all 8^n schedules. Among those inducing `perm` with
// latency within the delay budget, returns the one with the fewest switches
// away from the rest triple (ties: lexicographic).
inline SwitchSchedule perm_to_schedule(const Permutation& perm, const DeviceModel& device = {}) {
    device.validate();
    const int n = device.block_size;
    require(perm.size() == n, "permutation size must equal block size");

    // Triples ordered so that index 0 is the rest position.
    std::array<SwitchTriple, 8> triples{};
    for (int code = 0; code < 8; ++code) {
        const int c = code ^ 0b001;  // bit order (s1,s2,s3); s3 rest is Down
        triples[code] = SwitchTriple{(c & 4) ? Switch::Down : Switch::Up,
                                     (c & 2) ? Switch::Down : Switch::Up,
                                     (c & 1) ? Switch::Down : Switch::Up};
    }
    auto distance = [](const SwitchTriple& t) {
        return (t.s1 != kRestTriple.s1) + (t.s2 != kRestTriple.s2) + (t.s3 != kRestTriple.s3);
    };

    std::optional<SwitchSchedule> best;
    int best_cost = std::numeric_limits<int>::max();
    std::uint64_t total = 1;
    for (int k = 0; k < n; ++k) total *= 8;
    SwitchSchedule cand{std::vector<SwitchTriple>(n)};
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        int cost = 0;
        for (int k = n - 1; k >= 0; --k) {
            cand.triples[k] = triples[c % 8];
            cost += distance(cand.triples[k]);
            c /= 8;
        }
        if (cost >= best_cost) continue;
        try {
            const auto trace = route(cand, device);
            if (trace.perm == perm && trace.max_latency <= device.delay_budget) {
                best = cand;
                best_cost = cost;
            }
        } catch (const Error&) {
            // collisions and stuck particles are simply not candidates
        }
    }
    if (!best)
        throw Error(ErrorCode::Unrealizable, "permutation " + perm.str() +
                                                 " is not realizable within a delay budget of " +
                                                 std::to_string(device.delay_budget) + " slots");
    return *best;
}

}  // namespace coreqkd
