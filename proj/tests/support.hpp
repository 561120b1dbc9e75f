#pragma once

// Shared test helpers: seeded generators for property tests and fixture paths.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dlmem/cells.hpp"
#include "dlmem/memory.hpp"

namespace dlmem::test {

inline std::string fixture(const std::string& name) { return std::string(DLMEM_FIXTURE_DIR) + "/" + name; }

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::int64_t integer64(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    /// Random program: each trip writes with probability 1/2 and reads a random subset.
    MemoryProgram program(int n, int max_trips) {
        MemoryProgram p;
        const int trips = integer(1, max_trips);
        for (int t = 0; t < trips; ++t) {
            TripOps ops;
            if (coin()) ops.write = WriteOp{integer(0, n - 1), integer(0, 1)};
            for (int k = 0; k < n; ++k)
                if (coin(0.4)) ops.reads.push_back(k);
            p.trips.push_back(std::move(ops));
        }
        return p;
    }

    /// Random valid model: increasing ratios straddling 1.0, strictly decreasing delays.
    BiasDelayModel delay_model() {
        const int below = integer(1, 3);
        const int above = integer(1, 3);
        std::vector<double> ratios;
        double r = 1.0;
        for (int i = 0; i < below; ++i) ratios.insert(ratios.begin(), r -= real(0.02, 0.15));
        ratios.push_back(1.0);
        r = 1.0;
        for (int i = 0; i < above; ++i) ratios.push_back(r += real(0.02, 0.15));
        std::vector<BiasKnot> knots;
        std::int64_t d = integer64(30000, 40000);
        for (double x : ratios) {
            knots.push_back({x, Femtoseconds{d}});
            d -= integer64(1, 4000);
        }
        return BiasDelayModel(knots);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// A program that writes a 1 in the first trip and lets it recirculate for
/// at least three more trips.
struct RetimingTrial {
    MemoryConfig cfg;
    MemoryProgram program;
};

inline RetimingTrial retiming_trial(Gen& g) {
    static const double freqs[] = {20e9, 50e9, 75e9, 100e9};
    RetimingTrial t;
    const int n = g.integer(2, 6);
    t.cfg.base.frequency_hz = freqs[g.integer(0, 3)];
    t.cfg.base.num_addresses = n;
    // Address 0 follows the trip header and has extra hold room, so the
    // tracked bit sits at a later slot and is never overwritten.
    const int addr = g.integer(1, n - 1);
    t.program = g.program(n, 4);
    for (auto& trip : t.program.trips)
        if (trip.write && trip.write->address == addr) trip.write.reset();
    t.program.trips.front().write = WriteOp{addr, 1};
    std::vector<int> all;
    for (int k = 0; k < n; ++k) all.push_back(k);
    const int tail = g.integer(3, 5);
    for (int i = 0; i < tail; ++i) t.program.trips.push_back({std::nullopt, all});
    return t;
}

/// Per-trip jitter vector long enough to cover every loop entry.
inline std::vector<Femtoseconds> jitter_for(const MemoryProgram& p, const std::function<Femtoseconds()>& draw) {
    std::vector<Femtoseconds> out;
    for (std::size_t i = 0; i < p.trips.size() + 2; ++i) out.push_back(draw());
    return out;
}

} // namespace dlmem::test
