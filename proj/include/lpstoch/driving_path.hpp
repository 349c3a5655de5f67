#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpstoch/lie.hpp"

namespace lpstoch {

enum class ChannelKind { Time, Brownian, Custom };

/// Increments of the k+1 driving channels X^0..X^k on a uniform grid.
/// increments(n, j) is the step-n increment of channel j.
struct DrivingPath {
    double t0 = 0.0;
    double h = 0.0;
    Mat increments;  // N x (k+1)
    std::vector<ChannelKind> kinds;

    int steps() const { return static_cast<int>(increments.rows()); }
    int channels() const { return static_cast<int>(increments.cols()); }
    double time_at(int n) const { return t0 + n * h; }
    double duration() const { return steps() * h; }
};

/// Deterministic stream-seed derivation (splitmix64 on master ^ f(stream)),
/// so per-trial paths do not depend on thread count or schedule.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Channel 0 carries time (increment h per step), channels 1..k independent
/// N(0, h) increments, reproducible from the seed.
DrivingPath make_time_brownian(std::uint64_t seed, double h, int N, int k);

/// Path with user-supplied increment matrix; channel 0 is flagged Time only
/// when it matches h exactly.
DrivingPath make_custom(const Mat& increments, double h, double t0 = 0.0);

/// Sums groups of `factor` consecutive increments; exact path coupling.
DrivingPath coarsen(const DrivingPath& path, int factor);

/// Zeros every channel except channel 0.
DrivingPath zero_noise(const DrivingPath& path);

/// Binary dump: 24-byte header (magic "LPSD", version u32, N u64, k+1 u32,
/// reserved u32), then row-major little-endian f64 increments.
void dump_path(const DrivingPath& path, const std::string& filename);
DrivingPath load_path(const std::string& filename, double h, double t0 = 0.0);

}  // namespace lpstoch
