#include "lpstoch/driving_path.hpp"

#include <cstdio>
#include <cstring>
#include <random>
#include <stdexcept>

namespace lpstoch {

static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

DrivingPath make_time_brownian(std::uint64_t seed, double h, int N, int k) {
    if (h <= 0.0) throw std::invalid_argument("make_time_brownian: h must be positive");
    if (N < 1) throw std::invalid_argument("make_time_brownian: N must be >= 1");
    if (k < 0) throw std::invalid_argument("make_time_brownian: k must be >= 0");
    DrivingPath p;
    p.h = h;
    p.increments = Mat(N, k + 1);
    p.increments.col(0).setConstant(h);
    p.kinds.assign(k + 1, ChannelKind::Brownian);
    p.kinds[0] = ChannelKind::Time;
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, std::sqrt(h));
    for (int n = 0; n < N; ++n)
        for (int j = 1; j <= k; ++j) p.increments(n, j) = gauss(rng);
    return p;
}

DrivingPath make_custom(const Mat& increments, double h, double t0) {
    if (h <= 0.0) throw std::invalid_argument("make_custom: h must be positive");
    if (increments.rows() < 1 || increments.cols() < 1)
        throw std::invalid_argument("make_custom: empty increment matrix");
    DrivingPath p;
    p.t0 = t0;
    p.h = h;
    p.increments = increments;
    p.kinds.assign(increments.cols(), ChannelKind::Custom);
    if ((increments.col(0).array() == h).all()) p.kinds[0] = ChannelKind::Time;
    return p;
}

DrivingPath coarsen(const DrivingPath& path, int factor) {
    if (factor < 1 || path.steps() % factor != 0)
        throw std::invalid_argument("coarsen: factor must divide the step count");
    if (factor == 1) return path;
    DrivingPath out;
    out.t0 = path.t0;
    out.h = path.h * factor;
    out.kinds = path.kinds;
    const int N = path.steps() / factor;
    out.increments = Mat::Zero(N, path.channels());
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < factor; ++m) out.increments.row(n) += path.increments.row(n * factor + m);
    return out;
}

DrivingPath zero_noise(const DrivingPath& path) {
    DrivingPath out = path;
    for (int j = 1; j < out.channels(); ++j) out.increments.col(j).setZero();
    return out;
}

namespace {
constexpr char kMagic[4] = {'L', 'P', 'S', 'D'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void dump_path(const DrivingPath& path, const std::string& filename) {
    std::FILE* f = std::fopen(filename.c_str(), "wb");
    if (!f) throw std::runtime_error("dump_path: cannot open " + filename);
    const std::uint64_t N = static_cast<std::uint64_t>(path.steps());
    const std::uint32_t kp1 = static_cast<std::uint32_t>(path.channels());
    const std::uint32_t reserved = 0;
    bool ok = std::fwrite(kMagic, 1, 4, f) == 4;
    ok = ok && std::fwrite(&kVersion, sizeof kVersion, 1, f) == 1;
    ok = ok && std::fwrite(&N, sizeof N, 1, f) == 1;
    ok = ok && std::fwrite(&kp1, sizeof kp1, 1, f) == 1;
    ok = ok && std::fwrite(&reserved, sizeof reserved, 1, f) == 1;
    for (int n = 0; n < path.steps() && ok; ++n)
        for (int j = 0; j < path.channels() && ok; ++j) {
            const double v = path.increments(n, j);
            ok = std::fwrite(&v, sizeof v, 1, f) == 1;
        }
    std::fclose(f);
    if (!ok) throw std::runtime_error("dump_path: write failed for " + filename);
}

DrivingPath load_path(const std::string& filename, double h, double t0) {
    std::FILE* f = std::fopen(filename.c_str(), "rb");
    if (!f) throw std::runtime_error("load_path: cannot open " + filename);
    char magic[4];
    std::uint32_t version = 0, kp1 = 0, reserved = 0;
    std::uint64_t N = 0;
    bool ok = std::fread(magic, 1, 4, f) == 4 && std::memcmp(magic, kMagic, 4) == 0;
    ok = ok && std::fread(&version, sizeof version, 1, f) == 1 && version == kVersion;
    ok = ok && std::fread(&N, sizeof N, 1, f) == 1;
    ok = ok && std::fread(&kp1, sizeof kp1, 1, f) == 1;
    ok = ok && std::fread(&reserved, sizeof reserved, 1, f) == 1;
    if (!ok) {
        std::fclose(f);
        throw std::runtime_error("load_path: bad header in " + filename);
    }
    Mat inc(static_cast<int>(N), static_cast<int>(kp1));
    for (std::uint64_t n = 0; n < N && ok; ++n)
        for (std::uint32_t j = 0; j < kp1 && ok; ++j) {
            double v;
            ok = std::fread(&v, sizeof v, 1, f) == 1;
            inc(static_cast<int>(n), static_cast<int>(j)) = v;
        }
    std::fclose(f);
    if (!ok) throw std::runtime_error("load_path: truncated data in " + filename);
    return make_custom(inc, h, t0);
}

}  // namespace lpstoch
