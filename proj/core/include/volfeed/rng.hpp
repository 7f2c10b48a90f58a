#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace volfeed {

// splitmix64 finalizer; used to derive independent substream seeds from a
// single user seed so that path i is reproducible regardless of thread
// scheduling.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d49b5b549f5b45ULL;
    return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 1));
}

// One pair of standard normal shocks with Corr(eps_d, eps_x) = rho_dx,
// realized as eps_d = rho * z_x + sqrt(1 - rho^2) * z_d.
struct correlated_shocks {
    double eps_d = 0.0;
    double eps_x = 0.0;
};

// Normal generator over a dedicated substream. std::mt19937_64 raw output is
// fully specified by the standard; the Box-Muller transform below is written
// out explicitly so the byte stream never depends on the standard library's
// unspecified std::normal_distribution algorithm.
class normal_stream {
public:
    explicit normal_stream(std::uint64_t seed) : engine_(seed) {}

    normal_stream(std::uint64_t seed, std::uint64_t stream)
        : engine_(substream_seed(seed, stream)) {}

    // One Box-Muller pair per two uniforms; no state is cached across calls
    // so draw order is exactly two normals per invocation.
    void pair(double& z0, double& z1) {
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi * u2;
        z0 = m * std::cos(a);
        z1 = m * std::sin(a);
    }

    double next() {
        double z0, z1;
        pair(z0, z1);
        return z0;  // second draw discarded; used only where one is needed
    }

    correlated_shocks correlated_pair(double rho_dx) {
        double zx, zd;
        pair(zx, zd);
        return correlated_shocks{
            rho_dx * zx + std::sqrt(1.0 - rho_dx * rho_dx) * zd, zx};
    }

private:
    static constexpr double pi = 3.14159265358979323846;

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform_open() {  // (0, 1]; safe under log()
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
};

}  // namespace volfeed
