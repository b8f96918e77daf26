#include "solreg/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "solreg/rng.hpp"

namespace solreg {

double surrogate_diffuse_fraction(double kt, double sunshine_index) {
    const double sig = 1.0 / (1.0 + std::exp(-8.0 * (kt - 0.4)));
    return 0.95 - 0.85 * sig + 0.04 * sunshine_index * (1.0 - kt);
}

Dataset generate_surrogate(std::size_t n, std::uint64_t seed, double noise) {
    if (n < 100) throw std::runtime_error("generate_surrogate: n must be >= 100");
    if (noise < 0.0) throw std::runtime_error("generate_surrogate: noise must be >= 0");

    constexpr double kSolarConstant = 1360.0; // W/m^2

    Rng rng(seed);
    Dataset data;
    data.columns = default_schema();
    data.n = n;
    data.features.reserve(n * Dataset::kNumFeatures);
    data.targets.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double kt = rng.uniform(0.05, 0.85);
        const double cos_z = rng.uniform(0.2, 1.0);
        const double sunshine = std::clamp(kt + 0.3 * rng.uniform(-1.0, 1.0), 0.0, 1.0);

        double kd = surrogate_diffuse_fraction(kt, sunshine);
        if (noise > 0.0) kd = std::clamp(kd + noise * rng.normal(), 0.0, 1.0);

        const double global = kSolarConstant * cos_z * kt;
        // direct-normal analog; beam * cos_z never exceeds global
        const double beam_frac = std::pow(std::max(0.0, (kt - 0.2) / 0.8), 1.5);
        const double beam = kSolarConstant * beam_frac;
        const double k = std::clamp(kt * (0.5 + 0.5 * sunshine), 0.0, 1.0);

        data.features.push_back(global);
        data.features.push_back(beam);
        data.features.push_back(sunshine);
        data.features.push_back(kt);
        data.features.push_back(k);
        data.targets.push_back(kd);
    }
    return data;
}

} // namespace solreg
