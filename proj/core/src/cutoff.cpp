#include "conelab/cutoff.hpp"

#include <array>

namespace conelab {

namespace {

// S(s) = 126 s^5 - 420 s^6 + 540 s^7 - 315 s^8 + 70 s^9
constexpr std::array<double, 10> kStep = {0, 0, 0, 0, 0, 126, -420, 540, -315, 70};

double step_derivative(double s, int k) {
    double acc = 0.0;
    for (int i = static_cast<int>(kStep.size()) - 1; i >= k; --i) {
        double c = kStep[static_cast<std::size_t>(i)];
        for (int j = 0; j < k; ++j) c *= static_cast<double>(i - j);
        acc = acc * s + c;
    }
    return acc;
}

}  // namespace

double cutoff(double t) { return cutoff_derivative(t, 0); }

double cutoff_derivative(double t, int k) {
    if (t <= kCutoffInner) return k == 0 ? 1.0 : 0.0;
    if (t >= kCutoffOuter) return 0.0;
    const double width = kCutoffOuter - kCutoffInner;
    const double s = (t - kCutoffInner) / width;
    double scale = 1.0;
    for (int j = 0; j < k; ++j) scale /= width;
    const double v = step_derivative(s, k) * scale;
    return k == 0 ? 1.0 - v : -v;
}

}  // namespace conelab
