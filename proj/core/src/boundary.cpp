#include "conelab/boundary.hpp"
#include "conelab/error.hpp"

#include <cmath>

namespace conelab {

namespace {

long binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

BoundarySpectrum::BoundarySpectrum(std::vector<BoundaryMode> modes, int dim_boundary, SpectrumSource source, int sphere_dim)
    : modes_(std::move(modes)), dim_(dim_boundary), source_(source), sphere_dim_(sphere_dim) {
    if (modes_.empty()) throw Error(ErrorCode::InvalidInput, "boundary", "spectrum has no modes");
    if (dim_ < 0) throw Error(ErrorCode::InvalidInput, "boundary", "negative boundary dimension");
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const auto& m = modes_[i];
        if (m.eigenvalue > 0.0) {
            throw Error(ErrorCode::PositiveEigenvalue, "boundary",
                        "eigenvalue " + std::to_string(m.eigenvalue) + " of mode " + std::to_string(i) + " is positive");
        }
        if (m.multiplicity < 1) throw Error(ErrorCode::InvalidInput, "boundary", "multiplicity must be positive");
        if (i > 0 && !(m.eigenvalue < modes_[i - 1].eigenvalue)) {
            throw Error(ErrorCode::NonMonotone, "boundary", "eigenvalues must be strictly decreasing");
        }
    }
}

bool BoundarySpectrum::is_exact() const {
    for (const auto& m : modes_)
        if (!m.exact) return false;
    return true;
}

int BoundarySpectrum::total_multiplicity() const {
    int s = 0;
    for (const auto& m : modes_) s += m.multiplicity;
    return s;
}

BoundarySpectrum BoundarySpectrum::truncated(std::size_t count) const {
    std::vector<BoundaryMode> m(modes_.begin(), modes_.begin() + static_cast<std::ptrdiff_t>(std::min(count, modes_.size())));
    return BoundarySpectrum(std::move(m), dim_, source_, sphere_dim_);
}

BoundarySpectrum circle_spectrum(int max_modes) {
    if (max_modes < 1) throw Error(ErrorCode::InvalidInput, "boundary", "max_modes must be >= 1");
    std::vector<BoundaryMode> modes;
    for (int k = 0; k < max_modes; ++k) {
        Rational ev(-static_cast<long>(k) * k);
        modes.push_back({"k=" + std::to_string(k), to_double(ev), ev, k == 0 ? 1 : 2});
    }
    return BoundarySpectrum(std::move(modes), 1, SpectrumSource::Circle);
}

long harmonic_dimension(int d, int l) {
    if (l < 0) return 0;
    return binomial(l + d, d) - binomial(l + d - 2, d);
}

BoundarySpectrum sphere_spectrum(int d, int max_modes) {
    if (d < 2) throw Error(ErrorCode::InvalidInput, "boundary", "sphere dimension must be >= 2");
    if (max_modes < 1) throw Error(ErrorCode::InvalidInput, "boundary", "max_modes must be >= 1");
    std::vector<BoundaryMode> modes;
    for (int l = 0; l < max_modes; ++l) {
        Rational ev(-static_cast<long>(l) * (l + d - 1));
        modes.push_back({"l=" + std::to_string(l), to_double(ev), ev, static_cast<int>(harmonic_dimension(d, l))});
    }
    return BoundarySpectrum(std::move(modes), d, SpectrumSource::Sphere, d);
}

BoundarySpectrum custom_spectrum(const std::vector<std::pair<double, int>>& entries, int dim_boundary) {
    std::vector<BoundaryMode> modes;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [ev, mult] = entries[i];
        BoundaryMode m{"j=" + std::to_string(i), ev, std::nullopt, mult};
        // integral values are kept exact so that integer pole locations stay exact
        if (std::isfinite(ev) && ev == std::floor(ev) && std::abs(ev) < 9.0e15) m.exact = Rational(static_cast<long long>(ev));
        modes.push_back(std::move(m));
    }
    return BoundarySpectrum(std::move(modes), dim_boundary, SpectrumSource::Custom);
}

BoundarySpectrum point_spectrum() {
    std::vector<BoundaryMode> modes{{"j=0", 0.0, Rational(0), 1}};
    return BoundarySpectrum(std::move(modes), 0, SpectrumSource::Custom);
}

BoundarySpectrum preset_spectrum(int n, int max_modes) {
    if (n == 0) return point_spectrum();
    if (n == 1) return circle_spectrum(max_modes);
    return sphere_spectrum(n, max_modes);
}

const char* to_string(SpectrumSource s) {
    switch (s) {
        case SpectrumSource::Circle: return "circle";
        case SpectrumSource::Sphere: return "sphere";
        case SpectrumSource::Custom: return "custom";
    }
    return "custom";
}

}  // namespace conelab
