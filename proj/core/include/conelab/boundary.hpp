#pragma once

#include "conelab/numeric.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace conelab {

enum class SpectrumSource { Circle, Sphere, Custom };

struct BoundaryMode {
    std::string label;
    double eigenvalue = 0.0;
    std::optional<Rational> exact;
    int multiplicity = 1;
};

// Spectrum of the boundary Laplacian (negative convention, 0 = l_0 > l_1 > ...).
// A mode is an index into modes() together with its multiplicity.
class BoundarySpectrum {
public:
    BoundarySpectrum(std::vector<BoundaryMode> modes, int dim_boundary, SpectrumSource source, int sphere_dim = 0);

    const std::vector<BoundaryMode>& modes() const { return modes_; }
    const BoundaryMode& mode(std::size_t j) const { return modes_.at(j); }
    std::size_t size() const { return modes_.size(); }
    int dim_boundary() const { return dim_; }
    SpectrumSource source() const { return source_; }
    int sphere_dimension() const { return sphere_dim_; }
    bool is_exact() const;
    int total_multiplicity() const;

    // Same spectrum keeping only the first count modes.
    BoundarySpectrum truncated(std::size_t count) const;

private:
    std::vector<BoundaryMode> modes_;
    int dim_ = 0;
    SpectrumSource source_ = SpectrumSource::Custom;
    int sphere_dim_ = 0;
};

BoundarySpectrum circle_spectrum(int max_modes);
BoundarySpectrum sphere_spectrum(int d, int max_modes);
BoundarySpectrum custom_spectrum(const std::vector<std::pair<double, int>>& entries, int dim_boundary);

// Cross-section of a one-dimensional cone: a single point.
BoundarySpectrum point_spectrum();

// Natural cross-section for boundary dimension n: point, circle or S^n.
BoundarySpectrum preset_spectrum(int n, int max_modes);

// Dimension of the space of degree-l spherical harmonics on S^d.
long harmonic_dimension(int d, int l);

const char* to_string(SpectrumSource s);

}  // namespace conelab
