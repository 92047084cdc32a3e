#pragma once

namespace conelab {

// Reference cut-off: 1 on [0, 1/4], 0 on [3/4, inf), degree-9 smoothstep in
// between (C^4 at both joins).
double cutoff(double t);

// k-th derivative of the cut-off, 0 <= k <= 4.
double cutoff_derivative(double t, int k);

inline constexpr double kCutoffInner = 0.25;
inline constexpr double kCutoffOuter = 0.75;

}  // namespace conelab
