#pragma once

namespace fogpon {

/// Objective weights: alpha scales total power consumption, beta total
/// end-to-end queuing delay.
struct Weights {
    double alpha = 1.0;
    double beta = 0.0;
};

inline Weights power_aware_weights() { return {1.0, 0.0}; }
inline Weights delay_aware_weights() { return {1e-6, 1.0}; }

} // namespace fogpon
