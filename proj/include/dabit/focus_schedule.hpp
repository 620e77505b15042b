#pragma once

#include <stdexcept>

namespace dabit {

// Parameters of one synthetic focus shift. The focal point at frame t is
// f0 + t * df_dt (clamped to [0,255]); kernel size ramps linearly from zero
// at the focal-range edge to n_max at the farthest attainable distance.
struct FocusSchedule {
    double f0 = 0.0;       // initial focal depth, [0,255]
    double f_r = 100.0;    // focal range width, same units
    double df_dt = 0.0;    // focus rate per frame
    int n_max = 7;         // maximum odd kernel size
    double sigma = 5.0;    // Gaussian sigma
    int length = 1;        // frames in the local clip
    int ref_count = 0;     // global reference frames

    void validate() const {
        if (n_max < 3 || n_max > 11 || n_max % 2 == 0)
            throw std::invalid_argument("FocusSchedule: n_max must be odd and in [3,11]");
        if (f_r < 0.0)
            throw std::invalid_argument("FocusSchedule: f_r must be non-negative");
        if (length < 1)
            throw std::invalid_argument("FocusSchedule: length must be >= 1");
        if (sigma <= 0.0)
            throw std::invalid_argument("FocusSchedule: sigma must be positive");
        if (ref_count < 0)
            throw std::invalid_argument("FocusSchedule: ref_count must be non-negative");
    }

    bool operator==(const FocusSchedule&) const = default;
};

}  // namespace dabit
