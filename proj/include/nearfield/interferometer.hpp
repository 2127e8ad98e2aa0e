#pragma once

#include "nearfield/decoherence.hpp"
#include "nearfield/gratings.hpp"
#include "nearfield/physics.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace nearfield {

enum class InterferometerMode { spatial, time_domain };

/// Supplies the environmental channels acting at a given longitudinal
/// velocity (collision rates depend on it).
using ChannelProvider = std::function<std::vector<DecoherenceChannel>(double v_z)>;

/// Three equidistant gratings of equal period. Without grating3 the
/// interferometer images the density pattern directly on a surface.
struct InterferometerConfig
{
    GratingSpec grating1;
    GratingSpec grating2;
    std::optional<GratingSpec> grating3;
    double separation = 0.0;  // L, spatial mode
    double pulse_delay = 0.0; // T, time-domain mode
    Species species;
    BeamState beam;
    InterferometerMode mode = InterferometerMode::spatial;
    ChannelProvider environment;
    int grid_size = default_grid_size;
    int j_max = default_j_max;

    void validate() const;
    double period() const { return grating_period(grating2); }
};

} // namespace nearfield
