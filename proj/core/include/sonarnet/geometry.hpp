#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sonarnet {

inline constexpr int kChannelCount = 32;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

// Positions of the 32 microphones in the sensor frame:
// x = boresight (forward), y = left, z = up. Units are meters.
// The microphones sit near the x = 0 plane inside a 0.05 m radius disk.
class ArrayGeometry {
public:
    static constexpr double kMaxDiskRadius = 0.05;  // y-z plane, meters
    static constexpr double kMaxAxialOffset = 0.005; // |x|, meters
    static constexpr double kMinSpacing = 0.004;     // pairwise, meters

    // Validates the invariants above; throws ArgumentError on violation.
    static ArrayGeometry from_positions(const std::array<Vec3, kChannelCount>& positions);

    const std::array<Vec3, kChannelCount>& positions() const { return positions_; }
    const Vec3& position(int channel) const { return positions_[static_cast<size_t>(channel)]; }

    // Largest pairwise microphone distance, meters.
    double aperture() const;

private:
    ArrayGeometry() = default;
    std::array<Vec3, kChannelCount> positions_{};
};

// Deterministic pseudo-random layout: rejection sampling inside the disk
// until the minimum-spacing constraint holds. Same seed, same layout.
ArrayGeometry default_array(uint64_t seed);

// Plain text format: one "x y z" line per microphone, '#' comments allowed.
ArrayGeometry load_geometry(std::istream& in);
ArrayGeometry load_geometry_file(const std::string& path);
void save_geometry(const ArrayGeometry& g, std::ostream& out);
void save_geometry_file(const ArrayGeometry& g, const std::string& path);

// One steering target. Azimuth in [-pi, pi], elevation in [-pi/2, pi/2].
struct Direction {
    double azimuth = 0.0;
    double elevation = 0.0;

    Direction() = default;
    Direction(double az, double el);

    // (cos el cos az, cos el sin az, sin el); unit length by construction.
    Vec3 unit() const;
};

enum class GridKind { horizontal90, box1850, hemisphere3000, custom };

const char* to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& name);

struct DirectionSet {
    GridKind kind = GridKind::custom;
    std::vector<Direction> directions;

    size_t size() const { return directions.size(); }
    const Direction& operator[](size_t i) const { return directions[i]; }
};

// horizontal90: 90 azimuths uniform over [-pi/2, pi/2], elevation 0.
// box1850: 50 x 37 uniform azimuth/elevation grid over [-pi/4, pi/4]^2.
// hemisphere3000: Fibonacci lattice on the forward (x >= 0) hemisphere,
// sorted by (elevation, azimuth). Throws ConfigError for GridKind::custom.
DirectionSet direction_grid(GridKind kind);

// CSV with header "azimuth_rad,elevation_rad".
void save_directions_csv(const DirectionSet& set, std::ostream& out);

// Far-field plane-wave steering delays, one per channel, in samples at
// sample_rate. The raw per-channel delay compensates the earlier arrival of
// microphones closer to the source (projection onto the direction's unit
// vector over the speed of sound); the profile is shifted so min == 0 and
// rounded to the nearest sample.
std::array<int32_t, kChannelCount> steering_delays(const ArrayGeometry& geometry,
                                                   const Direction& direction,
                                                   double speed_of_sound,
                                                   double sample_rate);

// Common advance, in samples at sample_rate, that the min-zero shift above
// added relative to the array origin. Beamforming subtracts it again so
// that beamformed time stays referenced to the origin (absolute range).
int32_t steering_reference_advance(const ArrayGeometry& geometry,
                                   const Direction& direction,
                                   double speed_of_sound,
                                   double sample_rate);

} // namespace sonarnet
