#include "sonarnet/geometry.hpp"

#include "sonarnet/errors.hpp"
#include "sonarnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace sonarnet {

namespace {

double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace

ArrayGeometry ArrayGeometry::from_positions(const std::array<Vec3, kChannelCount>& positions) {
    for (int i = 0; i < kChannelCount; ++i) {
        const Vec3& p = positions[static_cast<size_t>(i)];
        const double radial = std::sqrt(p.y * p.y + p.z * p.z);
        if (radial > kMaxDiskRadius) {
            throw ArgumentError("microphone " + std::to_string(i) + " outside the " +
                                std::to_string(kMaxDiskRadius) + " m disk (r=" +
                                std::to_string(radial) + ")");
        }
        if (std::abs(p.x) > kMaxAxialOffset) {
            throw ArgumentError("microphone " + std::to_string(i) + " axial offset |x|=" +
                                std::to_string(std::abs(p.x)) + " exceeds " +
                                std::to_string(kMaxAxialOffset) + " m");
        }
    }
    for (int i = 0; i < kChannelCount; ++i) {
        for (int j = i + 1; j < kChannelCount; ++j) {
            const double d = distance(positions[static_cast<size_t>(i)],
                                      positions[static_cast<size_t>(j)]);
            if (d < kMinSpacing) {
                throw ArgumentError("microphones " + std::to_string(i) + " and " +
                                    std::to_string(j) + " closer than " +
                                    std::to_string(kMinSpacing) + " m");
            }
        }
    }
    ArrayGeometry g;
    g.positions_ = positions;
    return g;
}

double ArrayGeometry::aperture() const {
    double best = 0.0;
    for (int i = 0; i < kChannelCount; ++i) {
        for (int j = i + 1; j < kChannelCount; ++j) {
            best = std::max(best, distance(positions_[static_cast<size_t>(i)],
                                           positions_[static_cast<size_t>(j)]));
        }
    }
    return best;
}

ArrayGeometry default_array(uint64_t seed) {
    // Sample inside a slightly smaller disk than the invariant allows so
    // translated copies used in tests stay valid.
    constexpr double kDiskRadius = 0.046;
    constexpr double kAxialSpread = 0.002;

    Rng rng(seed);
    std::array<Vec3, kChannelCount> positions{};
    int placed = 0;
    while (placed < kChannelCount) {
        const double r = kDiskRadius * std::sqrt(rng.uniform());
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        Vec3 candidate{rng.uniform(-kAxialSpread, kAxialSpread),
                       r * std::cos(theta), r * std::sin(theta)};
        bool ok = true;
        for (int i = 0; i < placed; ++i) {
            if (distance(candidate, positions[static_cast<size_t>(i)]) <
                ArrayGeometry::kMinSpacing) {
                ok = false;
                break;
            }
        }
        if (ok) {
            positions[static_cast<size_t>(placed++)] = candidate;
        }
    }
    return ArrayGeometry::from_positions(positions);
}

ArrayGeometry load_geometry(std::istream& in) {
    std::array<Vec3, kChannelCount> positions{};
    int count = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        Vec3 p;
        if (!(fields >> p.x)) continue; // blank or comment-only line
        if (!(fields >> p.y >> p.z)) {
            throw IoError("geometry line " + std::to_string(line_no) +
                          ": expected three coordinates");
        }
        if (count >= kChannelCount) {
            throw IoError("geometry file has more than " +
                          std::to_string(kChannelCount) + " microphones");
        }
        positions[static_cast<size_t>(count++)] = p;
    }
    if (count != kChannelCount) {
        throw IoError("geometry file has " + std::to_string(count) +
                      " microphones, expected " + std::to_string(kChannelCount));
    }
    return ArrayGeometry::from_positions(positions);
}

ArrayGeometry load_geometry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open geometry file: " + path);
    return load_geometry(in);
}

void save_geometry(const ArrayGeometry& g, std::ostream& out) {
    out << "# microphone positions, one per line: x y z (meters)\n";
    out << std::setprecision(17);
    for (const Vec3& p : g.positions()) {
        out << p.x << ' ' << p.y << ' ' << p.z << '\n';
    }
}

void save_geometry_file(const ArrayGeometry& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write geometry file: " + path);
    save_geometry(g, out);
    if (!out.good()) throw IoError("failed writing geometry file: " + path);
}

Direction::Direction(double az, double el) : azimuth(az), elevation(el) {
    constexpr double pi = std::numbers::pi;
    if (!(az >= -pi && az <= pi)) {
        throw ArgumentError("azimuth " + std::to_string(az) + " outside [-pi, pi]");
    }
    if (!(el >= -pi / 2 && el <= pi / 2)) {
        throw ArgumentError("elevation " + std::to_string(el) + " outside [-pi/2, pi/2]");
    }
}

Vec3 Direction::unit() const {
    const double ce = std::cos(elevation);
    return Vec3{ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation)};
}

const char* to_string(GridKind kind) {
    switch (kind) {
        case GridKind::horizontal90: return "horizontal90";
        case GridKind::box1850: return "box1850";
        case GridKind::hemisphere3000: return "hemisphere3000";
        case GridKind::custom: return "custom";
    }
    return "unknown";
}

GridKind grid_kind_from_string(const std::string& name) {
    if (name == "horizontal90") return GridKind::horizontal90;
    if (name == "box1850") return GridKind::box1850;
    if (name == "hemisphere3000") return GridKind::hemisphere3000;
    if (name == "custom") return GridKind::custom;
    throw ConfigError("unknown direction grid kind: " + name);
}

DirectionSet direction_grid(GridKind kind) {
    constexpr double pi = std::numbers::pi;
    DirectionSet set;
    set.kind = kind;
    switch (kind) {
        case GridKind::horizontal90: {
            constexpr int n = 90;
            set.directions.reserve(n);
            for (int k = 0; k < n; ++k) {
                const double az = -pi / 2 + pi * static_cast<double>(k) / (n - 1);
                set.directions.emplace_back(az, 0.0);
            }
            break;
        }
        case GridKind::box1850: {
            constexpr int n_az = 50;
            constexpr int n_el = 37;
            set.directions.reserve(n_az * n_el);
            for (int e = 0; e < n_el; ++e) {
                const double el = -pi / 4 + (pi / 2) * static_cast<double>(e) / (n_el - 1);
                for (int a = 0; a < n_az; ++a) {
                    const double az = -pi / 4 + (pi / 2) * static_cast<double>(a) / (n_az - 1);
                    set.directions.emplace_back(az, el);
                }
            }
            break;
        }
        case GridKind::hemisphere3000: {
            // Fibonacci lattice on the forward hemisphere: forward component
            // u = (i + 0.5)/n, spiral angle at the golden step around it.
            constexpr int n = 3000;
            const double golden_angle = pi * (3.0 - std::sqrt(5.0));
            set.directions.reserve(n);
            for (int i = 0; i < n; ++i) {
                const double x = (static_cast<double>(i) + 0.5) / n;
                const double r = std::sqrt(1.0 - x * x);
                const double phi = golden_angle * static_cast<double>(i);
                const double y = r * std::cos(phi);
                const double z = r * std::sin(phi);
                const double az = std::atan2(y, x);
                const double el = std::asin(std::clamp(z, -1.0, 1.0));
                set.directions.emplace_back(az, el);
            }
            std::sort(set.directions.begin(), set.directions.end(),
                      [](const Direction& a, const Direction& b) {
                          if (a.elevation != b.elevation) return a.elevation < b.elevation;
                          return a.azimuth < b.azimuth;
                      });
            break;
        }
        case GridKind::custom:
            throw ConfigError("direction_grid: custom grids are built from explicit lists");
    }
    return set;
}

void save_directions_csv(const DirectionSet& set, std::ostream& out) {
    out << "azimuth_rad,elevation_rad\n";
    out << std::setprecision(17);
    for (const Direction& d : set.directions) {
        out << d.azimuth << ',' << d.elevation << '\n';
    }
}

std::array<int32_t, kChannelCount> steering_delays(const ArrayGeometry& geometry,
                                                   const Direction& direction,
                                                   double speed_of_sound,
                                                   double sample_rate) {
    if (speed_of_sound <= 0.0) throw ArgumentError("speed_of_sound must be > 0");
    if (sample_rate <= 0.0) throw ArgumentError("sample_rate must be > 0");

    const Vec3 u = direction.unit();
    std::array<double, kChannelCount> raw{};
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kChannelCount; ++i) {
        raw[static_cast<size_t>(i)] = dot(geometry.position(i), u) / speed_of_sound;
        lo = std::min(lo, raw[static_cast<size_t>(i)]);
    }
    std::array<int32_t, kChannelCount> delays{};
    for (int i = 0; i < kChannelCount; ++i) {
        delays[static_cast<size_t>(i)] = static_cast<int32_t>(
            std::llround((raw[static_cast<size_t>(i)] - lo) * sample_rate));
    }
    return delays;
}

int32_t steering_reference_advance(const ArrayGeometry& geometry,
                                   const Direction& direction,
                                   double speed_of_sound,
                                   double sample_rate) {
    if (speed_of_sound <= 0.0) throw ArgumentError("speed_of_sound must be > 0");
    if (sample_rate <= 0.0) throw ArgumentError("sample_rate must be > 0");

    const Vec3 u = direction.unit();
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kChannelCount; ++i) {
        lo = std::min(lo, dot(geometry.position(i), u) / speed_of_sound);
    }
    return static_cast<int32_t>(std::llround(-lo * sample_rate));
}

} // namespace sonarnet
