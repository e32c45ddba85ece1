#pragma once

// Per-drop geometry: 19-cell hexagonal macro layout, macro user drops,
// buildings with one centred femto BS each, and indoor femto users.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "femtopc/config.hpp"
#include "femtopc/random.hpp"

namespace femtopc {

struct Point {
    double x = 0.0;
    double y = 0.0;

    constexpr bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Flat-topped hexagon of circumradius r centred at c (vertices at 0, 60, ... deg).
inline bool hex_contains(Point c, double r, Point p)
{
    const double dx = std::abs(p.x - c.x);
    const double dy = std::abs(p.y - c.y);
    const double apothem = std::numbers::sqrt3 / 2.0 * r;
    constexpr double eps = 1e-9;
    return dy <= apothem + eps && std::numbers::sqrt3 * dx + dy <= std::numbers::sqrt3 * r + eps;
}

struct MacroLayout {
    std::vector<Point> bs_positions;
    double cell_radius = 0.0;

    std::size_t size() const { return bs_positions.size(); }

    bool cell_contains(std::size_t cell, Point p) const
    {
        return hex_contains(bs_positions[cell], cell_radius, p);
    }

    // Index of the hexagon containing p (nearest site), or -1 outside the layout.
    int cell_of(Point p) const
    {
        int best = -1;
        double best_d = 0.0;
        for (std::size_t k = 0; k < bs_positions.size(); ++k) {
            const double d = distance(p, bs_positions[k]);
            if (best < 0 || d < best_d) {
                best = static_cast<int>(k);
                best_d = d;
            }
        }
        if (best >= 0 && !cell_contains(static_cast<std::size_t>(best), p)) return -1;
        return best;
    }
};

// Centre site, then ring 1 (6 sites at sqrt(3)R), then ring 2 (6 at 3R and 6 at 2*sqrt(3)R),
// each ring ordered by azimuth.
inline MacroLayout build_hex_layout(double R)
{
    if (!(R > 0.0)) {
        throw std::invalid_argument("build_hex_layout: cell radius must be > 0");
    }
    struct Site {
        int ring;
        double angle;
        Point p;
    };
    std::vector<Site> sites;
    for (int q = -2; q <= 2; ++q) {
        for (int r = -2; r <= 2; ++r) {
            const int s = -q - r;
            const int ring = (std::abs(q) + std::abs(r) + std::abs(s)) / 2;
            if (ring > 2) continue;
            const Point p{1.5 * R * q, std::numbers::sqrt3 * R * (r + q / 2.0)};
            double angle = std::atan2(p.y, p.x);
            if (angle < -1e-12) angle += 2.0 * std::numbers::pi;
            sites.push_back({ring, ring == 0 ? 0.0 : angle, p});
        }
    }
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
        if (a.ring != b.ring) return a.ring < b.ring;
        return a.angle < b.angle - 1e-12;
    });
    MacroLayout layout;
    layout.cell_radius = R;
    for (const auto& s : sites) layout.bs_positions.push_back(s.p);
    return layout;
}

struct Building {
    Point center;
    double width = 50.0;
    double length = 50.0;
    Point femto_bs_position;
    int cell = 0; // macro cell whose hexagon contains the whole footprint

    bool contains(Point p) const
    {
        constexpr double eps = 1e-9;
        return std::abs(p.x - center.x) <= width / 2.0 + eps && std::abs(p.y - center.y) <= length / 2.0 + eps;
    }

    std::array<Point, 4> corners() const
    {
        const double hw = width / 2.0, hl = length / 2.0;
        return {Point{center.x - hw, center.y - hl}, Point{center.x + hw, center.y - hl},
                Point{center.x + hw, center.y + hl}, Point{center.x - hw, center.y + hl}};
    }

    bool overlaps(const Building& o) const
    {
        return std::abs(center.x - o.center.x) < (width + o.width) / 2.0 &&
               std::abs(center.y - o.center.y) < (length + o.length) / 2.0;
    }
};

struct MacroUser {
    Point position;
    int drop_cell = 0;    // hexagon the user was dropped in
    int serving_bs = -1;  // set by association (minimum propagation loss)
};

struct FemtoUser {
    Point position;
    int building = 0; // also the index of the serving femto BS
};

struct Topology {
    MacroLayout layout;
    std::vector<Building> buildings;
    std::vector<MacroUser> macro_users;
    std::vector<FemtoUser> femto_users;
    std::uint64_t rng_seed = 0;
};

class DeploymentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Point uniform_in_hexagon(Point c, double R, Rng& rng)
{
    std::uniform_real_distribution<double> ux(-R, R);
    std::uniform_real_distribution<double> uy(-std::numbers::sqrt3 / 2.0 * R, std::numbers::sqrt3 / 2.0 * R);
    for (;;) {
        const Point p{c.x + ux(rng), c.y + uy(rng)};
        if (hex_contains(c, R, p)) return p;
    }
}

inline bool footprint_in_cell(const MacroLayout& layout, std::size_t cell, const Building& b)
{
    for (const Point& corner : b.corners()) {
        if (!layout.cell_contains(cell, corner)) return false;
    }
    return true;
}

inline Building make_building(Point center, double size, int cell)
{
    return Building{center, size, size, center, cell};
}

namespace detail {
constexpr int kMaxPlacementRetries = 10000;
}

// Geometry of one drop.  Streams are split so that macro users do not move
// when the femtocell density changes and building i is the same for every
// M >= i/19 (nested drops across an M sweep).
inline Topology drop_topology(const ScenarioConfig& config, std::uint64_t seed)
{
    Topology topo;
    topo.rng_seed = seed;
    topo.layout = build_hex_layout(config.cell_radius_m);
    const double R = config.cell_radius_m;
    const auto n_cells = topo.layout.size();

    {
        Rng rng = make_rng(seed, Stream::MacroUsers);
        for (std::size_t c = 0; c < n_cells; ++c) {
            for (int i = 0; i < config.macro_users_per_cell; ++i) {
                topo.macro_users.push_back(
                    MacroUser{uniform_in_hexagon(topo.layout.bs_positions[c], R, rng), static_cast<int>(c), -1});
            }
        }
    }

    {
        Rng rng = make_rng(seed, Stream::Buildings);
        const double size = config.building_size_m;
        if (config.femto_layout == FemtoLayout::Single) {
            std::uniform_real_distribution<double> uaz(0.0, 2.0 * std::numbers::pi);
            const double D = config.femto_distance_m;
            bool placed = false;
            for (int attempt = 0; attempt < detail::kMaxPlacementRetries && !placed; ++attempt) {
                const double az = config.femto_azimuth_deg ? *config.femto_azimuth_deg * std::numbers::pi / 180.0
                                                           : uaz(rng);
                const Building b = make_building(Point{D * std::cos(az), D * std::sin(az)}, size, 0);
                if (footprint_in_cell(topo.layout, 0, b)) {
                    topo.buildings.push_back(b);
                    placed = true;
                } else if (config.femto_azimuth_deg) {
                    break;
                }
            }
            if (!placed) {
                throw DeploymentError("building at D = " + std::to_string(D) +
                                      " m does not fit inside the centre cell");
            }
        } else {
            const auto total = static_cast<std::size_t>(config.femtos_per_macrocell) * n_cells;
            std::uniform_int_distribution<std::size_t> ucell(0, n_cells - 1);
            for (std::size_t i = 0; i < total; ++i) {
                bool placed = false;
                for (int attempt = 0; attempt < detail::kMaxPlacementRetries; ++attempt) {
                    const std::size_t cell = ucell(rng);
                    const Point c = uniform_in_hexagon(topo.layout.bs_positions[cell], R, rng);
                    const Building b = make_building(c, size, static_cast<int>(cell));
                    if (!footprint_in_cell(topo.layout, cell, b)) continue;
                    bool clash = false;
                    for (const auto& other : topo.buildings) {
                        if (b.overlaps(other)) {
                            clash = true;
                            break;
                        }
                    }
                    if (clash) continue;
                    topo.buildings.push_back(b);
                    placed = true;
                    break;
                }
                if (!placed) {
                    throw DeploymentError("could not place building " + std::to_string(i) +
                                          " without overlap after retries");
                }
            }
        }
    }

    for (std::size_t b = 0; b < topo.buildings.size(); ++b) {
        Rng rng = make_rng(seed, Stream::FemtoUsers, b);
        const Building& bld = topo.buildings[b];
        std::uniform_real_distribution<double> ux(-bld.width / 2.0, bld.width / 2.0);
        std::uniform_real_distribution<double> uy(-bld.length / 2.0, bld.length / 2.0);
        for (int i = 0; i < config.femto_users_per_building; ++i) {
            topo.femto_users.push_back(
                FemtoUser{Point{bld.center.x + ux(rng), bld.center.y + uy(rng)}, static_cast<int>(b)});
        }
    }
    return topo;
}

// Serving macro BS per user: argmin of loss(user, bs), lowest index on ties.
inline std::vector<int> associate_macro_users(std::size_t n_users, std::size_t n_bs,
                                              const std::function<double(std::size_t, std::size_t)>& loss)
{
    std::vector<int> serving(n_users, -1);
    for (std::size_t u = 0; u < n_users; ++u) {
        double best = 0.0;
        for (std::size_t k = 0; k < n_bs; ++k) {
            const double l = loss(u, k);
            if (serving[u] < 0 || l < best) {
                best = l;
                serving[u] = static_cast<int>(k);
            }
        }
    }
    return serving;
}

} // namespace femtopc
