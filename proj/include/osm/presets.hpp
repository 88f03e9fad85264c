#pragma once

// The four three-object test configurations used for synthetic imaging.
// Objects sit at (0.07, 0.05), (-0.07, 0), (0.04, -0.06); cases vary radius
// and relative permeability.

#include <array>
#include <string>
#include <vector>

#include "osm/error.hpp"
#include "osm/forward.hpp"
#include "osm/geometry.hpp"

namespace osm {

struct CaseSpec {
    std::string name;
    std::vector<SmallObject> objects;
};

inline CaseSpec preset_case(int id) {
    static constexpr std::array<Vec2, 3> centers{{{0.07, 0.05}, {-0.07, 0.0}, {0.04, -0.06}}};
    std::array<double, 3> radius{0.010, 0.010, 0.010};
    std::array<double, 3> mu_rel{5.0, 5.0, 5.0};
    switch (id) {
        case 1: break;
        case 2: mu_rel = {3.0, 5.0, 7.0}; break;
        case 3: radius = {0.015, 0.010, 0.005}; break;
        case 4:
            radius = {0.015, 0.010, 0.005};
            mu_rel = {3.0, 5.0, 7.0};
            break;
        default: throw ArgumentError("unknown case " + std::to_string(id) + " (expected 1..4)");
    }
    CaseSpec spec{"case" + std::to_string(id), {}};
    for (std::size_t s = 0; s < 3; ++s)
        spec.objects.push_back({centers[s], radius[s], mu_rel[s] * kVacuumPermeability});
    return spec;
}

}  // namespace osm
