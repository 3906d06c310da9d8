#pragma once

#include <string>

#include "evonids/evo.hpp"

namespace evonids::evo {

// Test objectives on the unit cube, both minimised at the origin corner.
double sphere(const Position& x);     // sum of squares, max d on [0,1]^d
double rastrigin(const Position& x);  // 10d + sum(x^2 - 10 cos(2 pi x))

// Lookup by name ("sphere" | "rastrigin"); throws on anything else.
Objective benchmark_objective(const std::string& name);

}  // namespace evonids::evo
