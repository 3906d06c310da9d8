#include "evonids/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace evonids::evo {

double sphere(const Position& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double rastrigin(const Position& x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
}

Objective benchmark_objective(const std::string& name) {
    if (name == "sphere") return sphere;
    if (name == "rastrigin") return rastrigin;
    throw std::invalid_argument("unknown benchmark objective: " + name);
}

}  // namespace evonids::evo
