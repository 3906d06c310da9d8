#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace evonids::evo {

using Position = std::vector<double>;

// Objective over the unit hypercube; must be total and side-effect free.
using Objective = std::function<double(const Position&)>;

// Candidate solution. Stability (SL) is the cost rank normalised to [0,1],
// 0 at the population best and 1 at the worst; enrichment (NEL) mirrors it
// and is what gets compared against the energy barrier.
struct Particle {
    Position position;
    double cost = 0.0;
    double enrichment = 0.0;
    double stability = 0.0;
};

struct EvoConfig {
    int pop_size = 30;
    long long max_evaluations = 3000;
    int neighbor_count = 5;
    double sl_epsilon = 1e-9;
    std::uint64_t rng_seed = 1;
    std::optional<int> stagnation_limit;  // consecutive non-improving steps before early stop
    int workers = 1;                      // threads used for objective evaluation

    void validate() const;  // throws std::invalid_argument
};

struct Population {
    std::vector<Particle> particles;
    std::size_t best_index = 0;
    std::size_t worst_index = 0;
    long long evaluations_used = 0;

    std::size_t size() const { return particles.size(); }
    const Particle& best() const { return particles[best_index]; }
    const Particle& worst() const { return particles[worst_index]; }
    // Re-derives best/worst from costs; ties go to the lowest index.
    void refresh_extremes();
};

// Per-update randomness, drawn up front on the coordinator so the update
// rules themselves are pure functions.
struct DecayDraws {
    double tau1 = 0.0, tau2 = 0.0, tau3 = 0.0, tau4 = 0.0;
    std::vector<std::size_t> alpha_indices;
    std::vector<std::size_t> gamma_indices;
    double stability_bound = 0.0;
    Position jump;
};

struct RunHistory {
    std::vector<double> best_cost_per_iteration;  // index 0 = after initialisation
    Particle final_best;
    int iterations_run = 0;
    long long evaluations_used = 0;
};

// Optional per-iteration hook (after each step; also once after init).
using IterationObserver = std::function<void(int iteration, const Population&)>;

Population initialize_population(const EvoConfig& config, int dim, const Objective& objective);

// stability_i = (cost_i - cost_best) / max(cost_worst - cost_best, sl_epsilon);
// enrichment is set to the same value.
void compute_stability_levels(Population& population, double sl_epsilon);

Position compute_center_point(const Population& population);

// The k nearest particles by Euclidean distance, excluding index itself;
// distance ties break toward the lower index. Result is ordered nearest-first.
std::vector<std::size_t> find_neighbors(std::size_t index, const Population& population, int k);

// Mean enrichment over the candidate and its neighbours.
double compute_energy_barrier(std::size_t index, std::span<const std::size_t> neighbors,
                              const Population& population);

// Alpha decay: emit the coordinates in alpha_indices, replacing them with the
// best particle's values.
Position alpha_decay_update(const Particle& particle, const Particle& best,
                            const DecayDraws& draws);

// Gamma decay: same emission mechanism toward a neighbouring particle.
Position gamma_decay_update(const Particle& particle, const Particle& neighbor,
                            const DecayDraws& draws);

// Beta decay toward best and centre, amplified for unstable particles:
// clip(x + (tau1*best - tau2*center) / max(SL, sl_epsilon)).
Position beta_decay_update_1(const Particle& particle, const Particle& best,
                             const Position& center, const DecayDraws& draws, double sl_epsilon);

// Second beta form: clip(x + tau3*best - tau4*neighbor).
Position beta_decay_update_2(const Particle& particle, const Particle& best,
                             const Particle& neighbor, const DecayDraws& draws);

// Fallback for particles already below the barrier: clip(x + jump),
// jump drawn uniformly from [-0.1, 0.1]^d.
Position random_walk_update(const Particle& particle, const DecayDraws& draws);

inline constexpr double kRandomWalkRange = 0.1;

// One generation: two offspring per particle (branch rule below), evaluated
// within the remaining budget, then elitist merge of parents and offspring.
// Returns false once the evaluation budget is exhausted.
//
// Branch rule per particle: if enrichment > EB the particle is unstable; it
// emits via alpha+gamma decay when SL exceeds a fresh uniform bound, else via
// the two beta forms. Otherwise both offspring are random-walk jitters.
bool evo_step(Population& population, const EvoConfig& config, const Objective& objective,
              std::mt19937_64& rng);

RunHistory run(const EvoConfig& config, int dim, const Objective& objective,
               const IterationObserver& observer = nullptr);

}  // namespace evonids::evo
