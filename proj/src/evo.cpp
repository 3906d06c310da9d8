#include "evonids/evo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "evonids/common.hpp"

namespace evonids::evo {

void EvoConfig::validate() const {
    if (pop_size < 2) throw std::invalid_argument("EvoConfig: pop_size must be >= 2");
    if (max_evaluations < pop_size)
        throw std::invalid_argument("EvoConfig: max_evaluations must be >= pop_size");
    if (neighbor_count < 1) throw std::invalid_argument("EvoConfig: neighbor_count must be >= 1");
    if (neighbor_count >= pop_size)
        throw std::invalid_argument("EvoConfig: neighbor_count must be < pop_size");
    if (!(sl_epsilon > 0.0)) throw std::invalid_argument("EvoConfig: sl_epsilon must be > 0");
    if (stagnation_limit && *stagnation_limit < 1)
        throw std::invalid_argument("EvoConfig: stagnation_limit must be >= 1");
    if (workers < 1) throw std::invalid_argument("EvoConfig: workers must be >= 1");
}

void Population::refresh_extremes() {
    best_index = 0;
    worst_index = 0;
    for (std::size_t i = 1; i < particles.size(); ++i) {
        if (particles[i].cost < particles[best_index].cost) best_index = i;
        if (particles[i].cost > particles[worst_index].cost) worst_index = i;
    }
}

namespace {

double clip01(double v) { return std::min(1.0, std::max(0.0, v)); }

double uniform01(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Uniform subset of {0..dim-1}: size drawn from {1..dim}, then a partial
// Fisher-Yates pick. Sorted for a canonical representation.
std::vector<std::size_t> draw_index_subset(std::mt19937_64& rng, std::size_t dim) {
    std::uniform_int_distribution<std::size_t> size_dist(1, dim);
    const std::size_t count = size_dist(rng);
    std::vector<std::size_t> pool(dim);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, dim - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

void check_cost_finite(double cost, std::size_t particle_index) {
    if (!std::isfinite(cost))
        throw std::runtime_error(
            strf("objective returned a non-finite value for particle %zu", particle_index));
}

// Evaluates positions[0..n) into costs, chunked over `workers` threads.
// Results and error reporting are independent of the thread schedule: costs
// land by index and the lowest-index failure wins.
void evaluate_batch(const std::vector<Position>& positions, const Objective& objective,
                    std::vector<double>& costs, int workers) {
    const std::size_t n = positions.size();
    costs.resize(n);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            costs[i] = objective(positions[i]);
            check_cost_finite(costs[i], i);
        }
        return;
    }
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::exception_ptr> errors(n, nullptr);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += n_threads) {
                try {
                    costs[i] = objective(positions[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        check_cost_finite(costs[i], i);
    }
}

Population initialize_with_rng(const EvoConfig& config, int dim, const Objective& objective,
                               std::mt19937_64& rng) {
    if (dim < 1) throw std::invalid_argument("initialize_population: dim must be >= 1");
    Population pop;
    pop.particles.resize(static_cast<std::size_t>(config.pop_size));
    std::vector<Position> positions(pop.particles.size());
    for (auto& pos : positions) {
        pos.resize(static_cast<std::size_t>(dim));
        for (double& x : pos) x = uniform01(rng);
    }
    std::vector<double> costs;
    evaluate_batch(positions, objective, costs, config.workers);
    for (std::size_t i = 0; i < pop.particles.size(); ++i) {
        pop.particles[i].position = std::move(positions[i]);
        pop.particles[i].cost = costs[i];
    }
    pop.evaluations_used = config.pop_size;
    pop.refresh_extremes();
    return pop;
}

}  // namespace

Population initialize_population(const EvoConfig& config, int dim, const Objective& objective) {
    config.validate();
    std::mt19937_64 rng(config.rng_seed);
    return initialize_with_rng(config, dim, objective, rng);
}

void compute_stability_levels(Population& population, double sl_epsilon) {
    population.refresh_extremes();
    const double best = population.best().cost;
    const double spread = std::max(population.worst().cost - best, sl_epsilon);
    for (auto& p : population.particles) {
        p.stability = (p.cost - best) / spread;
        p.enrichment = p.stability;
    }
}

Position compute_center_point(const Population& population) {
    if (population.particles.empty())
        throw std::invalid_argument("compute_center_point: empty population");
    const std::size_t dim = population.particles.front().position.size();
    Position center(dim, 0.0);
    for (const auto& p : population.particles)
        for (std::size_t j = 0; j < dim; ++j) center[j] += p.position[j];
    for (double& c : center) c /= static_cast<double>(population.size());
    return center;
}

std::vector<std::size_t> find_neighbors(std::size_t index, const Population& population, int k) {
    const std::size_t n = population.size();
    if (static_cast<std::size_t>(k) >= n)
        throw std::invalid_argument("find_neighbors: k must be < pop_size");
    const Position& origin = population.particles[index].position;
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == index) continue;
        double d = 0.0;
        const Position& other = population.particles[i].position;
        for (std::size_t j = 0; j < origin.size(); ++j) {
            const double diff = origin[j] - other[j];
            d += diff * diff;
        }
        dist.emplace_back(d, i);
    }
    std::sort(dist.begin(), dist.end());  // pair ordering = distance then lower index
    std::vector<std::size_t> out(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = dist[i].second;
    return out;
}

double compute_energy_barrier(std::size_t index, std::span<const std::size_t> neighbors,
                              const Population& population) {
    double sum = population.particles[index].enrichment;
    for (std::size_t i : neighbors) sum += population.particles[i].enrichment;
    return sum / static_cast<double>(neighbors.size() + 1);
}

Position alpha_decay_update(const Particle& particle, const Particle& best,
                            const DecayDraws& draws) {
    Position out = particle.position;
    for (std::size_t j : draws.alpha_indices) out[j] = best.position[j];
    return out;
}

Position gamma_decay_update(const Particle& particle, const Particle& neighbor,
                            const DecayDraws& draws) {
    Position out = particle.position;
    for (std::size_t j : draws.gamma_indices) out[j] = neighbor.position[j];
    return out;
}

Position beta_decay_update_1(const Particle& particle, const Particle& best,
                             const Position& center, const DecayDraws& draws, double sl_epsilon) {
    Position out = particle.position;
    const double scale = std::max(particle.stability, sl_epsilon);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = clip01(out[j] + (draws.tau1 * best.position[j] - draws.tau2 * center[j]) / scale);
    return out;
}

Position beta_decay_update_2(const Particle& particle, const Particle& best,
                             const Particle& neighbor, const DecayDraws& draws) {
    Position out = particle.position;
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = clip01(out[j] + draws.tau3 * best.position[j] - draws.tau4 * neighbor.position[j]);
    return out;
}

Position random_walk_update(const Particle& particle, const DecayDraws& draws) {
    Position out = particle.position;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = clip01(out[j] + draws.jump[j]);
    return out;
}

bool evo_step(Population& population, const EvoConfig& config, const Objective& objective,
              std::mt19937_64& rng) {
    if (population.evaluations_used >= config.max_evaluations) return false;

    compute_stability_levels(population, config.sl_epsilon);
    const Position center = compute_center_point(population);
    const Particle best = population.best();  // copy: updates must not chase a moving target
    const std::size_t dim = best.position.size();

    // All randomness is drawn here, in particle order, before any evaluation.
    std::vector<Position> offspring;
    offspring.reserve(population.size() * 2);
    for (std::size_t i = 0; i < population.size(); ++i) {
        const Particle& p = population.particles[i];
        const auto neighbors = find_neighbors(i, population, config.neighbor_count);
        const double barrier = compute_energy_barrier(i, neighbors, population);
        DecayDraws draws;
        if (p.enrichment > barrier) {
            draws.stability_bound = uniform01(rng);
            if (p.stability > draws.stability_bound) {
                draws.alpha_indices = draw_index_subset(rng, dim);
                draws.gamma_indices = draw_index_subset(rng, dim);
                std::uniform_int_distribution<std::size_t> pick(0, neighbors.size() - 1);
                const Particle& ng = population.particles[neighbors[pick(rng)]];
                offspring.push_back(alpha_decay_update(p, best, draws));
                offspring.push_back(gamma_decay_update(p, ng, draws));
            } else {
                draws.tau1 = uniform01(rng);
                draws.tau2 = uniform01(rng);
                draws.tau3 = uniform01(rng);
                draws.tau4 = uniform01(rng);
                std::uniform_int_distribution<std::size_t> pick(0, neighbors.size() - 1);
                const Particle& ng = population.particles[neighbors[pick(rng)]];
                offspring.push_back(
                    beta_decay_update_1(p, best, center, draws, config.sl_epsilon));
                offspring.push_back(beta_decay_update_2(p, best, ng, draws));
            }
        } else {
            for (int child = 0; child < 2; ++child) {
                draws.jump.resize(dim);
                for (double& j : draws.jump)
                    j = std::uniform_real_distribution<double>(-kRandomWalkRange,
                                                               kRandomWalkRange)(rng);
                offspring.push_back(random_walk_update(p, draws));
            }
        }
    }

    // Only offspring that fit the remaining budget get evaluated.
    const long long budget_left = config.max_evaluations - population.evaluations_used;
    const std::size_t n_eval =
        std::min<std::size_t>(offspring.size(), static_cast<std::size_t>(budget_left));
    offspring.resize(n_eval);
    std::vector<double> costs;
    evaluate_batch(offspring, objective, costs, config.workers);
    population.evaluations_used += static_cast<long long>(n_eval);

    // Elitist merge: parents plus offspring, best pop_size survive.
    // Ordering is (cost, merged index), so parents win ties against offspring.
    struct Entry {
        double cost;
        std::size_t merged_index;
        bool is_offspring;
        std::size_t source;
    };
    std::vector<Entry> merged;
    merged.reserve(population.size() + n_eval);
    for (std::size_t i = 0; i < population.size(); ++i)
        merged.push_back({population.particles[i].cost, i, false, i});
    for (std::size_t i = 0; i < n_eval; ++i)
        merged.push_back({costs[i], population.size() + i, true, i});
    std::sort(merged.begin(), merged.end(), [](const Entry& a, const Entry& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.merged_index < b.merged_index;
    });

    std::vector<Particle> survivors(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
        const Entry& e = merged[i];
        if (e.is_offspring) {
            survivors[i].position = std::move(offspring[e.source]);
            survivors[i].cost = e.cost;
        } else {
            survivors[i] = std::move(population.particles[e.source]);
        }
    }
    population.particles = std::move(survivors);
    population.refresh_extremes();
    return population.evaluations_used < config.max_evaluations;
}

RunHistory run(const EvoConfig& config, int dim, const Objective& objective,
               const IterationObserver& observer) {
    config.validate();
    std::mt19937_64 rng(config.rng_seed);
    Population pop = initialize_with_rng(config, dim, objective, rng);

    RunHistory history;
    history.best_cost_per_iteration.push_back(pop.best().cost);
    if (observer) observer(0, pop);

    int stagnant = 0;
    while (pop.evaluations_used < config.max_evaluations) {
        const double previous_best = pop.best().cost;
        const bool budget_remains = evo_step(pop, config, objective, rng);
        history.best_cost_per_iteration.push_back(pop.best().cost);
        ++history.iterations_run;
        if (observer) observer(history.iterations_run, pop);

        if (pop.best().cost < previous_best) {
            stagnant = 0;
        } else {
            ++stagnant;
        }
        if (config.stagnation_limit && stagnant >= *config.stagnation_limit) break;
        if (!budget_remains) break;
    }
    history.final_best = pop.best();
    history.evaluations_used = pop.evaluations_used;
    return history;
}

}  // namespace evonids::evo
