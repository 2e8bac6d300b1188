#pragma once

#include <cstdint>

#include "dofsp/model.hpp"
#include "dofsp/random.hpp"

namespace dofsp {

enum class PeqSetting { two_party, ring, star };

// Closed-form probability that the search cost equals the one-shot baseline
// cost under a uniformly random objective map, for a fixed set realization.
double peq_two_party_exact(int leader_set_size, int value_range, int intersection_size);
// Closed form reproducing the reference table; note this expression is NOT
// the empirical probability (see peq_ring_exhaustive), which the tests and
// the acceptance suite report side by side.
double peq_ring_exact(int alphabet_size, int value_range, int intersection_size);
double peq_star_exact(int leader_set_size, int value_range, int intersection_size);

// Exhaustive truth: enumerate every objective map over the relevant domain,
// run the simulator, count cost-equality events.
struct ExhaustiveResult {
  std::uint64_t hits = 0;
  std::uint64_t maps = 0;
  double probability() const { return static_cast<double>(hits) / static_cast<double>(maps); }
};
ExhaustiveResult peq_two_party_exhaustive(int leader_set_size, int value_range,
                                          int intersection_size, int databases = 2,
                                          std::uint64_t limit = 1ull << 16);
ExhaustiveResult peq_ring_exhaustive(int alphabet_size, int value_range, int intersection_size,
                                     int entities = 4, std::uint64_t limit = 1ull << 16);
ExhaustiveResult peq_star_exhaustive(int leader_set_size, int value_range, int intersection_size,
                                     int entities = 3, std::uint64_t limit = 1ull << 16);

struct MonteCarloResult {
  double estimate = 0.0;
  double halfwidth99 = 0.0;
  std::uint64_t trials = 0;
};
struct PeqParams {
  int alphabet_size = 10;     // K (ring)
  int leader_set_size = 5;    // P_1 (two-party / star)
  int intersection_size = 1;  // M
  int value_range = 2;        // tau
  int entities = 4;           // N (ring / star)
  int databases = 2;          // replication at each non-leader
};
MonteCarloResult peq_monte_carlo(PeqSetting setting, const PeqParams& params,
                                 std::uint64_t trials, std::uint64_t seed);

// Canonical fixed-set instances for the cost-equality experiments. The
// objective is a placeholder; callers overwrite the values per trial/map.
Instance peq_two_party_instance(int leader_set_size, int intersection_size, int databases);
Instance peq_ring_instance(int alphabet_size, int intersection_size, int entities);
Instance peq_star_instance(int leader_set_size, int intersection_size, int entities,
                           int databases);

// Cost-equality event for one sampled objective, used by both MC and the
// exhaustive oracles.
bool cost_equality_event(PeqSetting setting, const Instance& instance, RandomSource& rng);

double binomial(int n, int k);

}  // namespace dofsp
