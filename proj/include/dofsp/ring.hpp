#pragma once

#include <optional>

#include "dofsp/model.hpp"
#include "dofsp/transcript.hpp"

namespace dofsp {

struct RingConfig {
  // Defaults to the smallest prime exceeding max(max_r mu_r, 2).
  std::optional<Symbol> field_modulus;
  Mutation mutation = Mutation::none;
  bool record_transcript = true;
  // Asserts the telescoping fact Q_{i,b} - Q_{i,a} = Xhat_1 o ... o Xhat_i on
  // every hop of every round.
  bool check_hop_invariant = false;
};

Symbol ring_default_modulus(const GlobalProfile& profile);

// Chained cardinality search over the permuted value classes. Queries travel
// database-j-to-database-j along the entity ring; the last entity answers the
// leader.
Outcome run_ring(const Instance& instance, RandomSource& rng, const RingConfig& config = {});

// Baseline: one full-length pass whose answers are entire masked vectors, so
// the leader learns the whole joint incidence vector.
Outcome naive_psi_ring(const Instance& instance, RandomSource& rng,
                       const RingConfig& config = {});

// Rounds served by each participating database (1-based db -> sorted rounds).
std::vector<std::vector<int>> round_assignment(int effective_databases, int rounds);

// Closed-form total communication for a run deciding in round `stopping_round`
// of the class profile `mu`. full_hit: the round's cardinality equaled the
// class size, so the retrieval step was skipped.
std::uint64_t ring_worst_case_cost(int stopping_round, const std::vector<int>& mu, int entities,
                            bool full_hit = false);

std::uint64_t naive_psi_ring_cost(int entities, int alphabet_size);

std::uint64_t expected_ring_cost(const Outcome& outcome, const GlobalProfile& profile,
                                 int entities);

}  // namespace dofsp
