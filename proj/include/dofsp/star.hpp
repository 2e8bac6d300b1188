#pragma once

#include <optional>

#include "dofsp/model.hpp"
#include "dofsp/transcript.hpp"

namespace dofsp {

// argmin over candidate leaders of the one-shot retrieval cost; ties go to
// the smallest entity index.
int select_leader(const Instance& instance);
std::vector<std::uint64_t> leader_selection_costs(const Instance& instance);

// Randomness shared by the non-leader databases: per-entity one-time pads,
// per-index correlated symbols summing to q-(N-1), and the global nonzero
// multiplier.
struct StarRandomness {
  std::vector<std::vector<Symbol>> local;  // [i-2][k-1] = pad paired with vector k
  std::vector<std::vector<Symbol>> t_hat;  // [i-2][l-1], flattened per-index symbols
  Symbol global_multiplier = 1;            // c

  // Correlated symbol held by database j of entity i for its k-th slot.
  Symbol t_for(int entity, int database, int slot, int databases_of_entity) const;
};

StarRandomness gen_correlated_randomness(RandomSource& rng, const PrimeField& field,
                                         int entities, const std::vector<int>& non_leader_dbs,
                                         int leader_set_size,
                                         std::optional<Symbol> forced_multiplier = {});

struct StarConfig {
  // Defaults to the smallest prime exceeding N-1.
  std::optional<Symbol> field_modulus;
  std::optional<Symbol> forced_multiplier;  // pin c for symbolic checks
  Mutation mutation = Mutation::none;
  bool record_transcript = true;
};

Symbol star_default_modulus(int entities);

// Round-by-round zero-test search driven by the leader against every
// non-leader database. Also serves the N=2 sequential variant.
Outcome run_star(const Instance& instance, RandomSource& rng, const StarConfig& config = {});

// Baseline: one pass over the leader's whole support.
Outcome naive_psi_star_run(const Instance& instance, RandomSource& rng,
                           const StarConfig& config = {});

// sum_i ceil(prefix * N_i / (N_i - 1)) over the non-leader entities.
std::uint64_t star_worst_case_download(int alpha_prefix_sum, const std::vector<int>& non_leader_dbs);

std::uint64_t naive_psi_star(const Instance& instance);
std::uint64_t naive_psi_star_cost(int leader_set_size, const std::vector<int>& non_leader_dbs);

std::uint64_t expected_star_download(const Outcome& outcome, const LocalProfile& profile,
                                     const std::vector<int>& non_leader_dbs);

}  // namespace dofsp
