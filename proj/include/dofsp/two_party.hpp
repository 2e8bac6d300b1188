#pragma once

#include <optional>

#include "dofsp/model.hpp"
#include "dofsp/transcript.hpp"

namespace dofsp {

struct TwoPartyConfig {
  // Defaults to the smallest prime exceeding max_r alpha_r.
  std::optional<Symbol> field_modulus;
  Mutation mutation = Mutation::none;
  bool record_transcript = true;
};

// Smallest valid operating field for the leader's local profile.
Symbol two_party_default_modulus(const LocalProfile& profile);

// Sequential cardinality search plus membership retrieval between the leader
// and a single server entity with replicated databases.
Outcome run_two_party(const Instance& instance, RandomSource& rng,
                      const TwoPartyConfig& config = {});

// Baseline: retrieve the server's bits at every leader support index first,
// then optimize locally.
Outcome naive_psi_two_party(const Instance& instance, RandomSource& rng,
                            const TwoPartyConfig& config = {});

// Closed-form worst-case download cost for a run deciding in round
// `stopping_round` with run size `alpha_r`. full_hit means the cardinality
// equaled the run size so no retrieval phase was needed.
std::uint64_t two_party_worst_case_download(int stopping_round, int alpha_r, int databases, bool full_hit);

std::uint64_t naive_psi_two_party_cost(int leader_set_size, int databases);

// Maps a finished run onto two_party_worst_case_download (handles the assumption-settled
// final round, which communicates one round less).
std::uint64_t expected_two_party_download(const Outcome& outcome, const LocalProfile& profile,
                                          int databases);

}  // namespace dofsp
