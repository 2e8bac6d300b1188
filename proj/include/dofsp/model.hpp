#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dofsp/errors.hpp"

#include "json.hpp"

namespace dofsp {

// 1-based position into the alphabet. All index sets (J_r, I_r, supports)
// use these positions, matching the instance file format.
using Index = int;
using IndexSet = std::vector<Index>;  // sorted ascending

struct Alphabet {
  std::vector<std::string> labels;  // distinct

  int size() const { return static_cast<int>(labels.size()); }
  const std::string& label(Index k) const { return labels[static_cast<std::size_t>(k - 1)]; }
  std::optional<Index> find(const std::string& label) const;
};

struct FeasibleSet {
  IndexSet members;  // non-empty subset of [1..K]

  int size() const { return static_cast<int>(members.size()); }
  bool contains(Index k) const;
};

// K-length 0/1 indicator of a feasible set.
struct IncidenceVector {
  std::vector<std::uint8_t> bits;

  int size() const { return static_cast<int>(bits.size()); }
  std::uint8_t at(Index k) const { return bits[static_cast<std::size_t>(k - 1)]; }
  void set(Index k, std::uint8_t v) { bits[static_cast<std::size_t>(k - 1)] = v; }
  int popcount() const;
  IndexSet support() const;
};

enum class Direction { minimize, maximize };

struct Objective {
  std::vector<int> values;  // values[k-1] in [1..range], total on the alphabet
  Direction direction = Direction::maximize;
  int range = 0;  // tau

  int value_at(Index k) const { return values[static_cast<std::size_t>(k - 1)]; }
  // true when a ranks strictly better than b for this direction.
  bool better(int a, int b) const {
    return direction == Direction::maximize ? a > b : a < b;
  }
};

// Partition of the alphabet into equal-value classes, best first, plus the
// induced permutation. position_source[p-1] = k means permuted position p
// holds alphabet index k.
struct GlobalProfile {
  std::vector<int> mu;                  // class sizes, sum = K
  std::vector<IndexSet> classes;        // I_1..I_T, each ascending
  std::vector<Index> position_source;   // length K

  int rounds() const { return static_cast<int>(mu.size()); }
  // 1-based permuted position of alphabet index k.
  int position_of(Index k) const;
  // First permuted position (1-based) of class r.
  int class_offset(int r) const;
};

// Equal-value runs restricted to the leader's set, best first.
struct LocalProfile {
  std::vector<int> alpha;      // run sizes, sum = P_1
  std::vector<IndexSet> runs;  // J_1..J_L, each ascending

  int rounds() const { return static_cast<int>(alpha.size()); }
  int max_alpha() const;
};

struct Instance {
  Alphabet alphabet;
  std::vector<FeasibleSet> sets;  // one per entity, entity i = sets[i-1]
  std::vector<int> databases;     // N_i per entity
  Objective objective;
  int leader = 1;  // 1-based entity index
  std::uint64_t seed = 0;
  nlohmann::json expected;  // optional self-test annotations, passed through

  int entities() const { return static_cast<int>(sets.size()); }
  const FeasibleSet& leader_set() const { return sets[static_cast<std::size_t>(leader - 1)]; }
  int min_non_leader_databases() const;

  // Throws AssumptionViolation / ContractViolation on malformed instances.
  void validate(bool require_nonempty_intersection = true) const;

  nlohmann::json to_json() const;
  static Instance from_json(const nlohmann::json& j, std::size_t mapping = 0);
  static Instance load_file(const std::string& path, std::size_t mapping = 0);
  // Number of objective mappings in a file (files may bundle several).
  static std::size_t mappings_in(const nlohmann::json& j);
};

IncidenceVector incidence_vector(const FeasibleSet& set, int alphabet_size);
GlobalProfile global_profile(const Objective& objective, const Alphabet& alphabet);
LocalProfile local_profile(const Objective& objective, const FeasibleSet& leader_set);

// Ground-truth oracles (direct set computation, no protocol machinery).
struct IntersectionResult {
  IncidenceVector incidence;
  int cardinality = 0;
};
IntersectionResult intersection_oracle(const Instance& instance);
IndexSet solution_oracle(const Instance& instance);

// Indices of non-leader incidence bits the leader is entitled to learn when
// the search stops in round R of its local profile.
IndexSet nominal_leakage_index_set(const Instance& instance, int stopping_round);

}  // namespace dofsp
