#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dofsp/model.hpp"
#include "dofsp/transcript.hpp"

#include "json.hpp"

namespace dofsp {

enum class ProtocolKind {
  two_party,
  ring,
  star,
  naive_two_party,
  naive_ring,
  naive_star,
};

std::string protocol_name(ProtocolKind kind);
bool protocol_is_naive(ProtocolKind kind);

struct AuditOptions {
  std::uint64_t budget = 1ull << 20;  // max enumerated randomness states per run
  std::uint64_t fallback_trials = 4000;
  std::uint64_t seed = 0xd0f5;
};

AuditOptions audit_options_from_env();

struct InstanceFamily {
  std::string name;
  ProtocolKind protocol = ProtocolKind::two_party;
  Symbol field_modulus = 3;
  Mutation mutation = Mutation::none;
  std::vector<Instance> members;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  bool exact = true;  // false: downgraded to seeded statistical comparison
  std::uint64_t states = 0;
  std::string detail;
  nlohmann::json counterexample;
};

Outcome run_protocol(ProtocolKind kind, const Instance& instance, RandomSource& rng,
                     Symbol modulus, Mutation mutation, bool record_transcript = true);

// Runs `fn` on the outcome of every assignment of the protocol's randomness.
// The draw layout is instance-deterministic, so the sweep is exhaustive.
std::uint64_t enumerate_protocol(const Instance& instance, ProtocolKind kind, Symbol modulus,
                                 Mutation mutation, const AuditOptions& options,
                                 const std::function<void(const Outcome&)>& fn);

// Exact distribution of everything `observer` sends and receives, together
// with the randomness it holds, over all protocol randomness.
struct ViewDistribution {
  std::map<std::string, std::uint64_t> weight;
  std::uint64_t denominator = 0;
  bool exact = true;
};
ViewDistribution observer_view_distribution(const Instance& instance, ProtocolKind kind,
                                            Symbol modulus, Mutation mutation, NodeId observer,
                                            const AuditOptions& options = {});

bool same_distribution(const ViewDistribution& a, const ViewDistribution& b,
                       std::string* first_difference = nullptr);

// Decoded solution equals the oracle on every member and every randomness
// realization.
CheckResult reliability_check(const InstanceFamily& family, const AuditOptions& options = {});

// Per-database views are distribution-identical across counterfactual
// assignments of the other entities' sets (same own set, same transcript
// shape).
CheckResult zero_leakage_check(const InstanceFamily& family, const AuditOptions& options = {});

// Leader views are distribution-identical across counterfactual non-leader
// assignments that agree on the nominal knowledge, and the emitted knowledge
// set equals the nominal one.
CheckResult leader_leakage_check(const InstanceFamily& family, const AuditOptions& options = {});

// First local-profile run / global class intersecting the joint feasible set.
int nominal_stop_round(const Instance& instance);
int nominal_stop_class(const Instance& instance);

// Entropy (bits) of one non-leader's incidence bits over the nominal index
// set, under a uniform prior over sets of its declared size. This is the
// reported quantification of the nominal leakage; the checks themselves are
// structural, never entropy-based.
double nominal_leakage_entropy_bits(const Instance& instance, int entity);

InstanceFamily two_party_small_family(Mutation mutation = Mutation::none);
InstanceFamily ring_small_family(int variant, Mutation mutation = Mutation::none);
InstanceFamily star_small_family(int variant, Mutation mutation = Mutation::none);

InstanceFamily filter_members(const InstanceFamily& family,
                              const std::function<bool(const Instance&)>& keep);

struct AuditReport {
  std::vector<CheckResult> checks;
  std::string notes;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

// The default small-instance suite over all three protocols.
AuditReport run_default_audit(const AuditOptions& options = {},
                              Mutation mutation = Mutation::none);

}  // namespace dofsp
