#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dofsp/field.hpp"
#include "dofsp/model.hpp"

#include "json.hpp"

namespace dofsp {

// A protocol node: entity only (database == 0, used for the leader) or a
// specific database of an entity.
struct NodeId {
  int entity = 0;
  int database = 0;

  bool operator==(const NodeId& o) const {
    return entity == o.entity && database == o.database;
  }
  bool operator<(const NodeId& o) const {
    return entity != o.entity ? entity < o.entity : database < o.database;
  }
  std::string str() const;
};

enum class MessageKind { query, answer, signal };

struct Message {
  NodeId from;
  NodeId to;
  int round = 0;
  MessageKind kind = MessageKind::query;
  std::vector<Symbol> payload;
};

// Per-link symbol counts. upload/download are taken from the leader's
// perspective; symbols on non-leader links (ring interior) count as relayed.
class CostLedger {
 public:
  void charge(const NodeId& from, const NodeId& to, int leader_entity,
              std::size_t symbols);

  std::uint64_t upload() const { return upload_; }
  std::uint64_t download() const { return download_; }
  std::uint64_t relayed() const { return relayed_; }
  std::uint64_t total() const { return upload_ + download_ + relayed_; }

  nlohmann::json to_json() const;

 private:
  std::uint64_t upload_ = 0;
  std::uint64_t download_ = 0;
  std::uint64_t relayed_ = 0;
  std::map<std::string, std::uint64_t> per_link_;
};

class Transcript {
 public:
  explicit Transcript(bool recording = true) : recording_(recording) {}

  void record(Message m) {
    if (recording_) messages_.push_back(std::move(m));
  }
  bool recording() const { return recording_; }
  const std::vector<Message>& messages() const { return messages_; }

  nlohmann::json to_json() const;
  // FNV-1a over the serialized messages; reproducibility checks only.
  std::uint64_t hash() const;

 private:
  bool recording_;
  std::vector<Message> messages_;
};

// Deliberately broken protocol variants for audit self-tests.
enum class Mutation {
  none,
  drop_mask,     // answers / hops sent without their one-time pads
  reuse_pad,     // every mask reuses the first pool symbol
  early_reveal,  // membership bits retrieved in non-final rounds too
};

Mutation mutation_from_string(const std::string& name);
std::string mutation_name(Mutation m);

// Result of one protocol run.
struct Outcome {
  IndexSet solution;                  // P*, ascending alphabet indices
  int stopping_round = 0;             // deciding round in the relevant profile
  bool full_hit = false;              // cardinality met the run size, no retrieval phase
  bool skipped_last_round = false;    // final round settled by the non-empty-intersection assumption
  std::uint64_t download = 0;         // symbols received by the leader
  std::uint64_t upload = 0;           // symbols sent by the leader
  std::uint64_t relayed = 0;          // symbols on non-leader links
  CostLedger ledger;                  // per-link symbol counts
  IndexSet leader_knowledge;          // indices whose joint membership the leader learned
  int field_modulus = 0;
  std::vector<Symbol> round_cardinalities;  // decoded M per executed round
  std::vector<Symbol> zero_test_values;     // star: decoded Z per queried index
  std::vector<std::uint64_t> round_costs;   // symbols exchanged per round
  std::uint64_t retrieval_download = 0;     // symbols downloaded by the retrieval phase
  Transcript transcript{false};
  // Randomness held by each node, recorded for the audit's conditioning.
  // Section names: "E<i>.pool"/"E<i>.pad"/"E<i>.that", "E<i>.own", "c".
  std::map<std::string, std::vector<Symbol>> entity_randomness;
  int vectors_drawn = 0;  // fresh query vectors consumed by the leader

  std::uint64_t total_cost() const { return download + upload + relayed; }
  std::vector<std::string> solution_labels(const Alphabet& alphabet) const;
};

}  // namespace dofsp
