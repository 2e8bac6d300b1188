#include "dofsp/transcript.hpp"

namespace dofsp {

std::string NodeId::str() const {
  std::string s = "E" + std::to_string(entity);
  if (database > 0) s += ".db" + std::to_string(database);
  return s;
}

void CostLedger::charge(const NodeId& from, const NodeId& to, int leader_entity,
                        std::size_t symbols) {
  if (from.entity == leader_entity) {
    upload_ += symbols;
  } else if (to.entity == leader_entity) {
    download_ += symbols;
  } else {
    relayed_ += symbols;
  }
  per_link_[from.str() + "->" + to.str()] += symbols;
}

nlohmann::json CostLedger::to_json() const {
  return {{"upload", upload_},
          {"download", download_},
          {"relayed", relayed_},
          {"total", total()},
          {"per_link", per_link_}};
}

namespace {

const char* kind_name(MessageKind k) {
  switch (k) {
    case MessageKind::query: return "query";
    case MessageKind::answer: return "answer";
    case MessageKind::signal: return "signal";
  }
  return "?";
}

}  // namespace

nlohmann::json Transcript::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Message& m : messages_) {
    arr.push_back({{"from", m.from.str()},
                   {"to", m.to.str()},
                   {"round", m.round},
                   {"kind", kind_name(m.kind)},
                   {"payload", m.payload}});
  }
  return arr;
}

std::uint64_t Transcript::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const Message& m : messages_) {
    mix(static_cast<std::uint64_t>(m.from.entity) << 32 | static_cast<std::uint32_t>(m.from.database));
    mix(static_cast<std::uint64_t>(m.to.entity) << 32 | static_cast<std::uint32_t>(m.to.database));
    mix(static_cast<std::uint64_t>(m.round) << 8 | static_cast<std::uint64_t>(m.kind));
    for (Symbol s : m.payload) mix(s);
  }
  return h;
}

Mutation mutation_from_string(const std::string& name) {
  if (name == "none" || name.empty()) return Mutation::none;
  if (name == "drop-mask") return Mutation::drop_mask;
  if (name == "reuse-pad") return Mutation::reuse_pad;
  if (name == "early-reveal") return Mutation::early_reveal;
  throw ContractViolation("unknown mutation: " + name);
}

std::string mutation_name(Mutation m) {
  switch (m) {
    case Mutation::none: return "none";
    case Mutation::drop_mask: return "drop-mask";
    case Mutation::reuse_pad: return "reuse-pad";
    case Mutation::early_reveal: return "early-reveal";
  }
  return "?";
}

std::vector<std::string> Outcome::solution_labels(const Alphabet& alphabet) const {
  std::vector<std::string> out;
  for (Index k : solution) out.push_back(alphabet.label(k));
  return out;
}

}  // namespace dofsp
