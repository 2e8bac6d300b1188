#include "dofsp/model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace dofsp {

std::optional<Index> Alphabet::find(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<Index>(i + 1);
  }
  return std::nullopt;
}

bool FeasibleSet::contains(Index k) const {
  return std::binary_search(members.begin(), members.end(), k);
}

int IncidenceVector::popcount() const {
  int n = 0;
  for (auto b : bits) n += b;
  return n;
}

IndexSet IncidenceVector::support() const {
  IndexSet out;
  for (int k = 1; k <= size(); ++k) {
    if (at(k)) out.push_back(k);
  }
  return out;
}

int GlobalProfile::position_of(Index k) const {
  for (std::size_t p = 0; p < position_source.size(); ++p) {
    if (position_source[p] == k) return static_cast<int>(p + 1);
  }
  throw ContractViolation("position_of: index outside alphabet");
}

int GlobalProfile::class_offset(int r) const {
  int off = 1;
  for (int t = 1; t < r; ++t) off += mu[static_cast<std::size_t>(t - 1)];
  return off;
}

int LocalProfile::max_alpha() const {
  int m = 0;
  for (int a : alpha) m = std::max(m, a);
  return m;
}

int Instance::min_non_leader_databases() const {
  int m = 0;
  for (int i = 1; i <= entities(); ++i) {
    if (i == leader) continue;
    int n = databases[static_cast<std::size_t>(i - 1)];
    if (m == 0 || n < m) m = n;
  }
  return m;
}

void Instance::validate(bool require_nonempty_intersection) const {
  const int K = alphabet.size();
  if (K < 1) throw ContractViolation("instance: empty alphabet");
  std::set<std::string> seen(alphabet.labels.begin(), alphabet.labels.end());
  if (static_cast<int>(seen.size()) != K) {
    throw ContractViolation("instance: duplicate alphabet labels");
  }
  if (entities() < 2) throw ContractViolation("instance: need at least two entities");
  if (databases.size() != sets.size()) {
    throw ContractViolation("instance: databases list must cover every entity");
  }
  if (leader < 1 || leader > entities()) throw ContractViolation("instance: bad leader index");
  for (int i = 1; i <= entities(); ++i) {
    const FeasibleSet& s = sets[static_cast<std::size_t>(i - 1)];
    if (s.members.empty()) throw ContractViolation("instance: empty feasible set");
    for (Index k : s.members) {
      if (k < 1 || k > K) throw ContractViolation("instance: set member outside alphabet");
    }
    if (!std::is_sorted(s.members.begin(), s.members.end()) ||
        std::adjacent_find(s.members.begin(), s.members.end()) != s.members.end()) {
      throw ContractViolation("instance: set members must be strictly ascending");
    }
    if (i != leader && databases[static_cast<std::size_t>(i - 1)] < 2) {
      throw ContractViolation("instance: non-leader entities need at least 2 databases");
    }
  }
  if (static_cast<int>(objective.values.size()) != K) {
    throw ContractViolation("instance: objective must be total on the alphabet");
  }
  for (int v : objective.values) {
    if (v < 1 || (objective.range > 0 && v > objective.range)) {
      throw ContractViolation("instance: objective value outside declared range");
    }
  }
  if (require_nonempty_intersection) {
    IncidenceVector common = incidence_vector(sets[0], K);
    for (std::size_t i = 1; i < sets.size(); ++i) {
      IncidenceVector xi = incidence_vector(sets[i], K);
      for (int k = 1; k <= K; ++k) common.set(k, common.at(k) & xi.at(k));
    }
    if (common.popcount() == 0) {
      throw AssumptionViolation("instance: joint feasible set is empty");
    }
  }
}

IncidenceVector incidence_vector(const FeasibleSet& set, int alphabet_size) {
  IncidenceVector x;
  x.bits.assign(static_cast<std::size_t>(alphabet_size), 0);
  for (Index k : set.members) x.set(k, 1);
  return x;
}

namespace {

// Distinct realized values over `domain`, ordered best first.
std::vector<int> ranked_values(const Objective& objective, const IndexSet& domain) {
  std::set<int> distinct;
  for (Index k : domain) distinct.insert(objective.value_at(k));
  std::vector<int> ranked(distinct.begin(), distinct.end());
  if (objective.direction == Direction::maximize) {
    std::sort(ranked.begin(), ranked.end(), std::greater<int>());
  }
  return ranked;
}

}  // namespace

GlobalProfile global_profile(const Objective& objective, const Alphabet& alphabet) {
  IndexSet all;
  for (Index k = 1; k <= alphabet.size(); ++k) all.push_back(k);
  GlobalProfile out;
  for (int v : ranked_values(objective, all)) {
    IndexSet members;
    for (Index k : all) {
      if (objective.value_at(k) == v) members.push_back(k);
    }
    out.mu.push_back(static_cast<int>(members.size()));
    out.classes.push_back(members);
  }
  for (const IndexSet& cls : out.classes) {
    out.position_source.insert(out.position_source.end(), cls.begin(), cls.end());
  }
  return out;
}

LocalProfile local_profile(const Objective& objective, const FeasibleSet& leader_set) {
  if (leader_set.members.empty()) throw ContractViolation("local_profile: empty leader set");
  LocalProfile out;
  for (int v : ranked_values(objective, leader_set.members)) {
    IndexSet run;
    for (Index k : leader_set.members) {
      if (objective.value_at(k) == v) run.push_back(k);
    }
    out.alpha.push_back(static_cast<int>(run.size()));
    out.runs.push_back(run);
  }
  return out;
}

IntersectionResult intersection_oracle(const Instance& instance) {
  const int K = instance.alphabet.size();
  IncidenceVector common = incidence_vector(instance.sets[0], K);
  for (std::size_t i = 1; i < instance.sets.size(); ++i) {
    IncidenceVector xi = incidence_vector(instance.sets[i], K);
    for (int k = 1; k <= K; ++k) common.set(k, common.at(k) & xi.at(k));
  }
  IntersectionResult result{common, common.popcount()};
  if (result.cardinality == 0) {
    throw AssumptionViolation("intersection_oracle: joint feasible set is empty");
  }
  return result;
}

IndexSet solution_oracle(const Instance& instance) {
  IntersectionResult common = intersection_oracle(instance);
  IndexSet members = common.incidence.support();
  int best = instance.objective.value_at(members.front());
  for (Index k : members) {
    int v = instance.objective.value_at(k);
    if (instance.objective.better(v, best)) best = v;
  }
  IndexSet out;
  for (Index k : members) {
    if (instance.objective.value_at(k) == best) out.push_back(k);
  }
  return out;
}

IndexSet nominal_leakage_index_set(const Instance& instance, int stopping_round) {
  LocalProfile profile = local_profile(instance.objective, instance.leader_set());
  if (stopping_round < 1 || stopping_round > profile.rounds()) {
    throw ContractViolation("nominal_leakage_index_set: round outside local profile");
  }
  IndexSet out;
  for (int r = 1; r <= stopping_round; ++r) {
    const IndexSet& run = profile.runs[static_cast<std::size_t>(r - 1)];
    out.insert(out.end(), run.begin(), run.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

Objective objective_from_json(const nlohmann::json& j, const Alphabet& alphabet) {
  Objective obj;
  std::string dir = j.value("direction", "maximize");
  if (dir == "maximize") {
    obj.direction = Direction::maximize;
  } else if (dir == "minimize") {
    obj.direction = Direction::minimize;
  } else {
    throw ContractViolation("objective: direction must be minimize or maximize");
  }
  const auto& values = j.at("values");
  obj.values.assign(static_cast<std::size_t>(alphabet.size()), 0);
  for (auto it = values.begin(); it != values.end(); ++it) {
    auto k = alphabet.find(it.key());
    if (!k) throw ContractViolation("objective: value for unknown label " + it.key());
    obj.values[static_cast<std::size_t>(*k - 1)] = it.value().get<int>();
  }
  int max_v = 0;
  for (int v : obj.values) max_v = std::max(max_v, v);
  obj.range = j.value("range", max_v);
  return obj;
}

}  // namespace

std::size_t Instance::mappings_in(const nlohmann::json& j) {
  const auto& obj = j.at("objective");
  return obj.is_array() ? obj.size() : 1;
}

Instance Instance::from_json(const nlohmann::json& j, std::size_t mapping) {
  Instance inst;
  for (const auto& label : j.at("alphabet")) {
    inst.alphabet.labels.push_back(label.get<std::string>());
  }
  for (const auto& ent : j.at("entities")) {
    FeasibleSet s;
    for (const auto& label : ent.at("set")) {
      auto k = inst.alphabet.find(label.get<std::string>());
      if (!k) throw ContractViolation("instance: set label not in alphabet");
      s.members.push_back(*k);
    }
    std::sort(s.members.begin(), s.members.end());
    inst.sets.push_back(std::move(s));
    inst.databases.push_back(ent.value("databases", 2));
  }
  const auto& objectives = j.at("objective");
  const nlohmann::json& chosen =
      objectives.is_array() ? objectives.at(mapping) : objectives;
  inst.objective = objective_from_json(chosen, inst.alphabet);
  inst.leader = j.value("leader", 1);
  inst.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("expected")) inst.expected = j.at("expected");
  inst.validate(false);
  return inst;
}

Instance Instance::load_file(const std::string& path, std::size_t mapping) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j, mapping);
}

nlohmann::json Instance::to_json() const {
  nlohmann::json j;
  j["alphabet"] = alphabet.labels;
  j["entities"] = nlohmann::json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    nlohmann::json ent;
    std::vector<std::string> labels;
    for (Index k : sets[i].members) labels.push_back(alphabet.label(k));
    ent["set"] = labels;
    ent["databases"] = databases[i];
    j["entities"].push_back(ent);
  }
  nlohmann::json values;
  for (Index k = 1; k <= alphabet.size(); ++k) {
    values[alphabet.label(k)] = objective.value_at(k);
  }
  j["objective"] = {
      {"direction", objective.direction == Direction::maximize ? "maximize" : "minimize"},
      {"values", values},
      {"range", objective.range}};
  j["leader"] = leader;
  j["seed"] = seed;
  if (!expected.is_null()) j["expected"] = expected;
  return j;
}

}  // namespace dofsp
