#include "dofsp/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "dofsp/analysis.hpp"
#include "dofsp/random.hpp"
#include "dofsp/ring.hpp"
#include "dofsp/star.hpp"
#include "dofsp/two_party.hpp"

namespace dofsp {

std::string protocol_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::two_party: return "two_party";
    case ProtocolKind::ring: return "ring";
    case ProtocolKind::star: return "star";
    case ProtocolKind::naive_two_party: return "naive_two_party";
    case ProtocolKind::naive_ring: return "naive_ring";
    case ProtocolKind::naive_star: return "naive_star";
  }
  return "?";
}

bool protocol_is_naive(ProtocolKind kind) {
  return kind == ProtocolKind::naive_two_party || kind == ProtocolKind::naive_ring ||
         kind == ProtocolKind::naive_star;
}

AuditOptions audit_options_from_env() {
  AuditOptions options;
  if (const char* env = std::getenv("DOFSP_AUDIT_BUDGET")) {
    options.budget = std::strtoull(env, nullptr, 10);
    if (options.budget == 0) options.budget = 1ull << 20;
  }
  return options;
}

Outcome run_protocol(ProtocolKind kind, const Instance& instance, RandomSource& rng,
                     Symbol modulus, Mutation mutation, bool record_transcript) {
  switch (kind) {
    case ProtocolKind::two_party:
    case ProtocolKind::naive_two_party: {
      TwoPartyConfig cfg;
      cfg.field_modulus = modulus;
      cfg.mutation = mutation;
      cfg.record_transcript = record_transcript;
      return kind == ProtocolKind::two_party ? run_two_party(instance, rng, cfg)
                                             : naive_psi_two_party(instance, rng, cfg);
    }
    case ProtocolKind::ring:
    case ProtocolKind::naive_ring: {
      RingConfig cfg;
      cfg.field_modulus = modulus;
      cfg.mutation = mutation;
      cfg.record_transcript = record_transcript;
      return kind == ProtocolKind::ring ? run_ring(instance, rng, cfg)
                                        : naive_psi_ring(instance, rng, cfg);
    }
    case ProtocolKind::star:
    case ProtocolKind::naive_star: {
      StarConfig cfg;
      cfg.field_modulus = modulus;
      cfg.mutation = mutation;
      cfg.record_transcript = record_transcript;
      return kind == ProtocolKind::star ? run_star(instance, rng, cfg)
                                        : naive_psi_star_run(instance, rng, cfg);
    }
  }
  throw ContractViolation("run_protocol: unknown protocol");
}

std::uint64_t enumerate_protocol(const Instance& instance, ProtocolKind kind, Symbol modulus,
                                 Mutation mutation, const AuditOptions& options,
                                 const std::function<void(const Outcome&)>& fn) {
  DrawRecorder recorder;
  (void)run_protocol(kind, instance, recorder, modulus, mutation);
  std::uint64_t states = 1;
  for (std::uint32_t b : recorder.bases()) {
    if (states > options.budget / b + 1) throw BudgetExceeded("enumerate_protocol: over budget");
    states *= b;
  }
  if (states > options.budget) throw BudgetExceeded("enumerate_protocol: over budget");
  Odometer odo(recorder.bases());
  do {
    TapeSource tape(odo.digits());
    fn(run_protocol(kind, instance, tape, modulus, mutation));
  } while (odo.advance());
  return states;
}

namespace {

std::vector<NodeId> observer_nodes(const Instance& instance, ProtocolKind kind) {
  std::vector<NodeId> nodes;
  switch (kind) {
    case ProtocolKind::two_party:
    case ProtocolKind::naive_two_party: {
      int server = instance.leader == 1 ? 2 : 1;
      for (int j = 1; j <= instance.databases[static_cast<std::size_t>(server - 1)]; ++j) {
        nodes.push_back({server, j});
      }
      break;
    }
    case ProtocolKind::ring:
    case ProtocolKind::naive_ring: {
      int n_eff = instance.min_non_leader_databases();
      if (protocol_is_naive(kind)) n_eff = 2;
      for (int i = 2; i <= instance.entities(); ++i) {
        for (int j = 1; j <= n_eff; ++j) nodes.push_back({i, j});
      }
      break;
    }
    case ProtocolKind::star:
    case ProtocolKind::naive_star: {
      for (int i = 1; i <= instance.entities(); ++i) {
        if (i == instance.leader) continue;
        for (int j = 1; j <= instance.databases[static_cast<std::size_t>(i - 1)]; ++j) {
          nodes.push_back({i, j});
        }
      }
      break;
    }
  }
  return nodes;
}

void append_symbols(std::string& out, const std::vector<Symbol>& symbols) {
  out.push_back(static_cast<char>(symbols.size() & 0xff));
  for (Symbol s : symbols) out.push_back(static_cast<char>(s & 0xff));
}

// Randomness sections a node can read: its own entity's shared symbols, and
// for the star protocol the database's own correlated slice plus the global
// multiplier.
void append_accessible_randomness(std::string& out, const Outcome& outcome,
                                  const Instance& instance, ProtocolKind kind, NodeId obs) {
  auto section = [&outcome](const std::string& key) -> std::vector<Symbol> {
    auto it = outcome.entity_randomness.find(key);
    return it == outcome.entity_randomness.end() ? std::vector<Symbol>{} : it->second;
  };
  const std::string tag = "E" + std::to_string(obs.entity);
  if (obs.database == 0) {
    append_symbols(out, section(tag + ".own"));
    return;
  }
  switch (kind) {
    case ProtocolKind::two_party:
    case ProtocolKind::naive_two_party:
      append_symbols(out, section(tag + ".pool"));
      return;
    case ProtocolKind::ring:
    case ProtocolKind::naive_ring:
      append_symbols(out, section(tag + ".pad"));
      return;
    case ProtocolKind::star:
    case ProtocolKind::naive_star: {
      append_symbols(out, section(tag + ".pool"));
      append_symbols(out, section("c"));
      std::vector<Symbol> mine;
      if (obs.database >= 2) {
        const std::vector<Symbol> all = section(tag + ".that");
        const int ndb = instance.databases[static_cast<std::size_t>(obs.entity - 1)];
        for (std::size_t l = 1; l <= all.size(); ++l) {
          if (static_cast<int>((l - 1) % static_cast<std::size_t>(ndb - 1)) + 2 == obs.database) {
            mine.push_back(all[l - 1]);
          }
        }
      }
      append_symbols(out, mine);
      return;
    }
  }
}

std::string serialize_view(const Outcome& outcome, const Instance& instance, ProtocolKind kind,
                           NodeId obs, bool shape_only) {
  std::string out;
  out.reserve(128);
  for (const Message& m : outcome.transcript.messages()) {
    bool sent = m.from == obs;
    bool received = m.to == obs;
    if (!sent && !received) continue;
    out.push_back(sent ? 'S' : 'R');
    out.push_back(static_cast<char>(m.kind));
    out.push_back(static_cast<char>(m.round & 0xff));
    out.push_back(static_cast<char>((sent ? m.to : m.from).entity & 0xff));
    out.push_back(static_cast<char>((sent ? m.to : m.from).database & 0xff));
    if (shape_only) {
      out.push_back(static_cast<char>(m.payload.size() & 0xff));
    } else {
      append_symbols(out, m.payload);
    }
  }
  if (shape_only) {
    // Sizes of the randomness sections the node holds: lazily generated
    // symbols track the stopping structure, so they are part of the shape.
    std::string randomness;
    append_accessible_randomness(randomness, outcome, instance, kind, obs);
    out.push_back('|');
    for (std::size_t i = 0; i < randomness.size();) {
      unsigned char len = static_cast<unsigned char>(randomness[i]);
      out.push_back(static_cast<char>(len));
      i += 1 + len;
    }
  } else {
    append_accessible_randomness(out, outcome, instance, kind, obs);
  }
  return out;
}

std::string hex_preview(const std::string& bytes, std::size_t cap = 48) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes.size() && i < cap; ++i) {
    unsigned char c = static_cast<unsigned char>(bytes[i]);
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  if (bytes.size() > cap) out += "...";
  return out;
}

std::string describe_member(const Instance& instance) {
  std::string out;
  for (std::size_t i = 0; i < instance.sets.size(); ++i) {
    if (i) out += "|";
    out += "E" + std::to_string(i + 1) + "={";
    bool first = true;
    for (Index k : instance.sets[i].members) {
      if (!first) out += ",";
      out += instance.alphabet.label(k);
      first = false;
    }
    out += "}";
  }
  return out;
}

}  // namespace

ViewDistribution observer_view_distribution(const Instance& instance, ProtocolKind kind,
                                            Symbol modulus, Mutation mutation, NodeId observer,
                                            const AuditOptions& options) {
  ViewDistribution dist;
  try {
    dist.denominator = enumerate_protocol(
        instance, kind, modulus, mutation, options, [&](const Outcome& out) {
          dist.weight[serialize_view(out, instance, kind, observer, false)]++;
        });
  } catch (const BudgetExceeded&) {
    dist.exact = false;
    SeededSource rng(options.seed);
    for (std::uint64_t t = 0; t < options.fallback_trials; ++t) {
      Outcome out = run_protocol(kind, instance, rng, modulus, mutation);
      dist.weight[serialize_view(out, instance, kind, observer, false)]++;
    }
    dist.denominator = options.fallback_trials;
  }
  return dist;
}

bool same_distribution(const ViewDistribution& a, const ViewDistribution& b,
                       std::string* first_difference) {
  if (!a.exact || !b.exact) {
    // Seeded statistical fallback: chi-square homogeneity over pooled views.
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> cells;
    for (const auto& [v, c] : a.weight) cells[v].first += c;
    for (const auto& [v, c] : b.weight) cells[v].second += c;
    double na = static_cast<double>(a.denominator);
    double nb = static_cast<double>(b.denominator);
    double stat = 0.0;
    double other_a = 0.0, other_b = 0.0;
    int df = -1;
    for (const auto& [v, c] : cells) {
      double ca = static_cast<double>(c.first);
      double cb = static_cast<double>(c.second);
      if (ca + cb < 10.0) {
        other_a += ca;
        other_b += cb;
        continue;
      }
      double p = (ca + cb) / (na + nb);
      stat += (ca - na * p) * (ca - na * p) / (na * p) + (cb - nb * p) * (cb - nb * p) / (nb * p);
      ++df;
    }
    if (other_a + other_b >= 10.0) {
      double p = (other_a + other_b) / (na + nb);
      stat += (other_a - na * p) * (other_a - na * p) / (na * p) +
              (other_b - nb * p) * (other_b - nb * p) / (nb * p);
      ++df;
    }
    if (df < 1) return true;
    // Wilson-Hilferty critical value at alpha = 1e-3.
    double z = 3.0902;  // Phi^{-1}(0.999)
    double d = static_cast<double>(df);
    double crit = d * std::pow(1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d)), 3.0);
    if (stat > crit) {
      if (first_difference) *first_difference = "chi-square " + std::to_string(stat) +
                                                " > " + std::to_string(crit);
      return false;
    }
    return true;
  }
  auto ita = a.weight.begin();
  auto itb = b.weight.begin();
  while (ita != a.weight.end() || itb != b.weight.end()) {
    if (ita == a.weight.end() || (itb != b.weight.end() && itb->first < ita->first)) {
      if (first_difference) *first_difference = "view only in B: " + hex_preview(itb->first);
      return false;
    }
    if (itb == b.weight.end() || ita->first < itb->first) {
      if (first_difference) *first_difference = "view only in A: " + hex_preview(ita->first);
      return false;
    }
    // exact rational equality: count_a / den_a == count_b / den_b
    unsigned __int128 lhs = static_cast<unsigned __int128>(ita->second) * b.denominator;
    unsigned __int128 rhs = static_cast<unsigned __int128>(itb->second) * a.denominator;
    if (lhs != rhs) {
      if (first_difference) {
        *first_difference = "probability differs on view " + hex_preview(ita->first) + " (" +
                            std::to_string(ita->second) + "/" + std::to_string(a.denominator) +
                            " vs " + std::to_string(itb->second) + "/" +
                            std::to_string(b.denominator) + ")";
      }
      return false;
    }
    ++ita;
    ++itb;
  }
  return true;
}

int nominal_stop_round(const Instance& instance) {
  LocalProfile profile = local_profile(instance.objective, instance.leader_set());
  IncidenceVector common = intersection_oracle(instance).incidence;
  for (int r = 1; r <= profile.rounds(); ++r) {
    for (Index k : profile.runs[static_cast<std::size_t>(r - 1)]) {
      if (common.at(k)) return r;
    }
  }
  throw AssumptionViolation("nominal_stop_round: empty intersection");
}

int nominal_stop_class(const Instance& instance) {
  GlobalProfile profile = global_profile(instance.objective, instance.alphabet);
  IncidenceVector common = intersection_oracle(instance).incidence;
  for (int r = 1; r <= profile.rounds(); ++r) {
    for (Index k : profile.classes[static_cast<std::size_t>(r - 1)]) {
      if (common.at(k)) return r;
    }
  }
  throw AssumptionViolation("nominal_stop_class: empty intersection");
}

double nominal_leakage_entropy_bits(const Instance& instance, int entity) {
  if (entity == instance.leader) {
    throw ContractViolation("nominal_leakage_entropy_bits: pick a non-leader entity");
  }
  const int k = instance.alphabet.size();
  const int size = instance.sets[static_cast<std::size_t>(entity - 1)].size();
  const int nominal = static_cast<int>(
      nominal_leakage_index_set(instance, nominal_stop_round(instance)).size());
  const double total = binomial(k, size);
  double entropy = 0.0;
  for (int ones = 0; ones <= std::min(nominal, size); ++ones) {
    double p = binomial(k - nominal, size - ones) / total;
    if (p > 0.0) entropy -= binomial(nominal, ones) * p * std::log2(p);
  }
  return entropy;
}

namespace {

std::string incidence_string(const Instance& instance, int entity) {
  IncidenceVector x = incidence_vector(instance.sets[static_cast<std::size_t>(entity - 1)],
                                       instance.alphabet.size());
  std::string out;
  for (Index k = 1; k <= instance.alphabet.size(); ++k) out += char('0' + x.at(k));
  return out;
}

// Class key for the leader check: the leader's own set (its conditioning),
// the stopping behavior, and everything it is entitled to learn.
std::string nominal_leader_key(const Instance& instance, ProtocolKind kind) {
  std::ostringstream key;
  key << "own=" << incidence_string(instance, instance.leader) << ";";
  switch (kind) {
    case ProtocolKind::two_party:
    case ProtocolKind::naive_two_party: {
      int r = nominal_stop_round(instance);
      key << "R=" << r << ";";
      int server = instance.leader == 1 ? 2 : 1;
      IncidenceVector x2 = incidence_vector(instance.sets[static_cast<std::size_t>(server - 1)],
                                            instance.alphabet.size());
      for (Index k : nominal_leakage_index_set(instance, r)) key << int{x2.at(k)};
      break;
    }
    case ProtocolKind::star:
    case ProtocolKind::naive_star: {
      int r = nominal_stop_round(instance);
      key << "R=" << r << ";";
      for (int i = 1; i <= instance.entities(); ++i) {
        if (i == instance.leader) continue;
        IncidenceVector xi = incidence_vector(instance.sets[static_cast<std::size_t>(i - 1)],
                                              instance.alphabet.size());
        key << "E" << i << ":";
        for (Index k : nominal_leakage_index_set(instance, r)) key << int{xi.at(k)};
        key << ";";
      }
      break;
    }
    case ProtocolKind::ring:
    case ProtocolKind::naive_ring: {
      int r = nominal_stop_class(instance);
      key << "R=" << r << ";";
      GlobalProfile profile = global_profile(instance.objective, instance.alphabet);
      IncidenceVector common = intersection_oracle(instance).incidence;
      for (Index k : profile.classes[static_cast<std::size_t>(r - 1)]) key << int{common.at(k)};
      break;
    }
  }
  return key.str();
}

IndexSet expected_leader_knowledge(const Instance& instance, ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::two_party:
    case ProtocolKind::naive_two_party:
    case ProtocolKind::star:
    case ProtocolKind::naive_star:
      return nominal_leakage_index_set(instance, nominal_stop_round(instance));
    case ProtocolKind::ring:
    case ProtocolKind::naive_ring: {
      GlobalProfile profile = global_profile(instance.objective, instance.alphabet);
      int r = nominal_stop_class(instance);
      IndexSet out;
      for (int rr = 1; rr <= r; ++rr) {
        const IndexSet& cls = profile.classes[static_cast<std::size_t>(rr - 1)];
        out.insert(out.end(), cls.begin(), cls.end());
      }
      std::sort(out.begin(), out.end());
      return out;
    }
  }
  return {};
}

std::string index_set_to_string(const Instance& instance, const IndexSet& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ",";
    out += instance.alphabet.label(set[i]);
  }
  return out + "}";
}

}  // namespace

CheckResult reliability_check(const InstanceFamily& family, const AuditOptions& options) {
  CheckResult result;
  result.name = "reliability/" + family.name;
  for (const Instance& member : family.members) {
    IndexSet expected = solution_oracle(member);
    std::uint64_t bad = 0;
    try {
      std::uint64_t states = enumerate_protocol(
          member, family.protocol, family.field_modulus, family.mutation, options,
          [&](const Outcome& out) {
            if (out.solution != expected) ++bad;
          });
      result.states = std::max(result.states, states);
    } catch (const BudgetExceeded&) {
      result.exact = false;
      SeededSource rng(options.seed);
      for (std::uint64_t t = 0; t < options.fallback_trials; ++t) {
        Outcome out = run_protocol(family.protocol, member, rng, family.field_modulus,
                                   family.mutation);
        if (out.solution != expected) ++bad;
      }
    }
    if (bad > 0) {
      result.pass = false;
      result.detail = describe_member(member) + ": wrong solution in " + std::to_string(bad) +
                      " randomness states";
      result.counterexample = {{"member", describe_member(member)},
                               {"expected", index_set_to_string(member, expected)}};
      return result;
    }
  }
  result.detail = std::to_string(family.members.size()) + " members";
  return result;
}

namespace {

// Shared core of the two distribution checks: groups members by `key`,
// compares every member's observer-view distribution against the group head.
CheckResult distribution_check(const InstanceFamily& family, const AuditOptions& options,
                               const std::string& check_name,
                               const std::vector<NodeId>& observers,
                               const std::function<std::string(const Instance&, NodeId)>& key_of) {
  CheckResult result;
  result.name = check_name + "/" + family.name;
  std::uint64_t groups_compared = 0;
  for (NodeId obs : observers) {
    std::map<std::string, std::vector<const Instance*>> groups;
    for (const Instance& member : family.members) {
      groups[key_of(member, obs)].push_back(&member);
    }
    for (const auto& [key, members] : groups) {
      if (members.size() < 2) continue;
      ++groups_compared;
      ViewDistribution head = observer_view_distribution(*members[0], family.protocol,
                                                         family.field_modulus, family.mutation,
                                                         obs, options);
      result.states = std::max(result.states, head.denominator);
      if (!head.exact) result.exact = false;
      for (std::size_t i = 1; i < members.size(); ++i) {
        ViewDistribution other = observer_view_distribution(*members[i], family.protocol,
                                                            family.field_modulus,
                                                            family.mutation, obs, options);
        if (!other.exact) result.exact = false;
        std::string diff;
        if (!same_distribution(head, other, &diff)) {
          result.pass = false;
          result.detail = "observer " + obs.str() + ": views distinguish " +
                          describe_member(*members[0]) + " from " + describe_member(*members[i]) +
                          " (" + diff + ")";
          result.counterexample = {{"observer", obs.str()},
                                   {"member_a", describe_member(*members[0])},
                                   {"member_b", describe_member(*members[i])},
                                   {"difference", diff},
                                   {"class_key", key}};
          return result;
        }
      }
    }
  }
  result.detail = std::to_string(groups_compared) + " counterfactual classes compared";
  return result;
}

}  // namespace

CheckResult zero_leakage_check(const InstanceFamily& family, const AuditOptions& options) {
  if (family.members.empty()) throw ContractViolation("zero_leakage_check: empty family");
  std::vector<NodeId> observers = observer_nodes(family.members.front(), family.protocol);
  // Shape of the observer's traffic, from a deterministic probe run. Message
  // counts depend only on the sets and the objective, never on drawn values.
  auto shape_of = [&](const Instance& member, NodeId obs) {
    DrawRecorder recorder;
    Outcome out = run_protocol(family.protocol, member, recorder, family.field_modulus,
                               family.mutation);
    return serialize_view(out, member, family.protocol, obs, true);
  };
  auto key_of = [&](const Instance& member, NodeId obs) {
    return "own=" + incidence_string(member, obs.entity) + ";shape=" + shape_of(member, obs);
  };
  return distribution_check(family, options, "zero_leakage", observers, key_of);
}

CheckResult leader_leakage_check(const InstanceFamily& family, const AuditOptions& options) {
  if (family.members.empty()) throw ContractViolation("leader_leakage_check: empty family");
  const Instance& first = family.members.front();
  NodeId leader{first.leader, 0};
  // Knowledge-set part: what the run reports must be exactly nominal.
  for (const Instance& member : family.members) {
    SeededSource rng(options.seed);
    Outcome out = run_protocol(family.protocol, member, rng, family.field_modulus,
                               family.mutation);
    IndexSet expected = expected_leader_knowledge(member, family.protocol);
    if (out.leader_knowledge != expected) {
      CheckResult result;
      result.name = "leader_leakage/" + family.name;
      result.pass = false;
      result.detail = describe_member(member) + ": leader learned " +
                      index_set_to_string(member, out.leader_knowledge) + ", nominal is " +
                      index_set_to_string(member, expected);
      result.counterexample = {{"member", describe_member(member)},
                               {"leaked_index_set", index_set_to_string(member, out.leader_knowledge)},
                               {"nominal_index_set", index_set_to_string(member, expected)}};
      return result;
    }
  }
  auto key_of = [&](const Instance& member, NodeId) {
    return nominal_leader_key(member, family.protocol);
  };
  return distribution_check(family, options, "leader_leakage", {leader}, key_of);
}

namespace {

std::vector<IndexSet> nonempty_subsets(int alphabet_size, int max_size) {
  std::vector<IndexSet> out;
  for (int mask = 1; mask < (1 << alphabet_size); ++mask) {
    IndexSet s;
    for (int k = 1; k <= alphabet_size; ++k) {
      if (mask & (1 << (k - 1))) s.push_back(k);
    }
    if (static_cast<int>(s.size()) <= max_size) out.push_back(std::move(s));
  }
  return out;
}

bool sets_intersect(const std::vector<IndexSet>& sets, int alphabet_size) {
  for (int k = 1; k <= alphabet_size; ++k) {
    bool all = true;
    for (const IndexSet& s : sets) {
      if (!std::binary_search(s.begin(), s.end(), k)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

Instance family_instance(const std::vector<std::string>& labels, const std::vector<int>& values,
                         std::vector<IndexSet> sets, std::vector<int> dbs) {
  Instance inst;
  inst.alphabet.labels = labels;
  for (auto& s : sets) inst.sets.push_back(FeasibleSet{std::move(s)});
  inst.databases = std::move(dbs);
  inst.objective.direction = Direction::maximize;
  inst.objective.values = values;
  inst.objective.range = *std::max_element(values.begin(), values.end());
  inst.leader = 1;
  return inst;
}

}  // namespace

InstanceFamily two_party_small_family(Mutation mutation) {
  InstanceFamily family;
  family.name = "two_party_k4";
  family.protocol = ProtocolKind::two_party;
  family.field_modulus = 3;
  family.mutation = mutation;
  const std::vector<std::string> labels{"a", "b", "c", "d"};
  const std::vector<int> values{1, 1, 2, 2};
  // Mutated variants spend more randomness per run; keep the leader set
  // small enough that exhaustive enumeration stays inside the budget.
  const int max_p1 = mutation == Mutation::none ? 4 : 3;
  for (const IndexSet& s1 : nonempty_subsets(4, max_p1)) {
    for (const IndexSet& s2 : nonempty_subsets(4, 4)) {
      if (!sets_intersect({s1, s2}, 4)) continue;
      family.members.push_back(family_instance(labels, values, {s1, s2}, {1, 3}));
    }
  }
  return family;
}

InstanceFamily ring_small_family(int variant, Mutation mutation) {
  InstanceFamily family;
  family.name = variant == 0 ? "ring_k3_late_bulk" : "ring_k3_early_bulk";
  family.protocol = ProtocolKind::ring;
  family.field_modulus = 3;
  family.mutation = mutation;
  const std::vector<std::string> labels{"a", "b", "c"};
  const std::vector<int> values = variant == 0 ? std::vector<int>{1, 1, 2}
                                               : std::vector<int>{1, 2, 2};
  for (const IndexSet& s1 : nonempty_subsets(3, 3)) {
    for (const IndexSet& s2 : nonempty_subsets(3, 3)) {
      for (const IndexSet& s3 : nonempty_subsets(3, 3)) {
        if (!sets_intersect({s1, s2, s3}, 3)) continue;
        family.members.push_back(family_instance(labels, values, {s1, s2, s3}, {1, 2, 2}));
      }
    }
  }
  return family;
}

InstanceFamily star_small_family(int variant, Mutation mutation) {
  InstanceFamily family;
  family.name = variant == 0 ? "star_k2_distinct" : "star_k2_tied";
  family.protocol = ProtocolKind::star;
  family.field_modulus = 3;
  family.mutation = mutation;
  const std::vector<std::string> labels{"a", "b"};
  const std::vector<int> values = variant == 0 ? std::vector<int>{1, 2}
                                               : std::vector<int>{1, 1};
  for (const IndexSet& s1 : nonempty_subsets(2, 2)) {
    for (const IndexSet& s2 : nonempty_subsets(2, 2)) {
      for (const IndexSet& s3 : nonempty_subsets(2, 2)) {
        if (!sets_intersect({s1, s2, s3}, 2)) continue;
        family.members.push_back(family_instance(labels, values, {s1, s2, s3}, {1, 2, 2}));
      }
    }
  }
  return family;
}

InstanceFamily filter_members(const InstanceFamily& family,
                              const std::function<bool(const Instance&)>& keep) {
  InstanceFamily out = family;
  out.members.clear();
  for (const Instance& member : family.members) {
    if (keep(member)) out.members.push_back(member);
  }
  return out;
}

bool AuditReport::all_pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

nlohmann::json AuditReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    nlohmann::json j{{"name", c.name},
                     {"pass", c.pass},
                     {"exact", c.exact},
                     {"states", c.states},
                     {"detail", c.detail}};
    if (!c.pass) j["counterexample"] = c.counterexample;
    arr.push_back(j);
  }
  return {{"checks", arr}, {"all_pass", all_pass()}, {"notes", notes}};
}

AuditReport run_default_audit(const AuditOptions& options, Mutation mutation) {
  AuditReport report;
  report.notes =
      "distribution equality checked as exact rational identity over enumerated randomness; "
      "nominal-leakage entropy reported under a uniform prior over size-consistent sets";
  std::vector<InstanceFamily> families{
      two_party_small_family(mutation),
      ring_small_family(0, mutation),
      ring_small_family(1, mutation),
      star_small_family(0, mutation),
      star_small_family(1, mutation),
  };
  for (const InstanceFamily& family : families) {
    report.checks.push_back(reliability_check(family, options));
    report.checks.push_back(zero_leakage_check(family, options));
    report.checks.push_back(leader_leakage_check(family, options));
  }
  return report;
}

}  // namespace dofsp
