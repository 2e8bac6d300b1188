#include "dofsp/star.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace dofsp {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

class StarSession {
 public:
  StarSession(const Instance& instance, RandomSource& rng, const StarConfig& config)
      : inst_(instance),
        rng_(rng),
        config_(config),
        profile_(local_profile(instance.objective, instance.leader_set())),
        field_(config.field_modulus ? *config.field_modulus
                                    : star_default_modulus(instance.entities())) {
    if (field_.modulus() <= static_cast<Symbol>(instance.entities() - 1)) {
      throw ContractViolation("run_star: field modulus must exceed N-1");
    }
    out_.field_modulus = static_cast<int>(field_.modulus());
    out_.transcript = Transcript(config.record_transcript);
    for (int i = 1; i <= inst_.entities(); ++i) {
      if (i == inst_.leader) continue;
      non_leaders_.push_back(i);
      dbs_.push_back(inst_.databases[static_cast<std::size_t>(i - 1)]);
      incidence_.push_back(
          incidence_vector(inst_.sets[static_cast<std::size_t>(i - 1)], inst_.alphabet.size()));
    }
    randomness_ = gen_correlated_randomness(rng_, field_, inst_.entities(), dbs_,
                                            inst_.leader_set().size(),
                                            config.forced_multiplier);
    cursor_.assign(non_leaders_.size(), PerEntity{});
    if (config.record_transcript) record_randomness();
  }

  Outcome run(bool one_shot) {
    const int L = profile_.rounds();
    bool decided = false;
    for (int r = 1; r <= L && !decided; ++r) {
      if (!one_shot && r == L && profile_.alpha.back() == 1) {
        // Sole remaining candidate: settled by the non-empty-intersection
        // assumption without querying.
        decide(r, profile_.runs.back(), true);
        decided = true;
        break;
      }
      IndexSet zeros = star_round(r);
      if (!one_shot && !zeros.empty()) {
        decide(r, zeros, false);
        decided = true;
      }
    }
    if (one_shot) {
      IndexSet present;
      for (std::size_t t = 0; t < queried_.size(); ++t) {
        if (out_.zero_test_values[t] == 0) present.push_back(queried_[t]);
      }
      if (present.empty()) throw AssumptionViolation("naive star PSI: empty joint feasible set");
      int best = 0;
      for (Index u : present) {
        int v = inst_.objective.value_at(u);
        if (best == 0 || inst_.objective.better(v, best)) best = v;
      }
      for (Index u : present) {
        if (inst_.objective.value_at(u) == best) out_.solution.push_back(u);
      }
      out_.stopping_round = L;
      out_.leader_knowledge = inst_.leader_set().members;
      decided = true;
    }
    if (!decided) {
      throw AssumptionViolation("run_star: no feasible value found (empty intersection)");
    }
    out_.download = ledger_.download();
    out_.upload = ledger_.upload();
    out_.relayed = ledger_.relayed();
    out_.ledger = ledger_;
    return std::move(out_);
  }

 private:
  struct PerEntity {
    int current_vector = 0;  // global index of the vector in use, 0 = none
    Symbol bare_answer = 0;  // leader's reference answer for that vector
  };

  NodeId leader_node() const { return {inst_.leader, 0}; }

  void send(const NodeId& from, const NodeId& to, int round, MessageKind kind,
            std::vector<Symbol> payload) {
    ledger_.charge(from, to, inst_.leader, payload.size());
    out_.transcript.record({from, to, round, kind, std::move(payload)});
  }

  void record_randomness() {
    for (std::size_t e = 0; e < non_leaders_.size(); ++e) {
      std::string tag = "E" + std::to_string(non_leaders_[e]);
      out_.entity_randomness[tag + ".pool"] = randomness_.local[e];
      out_.entity_randomness[tag + ".that"] = randomness_.t_hat[e];
    }
    out_.entity_randomness["c"] = {randomness_.global_multiplier};
  }

  const FieldVector& global_vector(int k, int round) {
    while (static_cast<int>(vectors_.size()) < k) {
      vectors_.push_back(
          sample_uniform_vector(rng_, static_cast<std::size_t>(inst_.alphabet.size()), field_));
      ++out_.vectors_drawn;
      if (config_.record_transcript) {
        auto& own = out_.entity_randomness["E" + std::to_string(inst_.leader) + ".own"];
        const auto& entries = vectors_.back().entries();
        own.insert(own.end(), entries.begin(), entries.end());
      }
      (void)round;
    }
    return vectors_[static_cast<std::size_t>(k - 1)];
  }

  Symbol pad_for(std::size_t e, int k) const {
    switch (config_.mutation) {
      case Mutation::drop_mask: return 0;
      case Mutation::reuse_pad: return randomness_.local[e][0];
      default: return randomness_.local[e][static_cast<std::size_t>(k - 1)];
    }
  }

  Symbol entity_dot(std::size_t e, const FieldVector& query) const {
    Symbol a = 0;
    const IncidenceVector& x = incidence_[e];
    for (Index k = 1; k <= x.size(); ++k) {
      a = field_.add(a, field_.mul(query[static_cast<std::size_t>(k - 1)], x.at(k)));
    }
    return a;
  }

  // Queries databases of every non-leader entity for index u (the l-th
  // retrieval overall) and returns the decoded zero-test value.
  Symbol query_index(int round, Index u, int l) {
    const Symbol c = randomness_.global_multiplier;
    Symbol z = 0;
    for (std::size_t e = 0; e < non_leaders_.size(); ++e) {
      const int entity = non_leaders_[e];
      const int ndb = dbs_[e];
      const int k = static_cast<int>(ceil_div(static_cast<std::uint64_t>(l),
                                              static_cast<std::uint64_t>(ndb - 1)));
      const int db = 2 + (l - 1) % (ndb - 1);
      const FieldVector& h = global_vector(k, round);
      if (cursor_[e].current_vector < k) {
        cursor_[e].current_vector = k;
        send(leader_node(), {entity, 1}, round, MessageKind::query, h.entries());
        Symbol bare = field_.mul(c, field_.add(entity_dot(e, h), pad_for(e, k)));
        send({entity, 1}, leader_node(), round, MessageKind::answer, {bare});
        cursor_[e].bare_answer = bare;
      }
      FieldVector q = h;
      q.set(static_cast<std::size_t>(u - 1), field_.add(q[static_cast<std::size_t>(u - 1)], 1));
      send(leader_node(), {entity, db}, round, MessageKind::query, q.entries());
      Symbol masked = field_.add(entity_dot(e, q), pad_for(e, k));
      masked = field_.add(masked, randomness_.t_hat[e][static_cast<std::size_t>(l - 1)]);
      Symbol ans = field_.mul(c, masked);
      send({entity, db}, leader_node(), round, MessageKind::answer, {ans});
      z = field_.add(z, field_.sub(ans, cursor_[e].bare_answer));
    }
    return z;
  }

  // One search round over J_r; returns the indices whose zero test fired.
  IndexSet star_round(int r) {
    IndexSet zeros;
    for (Index u : profile_.runs[static_cast<std::size_t>(r - 1)]) {
      ++counter_;
      Symbol z = query_index(r, u, counter_);
      queried_.push_back(u);
      out_.zero_test_values.push_back(z);
      if (z == 0) zeros.push_back(u);
    }
    return zeros;
  }

  void decide(int r, IndexSet solution, bool skipped) {
    out_.solution = std::move(solution);
    std::sort(out_.solution.begin(), out_.solution.end());
    out_.stopping_round = r;
    out_.skipped_last_round = skipped;
    out_.full_hit = skipped;
    for (int rr = 1; rr <= r; ++rr) {
      const IndexSet& run = profile_.runs[static_cast<std::size_t>(rr - 1)];
      out_.leader_knowledge.insert(out_.leader_knowledge.end(), run.begin(), run.end());
    }
    std::sort(out_.leader_knowledge.begin(), out_.leader_knowledge.end());
  }

  const Instance& inst_;
  RandomSource& rng_;
  StarConfig config_;
  LocalProfile profile_;
  PrimeField field_;
  std::vector<int> non_leaders_;
  std::vector<int> dbs_;
  std::vector<IncidenceVector> incidence_;
  StarRandomness randomness_;
  std::vector<FieldVector> vectors_;
  std::vector<PerEntity> cursor_;
  IndexSet queried_;
  int counter_ = 0;

  CostLedger ledger_;
  Outcome out_;
};

}  // namespace

int select_leader(const Instance& instance) {
  std::vector<std::uint64_t> costs = leader_selection_costs(instance);
  std::size_t best = 0;
  for (std::size_t l = 1; l < costs.size(); ++l) {
    if (costs[l] < costs[best]) best = l;
  }
  return static_cast<int>(best + 1);
}

std::vector<std::uint64_t> leader_selection_costs(const Instance& instance) {
  std::vector<std::uint64_t> costs;
  for (int l = 1; l <= instance.entities(); ++l) {
    std::uint64_t pl =
        static_cast<std::uint64_t>(instance.sets[static_cast<std::size_t>(l - 1)].size());
    std::uint64_t total = 0;
    for (int i = 1; i <= instance.entities(); ++i) {
      if (i == l) continue;
      std::uint64_t ni = static_cast<std::uint64_t>(instance.databases[static_cast<std::size_t>(i - 1)]);
      total += ceil_div(pl * ni, ni - 1);
    }
    costs.push_back(total);
  }
  return costs;
}

Symbol StarRandomness::t_for(int entity, int database, int slot, int databases_of_entity) const {
  if (database == 1) return 0;
  int l = (slot - 1) * (databases_of_entity - 1) + (database - 1);
  return t_hat[static_cast<std::size_t>(entity - 2)][static_cast<std::size_t>(l - 1)];
}

StarRandomness gen_correlated_randomness(RandomSource& rng, const PrimeField& field,
                                         int entities, const std::vector<int>& non_leader_dbs,
                                         int leader_set_size,
                                         std::optional<Symbol> forced_multiplier) {
  if (static_cast<int>(non_leader_dbs.size()) != entities - 1) {
    throw ContractViolation("gen_correlated_randomness: one database count per non-leader");
  }
  StarRandomness out;
  out.global_multiplier = forced_multiplier ? *forced_multiplier : field.sample_nonzero(rng);
  if (out.global_multiplier == 0) {
    throw ContractViolation("gen_correlated_randomness: multiplier must be nonzero");
  }
  for (int e = 0; e < entities - 1; ++e) {
    int ndb = non_leader_dbs[static_cast<std::size_t>(e)];
    std::size_t m = static_cast<std::size_t>(
        ceil_div(static_cast<std::uint64_t>(leader_set_size), static_cast<std::uint64_t>(ndb - 1)));
    std::vector<Symbol> pool(m);
    for (Symbol& s : pool) s = field.sample(rng);
    out.local.push_back(std::move(pool));
    out.t_hat.emplace_back(static_cast<std::size_t>(leader_set_size), 0);
  }
  // Free symbols for all but the last entity; the last one closes each sum
  // to q-(N-1).
  const Symbol target = field.reduce(field.modulus() - static_cast<Symbol>(entities - 1) +
                                     field.modulus());
  for (int l = 0; l < leader_set_size; ++l) {
    Symbol sum = 0;
    for (int e = 0; e + 1 < entities - 1; ++e) {
      Symbol v = field.sample(rng);
      out.t_hat[static_cast<std::size_t>(e)][static_cast<std::size_t>(l)] = v;
      sum = field.add(sum, v);
    }
    out.t_hat.back()[static_cast<std::size_t>(l)] = field.sub(target, sum);
  }
  return out;
}

Symbol star_default_modulus(int entities) {
  return smallest_prime_above(static_cast<std::uint64_t>(entities - 1));
}

Outcome run_star(const Instance& instance, RandomSource& rng, const StarConfig& config) {
  instance.validate();
  StarSession session(instance, rng, config);
  return session.run(config.mutation == Mutation::early_reveal);
}

Outcome naive_psi_star_run(const Instance& instance, RandomSource& rng,
                           const StarConfig& config) {
  instance.validate();
  StarSession session(instance, rng, config);
  return session.run(true);
}

std::uint64_t star_worst_case_download(int alpha_prefix_sum, const std::vector<int>& non_leader_dbs) {
  std::uint64_t total = 0;
  for (int ndb : non_leader_dbs) {
    std::uint64_t ni = static_cast<std::uint64_t>(ndb);
    total += ceil_div(static_cast<std::uint64_t>(alpha_prefix_sum) * ni, ni - 1);
  }
  return total;
}

std::uint64_t naive_psi_star(const Instance& instance) {
  std::vector<int> dbs;
  for (int i = 1; i <= instance.entities(); ++i) {
    if (i != instance.leader) dbs.push_back(instance.databases[static_cast<std::size_t>(i - 1)]);
  }
  return naive_psi_star_cost(instance.leader_set().size(), dbs);
}

std::uint64_t naive_psi_star_cost(int leader_set_size, const std::vector<int>& non_leader_dbs) {
  return star_worst_case_download(leader_set_size, non_leader_dbs);
}

std::uint64_t expected_star_download(const Outcome& outcome, const LocalProfile& profile,
                                     const std::vector<int>& non_leader_dbs) {
  int rounds = outcome.stopping_round - (outcome.skipped_last_round ? 1 : 0);
  int prefix = 0;
  for (int r = 1; r <= rounds; ++r) prefix += profile.alpha[static_cast<std::size_t>(r - 1)];
  return star_worst_case_download(prefix, non_leader_dbs);
}

}  // namespace dofsp
