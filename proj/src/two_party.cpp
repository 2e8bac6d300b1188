#include "dofsp/two_party.hpp"

#include <algorithm>
#include <cassert>

namespace dofsp {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// One protocol run. The leader keeps a single standing query vector; each
// database of the server may see at most one query built from it.
class TwoPartySession {
 public:
  TwoPartySession(const Instance& instance, RandomSource& rng, const TwoPartyConfig& config)
      : inst_(instance),
        rng_(rng),
        config_(config),
        profile_(local_profile(instance.objective, instance.leader_set())),
        field_(config.field_modulus ? *config.field_modulus
                                    : two_party_default_modulus(profile_)),
        server_entity_(instance.leader == 1 ? 2 : 1),
        server_dbs_(instance.databases[static_cast<std::size_t>(server_entity_ - 1)]),
        x2_(incidence_vector(instance.sets[static_cast<std::size_t>(server_entity_ - 1)],
                             instance.alphabet.size())),
        pool_capacity_(static_cast<int>(
            ceil_div(static_cast<std::uint64_t>(instance.leader_set().size()),
                     static_cast<std::uint64_t>(server_dbs_ - 1)))) {
    if (instance.entities() != 2) {
      throw ContractViolation("run_two_party: exactly two entities required");
    }
    if (field_.modulus() <= static_cast<Symbol>(profile_.max_alpha())) {
      throw ContractViolation("run_two_party: field modulus must exceed max run size");
    }
    out_.field_modulus = static_cast<int>(field_.modulus());
    out_.transcript = Transcript(config.record_transcript);
  }

  Outcome run() {
    if (config_.mutation == Mutation::early_reveal) return run_over_curious();
    const int L = profile_.rounds();
    for (int r = 1; r <= L; ++r) {
      if (r == L && profile_.alpha.back() == 1) {
        // The sole remaining candidate must be feasible: settle without
        // communication.
        decide(r, profile_.runs.back(), false, true);
        break;
      }
      Symbol m = cardinality_round(r);
      out_.round_cardinalities.push_back(m);
      const int alpha_r = profile_.alpha[static_cast<std::size_t>(r - 1)];
      if (m == static_cast<Symbol>(alpha_r)) {
        decide(r, profile_.runs[static_cast<std::size_t>(r - 1)], true, false);
        break;
      }
      if (m >= 1) {
        decide(r, retrieve_run(r, m), false, false);
        break;
      }
    }
    finish();
    return std::move(out_);
  }

  // early_reveal mutation: never stops early, retrieving every run's bits,
  // so the leader learns the server's whole restriction of the support.
  Outcome run_over_curious() {
    bool decided = false;
    for (int r = 1; r <= profile_.rounds(); ++r) {
      Symbol m = cardinality_round(r);
      out_.round_cardinalities.push_back(m);
      const IndexSet& run = profile_.runs[static_cast<std::size_t>(r - 1)];
      IndexSet present;
      Symbol seen = 0;
      for (std::size_t i = 0; i + 1 < run.size(); ++i) {
        if (retrieve_bit(r, run[i])) {
          present.push_back(run[i]);
          ++seen;
        }
      }
      if (seen < m) present.push_back(run.back());
      if (!decided && m >= 1) {
        decide(r, m == static_cast<Symbol>(run.size()) ? run : present,
               m == static_cast<Symbol>(run.size()), false);
        decided = true;
      }
    }
    out_.leader_knowledge = inst_.leader_set().members;
    finish();
    return std::move(out_);
  }

  Outcome run_naive() {
    IndexSet support = inst_.leader_set().members;
    IndexSet present;
    for (Index j : support) {
      if (retrieve_bit(0, j)) present.push_back(j);
    }
    int best = 0;
    for (Index j : present) {
      int v = inst_.objective.value_at(j);
      if (best == 0 || inst_.objective.better(v, best)) best = v;
    }
    if (present.empty()) throw AssumptionViolation("naive PSI: empty joint feasible set");
    for (Index j : present) {
      if (inst_.objective.value_at(j) == best) out_.solution.push_back(j);
    }
    out_.stopping_round = profile_.rounds();
    out_.leader_knowledge = support;
    finish();
    return std::move(out_);
  }

 private:
  NodeId leader_node() const { return {inst_.leader, 0}; }
  NodeId server_node(int db) const { return {server_entity_, db}; }

  void send(const NodeId& from, const NodeId& to, int round, MessageKind kind,
            std::vector<Symbol> payload) {
    ledger_.charge(from, to, inst_.leader, payload.size());
    out_.transcript.record({from, to, round, kind, std::move(payload)});
  }

  Symbol answer_mask() const {
    switch (config_.mutation) {
      case Mutation::drop_mask: return 0;
      case Mutation::reuse_pad: return pads_.front();
      default: return pads_.back();
    }
  }

  // Server-side answer to `query` paired with the standing pool symbol.
  Symbol server_answer(const FieldVector& query, int db, int round) {
    FieldVector x2f(field_, 0);
    Symbol a = 0;
    for (Index k = 1; k <= x2_.size(); ++k) {
      a = field_.add(a, field_.mul(query[static_cast<std::size_t>(k - 1)], x2_.at(k)));
    }
    a = field_.add(a, answer_mask());
    send(server_node(db), leader_node(), round, MessageKind::answer, {a});
    return a;
  }

  // Draws a fresh query vector with its pool symbol, queries database 1 with
  // the bare vector and stores the reference answer.
  void fresh_slot(int round) {
    h_ = sample_uniform_vector(rng_, static_cast<std::size_t>(inst_.alphabet.size()), field_);
    if (config_.record_transcript) {
      auto& own = out_.entity_randomness["E" + std::to_string(inst_.leader) + ".own"];
      own.insert(own.end(), h_->entries().begin(), h_->entries().end());
    }
    pads_.push_back(field_.sample(rng_));
    ++out_.vectors_drawn;
    if (out_.vectors_drawn > pool_capacity_ && config_.mutation == Mutation::none) {
      throw std::logic_error("two-party pool exhausted: more vectors than shared pad symbols");
    }
    next_db_ = 2;
    send(leader_node(), server_node(1), round, MessageKind::query, h_->entries());
    bare_answer_ = server_answer(*h_, 1, round);
  }

  bool slot_free() const { return h_.has_value() && next_db_ <= server_dbs_; }

  // Sends h + offset to the next unused database; returns that answer minus
  // the standing bare answer.
  Symbol offset_query(const FieldVector& offset, int round) {
    if (!slot_free()) fresh_slot(round);
    FieldVector q = add(*h_, offset);
    int db = next_db_++;
    send(leader_node(), server_node(db), round, MessageKind::query, q.entries());
    Symbol a = server_answer(q, db, round);
    return field_.sub(a, bare_answer_);
  }

  Symbol cardinality_round(int r) {
    FieldVector indicator(field_, static_cast<std::size_t>(inst_.alphabet.size()));
    for (Index j : profile_.runs[static_cast<std::size_t>(r - 1)]) {
      indicator.set(static_cast<std::size_t>(j - 1), 1);
    }
    return offset_query(indicator, r);
  }

  std::uint8_t retrieve_bit(int round, Index j) {
    FieldVector unit(field_, static_cast<std::size_t>(inst_.alphabet.size()));
    unit.set(static_cast<std::size_t>(j - 1), 1);
    Symbol bit = offset_query(unit, round);
    return static_cast<std::uint8_t>(bit & 1);
  }

  IndexSet retrieve_run(int r, Symbol cardinality) {
    const IndexSet& run = profile_.runs[static_cast<std::size_t>(r - 1)];
    if (cardinality == 0 || cardinality >= static_cast<Symbol>(run.size())) {
      throw ContractViolation("retrieve_run: cardinality outside (0, alpha_r)");
    }
    std::uint64_t download_before = ledger_.download();
    IndexSet found;
    Symbol seen = 0;
    for (std::size_t i = 0; i + 1 < run.size(); ++i) {  // max(J_r) is left out
      if (retrieve_bit(r, run[i])) {
        found.push_back(run[i]);
        ++seen;
      }
    }
    if (seen < cardinality) found.push_back(run.back());  // inferred bit
    out_.retrieval_download = ledger_.download() - download_before;
    return found;
  }

  void decide(int r, IndexSet solution, bool full_hit, bool skipped) {
    out_.solution = std::move(solution);
    out_.stopping_round = r;
    out_.full_hit = full_hit;
    out_.skipped_last_round = skipped;
    for (int rr = 1; rr <= r; ++rr) {
      const IndexSet& run = profile_.runs[static_cast<std::size_t>(rr - 1)];
      out_.leader_knowledge.insert(out_.leader_knowledge.end(), run.begin(), run.end());
    }
    std::sort(out_.leader_knowledge.begin(), out_.leader_knowledge.end());
  }

  void finish() {
    if (config_.record_transcript) {
      out_.entity_randomness["E" + std::to_string(server_entity_) + ".pool"] = pads_;
    }
    out_.download = ledger_.download();
    out_.upload = ledger_.upload();
    out_.relayed = ledger_.relayed();
    out_.ledger = ledger_;
    std::sort(out_.solution.begin(), out_.solution.end());
  }

  const Instance& inst_;
  RandomSource& rng_;
  TwoPartyConfig config_;
  LocalProfile profile_;
  PrimeField field_;
  int server_entity_;
  int server_dbs_;
  IncidenceVector x2_;
  int pool_capacity_;

  std::optional<FieldVector> h_;
  std::vector<Symbol> pads_;
  Symbol bare_answer_ = 0;
  int next_db_ = 1;

  CostLedger ledger_;
  Outcome out_;
};

}  // namespace

Symbol two_party_default_modulus(const LocalProfile& profile) {
  return smallest_prime_above(static_cast<std::uint64_t>(profile.max_alpha()));
}

Outcome run_two_party(const Instance& instance, RandomSource& rng,
                      const TwoPartyConfig& config) {
  instance.validate();
  TwoPartySession session(instance, rng, config);
  return session.run();
}

Outcome naive_psi_two_party(const Instance& instance, RandomSource& rng,
                            const TwoPartyConfig& config) {
  instance.validate();
  TwoPartySession session(instance, rng, config);
  return session.run_naive();
}

std::uint64_t two_party_worst_case_download(int stopping_round, int alpha_r, int databases, bool full_hit) {
  if (stopping_round <= 0) return 0;
  if (databases < 2) throw ContractViolation("two_party_worst_case_download: need at least 2 databases");
  std::uint64_t n2 = static_cast<std::uint64_t>(databases);
  std::uint64_t work = full_hit ? static_cast<std::uint64_t>(stopping_round)
                                : static_cast<std::uint64_t>(stopping_round + alpha_r - 1);
  return ceil_div(work * n2, n2 - 1);
}

std::uint64_t naive_psi_two_party_cost(int leader_set_size, int databases) {
  std::uint64_t n2 = static_cast<std::uint64_t>(databases);
  return ceil_div(static_cast<std::uint64_t>(leader_set_size) * n2, n2 - 1);
}

std::uint64_t expected_two_party_download(const Outcome& outcome, const LocalProfile& profile,
                                          int databases) {
  if (outcome.skipped_last_round) {
    return two_party_worst_case_download(outcome.stopping_round - 1, 1, databases, true);
  }
  int alpha_r = profile.alpha[static_cast<std::size_t>(outcome.stopping_round - 1)];
  return two_party_worst_case_download(outcome.stopping_round, alpha_r, databases, outcome.full_hit);
}

}  // namespace dofsp
