#include "dofsp/ring.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <map>

namespace dofsp {

namespace {

class RingSession {
 public:
  RingSession(const Instance& instance, RandomSource& rng, const RingConfig& config)
      : inst_(instance),
        rng_(rng),
        config_(config),
        profile_(global_profile(instance.objective, instance.alphabet)),
        field_(config.field_modulus ? *config.field_modulus : ring_default_modulus(profile_)),
        n_(instance.entities()),
        n_eff_(instance.min_non_leader_databases()) {
    if (instance.leader != 1) {
      throw ContractViolation("run_ring: entity 1 must lead the ring");
    }
    out_.field_modulus = static_cast<int>(field_.modulus());
    out_.transcript = Transcript(config.record_transcript);
    const int K = instance.alphabet.size();
    for (int i = 1; i <= n_; ++i) {
      IncidenceVector x = incidence_vector(instance.sets[static_cast<std::size_t>(i - 1)], K);
      IncidenceVector permuted;
      permuted.bits.resize(static_cast<std::size_t>(K));
      for (int p = 1; p <= K; ++p) {
        permuted.bits[static_cast<std::size_t>(p - 1)] =
            x.at(profile_.position_source[static_cast<std::size_t>(p - 1)]);
      }
      permuted_.push_back(std::move(permuted));
    }
  }

  Outcome run() {
    if (n_ < 3) throw ContractViolation("run_ring: need more than two entities");
    if (config_.mutation == Mutation::early_reveal) return run_over_curious();
    const int T = profile_.rounds();
    for (int r = 1; r <= T; ++r) {
      std::uint64_t cost_before = ledger_.total();
      const int mu_r = profile_.mu[static_cast<std::size_t>(r - 1)];
      if (r == T && mu_r == 1) {
        // Last class is a singleton and every earlier class missed: the
        // queries still travel the ring, but no answers are needed.
        push_queries(r, /*collect_answers=*/false);
        decide(r, profile_.classes.back(), true, true);
        out_.round_costs.push_back(ledger_.total() - cost_before);
        break;
      }
      Symbol m = cardinality_round(r);
      out_.round_cardinalities.push_back(m);
      if (m >= 1) {
        const IndexSet& cls = profile_.classes[static_cast<std::size_t>(r - 1)];
        if (m == static_cast<Symbol>(mu_r)) {
          decide(r, cls, true, false);
        } else {
          std::vector<std::uint8_t> slice_bits = retrieve_slice(r, /*signal=*/r < T);
          // Last slice coordinate is implied by the known cardinality.
          int seen = 0;
          for (std::uint8_t b : slice_bits) seen += b;
          slice_bits.push_back(static_cast<std::uint8_t>(static_cast<int>(m) - seen));
          IndexSet solution;
          for (std::size_t j = 0; j < slice_bits.size(); ++j) {
            if (slice_bits[j]) solution.push_back(cls[j]);
          }
          decide(r, solution, false, false);
        }
        out_.round_costs.push_back(ledger_.total() - cost_before);
        break;
      }
      out_.round_costs.push_back(ledger_.total() - cost_before);
    }
    finish();
    return std::move(out_);
  }

  // early_reveal mutation: every class is both sized and retrieved, through
  // the very last round, so the leader sees the whole joint slice structure.
  Outcome run_over_curious() {
    bool decided = false;
    const int T = profile_.rounds();
    for (int r = 1; r <= T; ++r) {
      Symbol m = cardinality_round(r);
      out_.round_cardinalities.push_back(m);
      std::vector<std::uint8_t> bits = retrieve_slice(r, /*signal=*/r < T);
      if (!decided && m >= 1) {
        const IndexSet& cls = profile_.classes[static_cast<std::size_t>(r - 1)];
        int seen = 0;
        for (std::uint8_t b : bits) seen += b;
        bits.push_back(static_cast<std::uint8_t>(static_cast<int>(m) - seen));
        IndexSet solution;
        for (std::size_t j = 0; j < bits.size(); ++j) {
          if (bits[j]) solution.push_back(cls[j]);
        }
        decide(r, solution, m == static_cast<Symbol>(cls.size()), false);
        decided = true;
      }
    }
    IndexSet everything;
    for (Index k = 1; k <= inst_.alphabet.size(); ++k) everything.push_back(k);
    out_.leader_knowledge = everything;
    finish();
    return std::move(out_);
  }

  Outcome run_naive() {
    // One full-length pass over the unpermuted incidence vectors.
    const int K = inst_.alphabet.size();
    auto raw = [&](int entity) {
      IncidenceVector x = incidence_vector(inst_.sets[static_cast<std::size_t>(entity - 1)], K);
      FieldVector v(field_, static_cast<std::size_t>(K));
      for (int k = 1; k <= K; ++k) v.set(static_cast<std::size_t>(k - 1), x.at(k));
      return v;
    };
    FieldVector h = leader_vector(static_cast<std::size_t>(K));
    std::array<FieldVector, 2> lane{h, add(h, raw(1))};
    auto sender = [this](int i, int lane_db) {
      return i == 1 ? NodeId{1, 0} : NodeId{i, lane_db};
    };
    for (int i = 2; i <= n_ - 1; ++i) {
      send(sender(i - 1, 1), {i, 1}, 1, MessageKind::query, lane[0].entries());
      send(sender(i - 1, 2), {i, 2}, 1, MessageKind::query, lane[1].entries());
      std::vector<Symbol> pad = entity_pad(i, static_cast<std::size_t>(K));
      FieldVector xi = raw(i);
      for (int l = 0; l < 2; ++l) {
        FieldVector next = hadamard(lane[static_cast<std::size_t>(l)], xi);
        for (std::size_t t = 0; t < next.size(); ++t) next.set(t, field_.add(next[t], pad[t]));
        lane[static_cast<std::size_t>(l)] = next;
      }
    }
    send(sender(n_ - 1, 1), {n_, 1}, 1, MessageKind::query, lane[0].entries());
    send(sender(n_ - 1, 2), {n_, 2}, 1, MessageKind::query, lane[1].entries());
    // Full masked vectors come back instead of scalars.
    std::vector<Symbol> pad = entity_pad(n_, static_cast<std::size_t>(K));
    FieldVector xn = raw(n_);
    std::array<std::vector<Symbol>, 2> answers;
    for (int l = 0; l < 2; ++l) {
      FieldVector prod = hadamard(lane[static_cast<std::size_t>(l)], xn);
      for (std::size_t t = 0; t < prod.size(); ++t) prod.set(t, field_.add(prod[t], pad[t]));
      answers[static_cast<std::size_t>(l)] = prod.entries();
      send({n_, l + 1}, {1, 0}, 1, MessageKind::answer, prod.entries());
    }
    IndexSet present;
    for (int k = 1; k <= K; ++k) {
      Symbol bit = field_.sub(answers[1][static_cast<std::size_t>(k - 1)],
                              answers[0][static_cast<std::size_t>(k - 1)]);
      if (bit) present.push_back(k);
    }
    if (present.empty()) throw AssumptionViolation("naive ring PSI: empty joint feasible set");
    int best = 0;
    for (Index k : present) {
      int v = inst_.objective.value_at(k);
      if (best == 0 || inst_.objective.better(v, best)) best = v;
    }
    for (Index k : present) {
      if (inst_.objective.value_at(k) == best) out_.solution.push_back(k);
    }
    out_.stopping_round = 1;
    for (int k = 1; k <= K; ++k) out_.leader_knowledge.push_back(k);
    finish();
    return std::move(out_);
  }

 private:
  struct LanePair {
    int a = 1;
    int b = 2;
  };

  LanePair lanes(int r) const {
    LanePair p;
    p.a = (2 * (r - 1)) % n_eff_ + 1;
    p.b = (2 * (r - 1) + 1) % n_eff_ + 1;
    return p;
  }

  void send(const NodeId& from, const NodeId& to, int round, MessageKind kind,
            std::vector<Symbol> payload) {
    ledger_.charge(from, to, inst_.leader, payload.size());
    out_.transcript.record({from, to, round, kind, std::move(payload)});
  }

  FieldVector leader_vector(std::size_t length) {
    FieldVector v = sample_uniform_vector(rng_, length, field_);
    if (config_.record_transcript) {
      auto& own = out_.entity_randomness["E1.own"];
      own.insert(own.end(), v.entries().begin(), v.entries().end());
    }
    return v;
  }

  // Shared pad of entity i for the current use; respects the mutation.
  std::vector<Symbol> entity_pad(int entity, std::size_t length) {
    std::vector<Symbol> pad(length);
    for (std::size_t t = 0; t < length; ++t) pad[t] = field_.sample(rng_);
    auto& first = first_pad_[entity];
    if (!first.has_value() && !pad.empty()) first = pad[0];
    if (config_.record_transcript) {
      auto& log = out_.entity_randomness["E" + std::to_string(entity) + ".pad"];
      log.insert(log.end(), pad.begin(), pad.end());
    }
    switch (config_.mutation) {
      case Mutation::drop_mask:
        return std::vector<Symbol>(length, 0);
      case Mutation::reuse_pad:
        return std::vector<Symbol>(length, first.value_or(0));
      default:
        return pad;
    }
  }

  FieldVector slice_of(int entity, int offset0, std::size_t len) const {
    FieldVector v(field_, len);
    for (std::size_t t = 0; t < len; ++t) {
      v.set(t, permuted_[static_cast<std::size_t>(entity - 1)]
                   .bits[static_cast<std::size_t>(offset0) + t]);
    }
    return v;
  }

  FieldVector hop(const FieldVector& incoming, int entity, const std::vector<Symbol>& pad) {
    FieldVector x = slice_of(entity, hop_offset0_, incoming.size());
    FieldVector out = hadamard(incoming, x);
    for (std::size_t t = 0; t < out.size(); ++t) out.set(t, field_.add(out[t], pad[t]));
    return out;
  }

  FieldVector masked_product(const FieldVector& incoming, int entity, int offset0,
                             std::size_t len, const std::vector<Symbol>& pad) {
    FieldVector x = slice_of(entity, offset0, incoming.size());
    FieldVector prod = hadamard(incoming, x);
    FieldVector out(field_, len);
    for (std::size_t t = 0; t < len; ++t) out.set(t, field_.add(prod[t], pad[t]));
    return out;
  }

  // Pushes one round of queries through the ring; optionally collects the
  // two scalar answers and returns the decoded cardinality.
  Symbol push_queries(int r, bool collect_answers) {
    const int mu_r = profile_.mu[static_cast<std::size_t>(r - 1)];
    if (static_cast<Symbol>(mu_r) >= field_.modulus()) {
      throw ContractViolation("ring cardinality round: slice length reaches the field modulus (ambiguous count)");
    }
    const int off0 = profile_.class_offset(r) - 1;
    hop_offset0_ = off0;
    LanePair lane = lanes(r);
    FieldVector h = leader_vector(static_cast<std::size_t>(mu_r));
    FieldVector x1 = slice_of(1, off0, static_cast<std::size_t>(mu_r));
    std::array<FieldVector, 2> q{h, add(h, x1)};
    const std::array<int, 2> db{lane.a, lane.b};
    send({1, 0}, {2, db[0]}, r, MessageKind::query, q[0].entries());
    send({1, 0}, {2, db[1]}, r, MessageKind::query, q[1].entries());
    for (int i = 2; i <= n_ - 1; ++i) {
      std::vector<Symbol> pad = entity_pad(i, static_cast<std::size_t>(mu_r));
      for (int l = 0; l < 2; ++l) {
        q[static_cast<std::size_t>(l)] = hop(q[static_cast<std::size_t>(l)], i, pad);
        send({i, db[static_cast<std::size_t>(l)]}, {i + 1, db[static_cast<std::size_t>(l)]}, r,
             MessageKind::query, q[static_cast<std::size_t>(l)].entries());
      }
      if (config_.check_hop_invariant) {
        FieldVector expect = slice_of(1, off0, static_cast<std::size_t>(mu_r));
        for (int ii = 2; ii <= i; ++ii) expect = hadamard(expect, slice_of(ii, off0, expect.size()));
        if (!(sub(q[1], q[0]) == expect)) {
          throw std::logic_error("ring hop invariant violated: lane difference is not the running product");
        }
      }
    }
    last_queries_ = q;
    last_lanes_ = lane;
    std::vector<Symbol> pad_n = entity_pad(n_, static_cast<std::size_t>(mu_r));
    last_pad_n_ = pad_n;
    if (!collect_answers) return 0;
    FieldVector xn = slice_of(n_, off0, static_cast<std::size_t>(mu_r));
    std::array<Symbol, 2> answers{};
    for (int l = 0; l < 2; ++l) {
      Symbol a = field_.add(dot(q[static_cast<std::size_t>(l)], xn),
                            pad_n[static_cast<std::size_t>(mu_r - 1)]);
      answers[static_cast<std::size_t>(l)] = a;
      send({n_, db[static_cast<std::size_t>(l)]}, {1, 0}, r, MessageKind::answer, {a});
    }
    return field_.sub(answers[1], answers[0]);
  }

  Symbol cardinality_round(int r) { return push_queries(r, true); }

  // Retrieval step at round r: masked elementwise products over all but the
  // last slice coordinate. Returns the recovered 0/1 coordinates.
  std::vector<std::uint8_t> retrieve_slice(int r, bool signal) {
    const int mu_r = profile_.mu[static_cast<std::size_t>(r - 1)];
    const int off0 = profile_.class_offset(r) - 1;
    const std::array<int, 2> db{last_lanes_.a, last_lanes_.b};
    if (signal) {
      for (int l = 0; l < 2; ++l) {
        Symbol s = field_.sample(rng_);
        if (config_.record_transcript) out_.entity_randomness["E1.own"].push_back(s);
        send({1, 0}, {n_, db[static_cast<std::size_t>(l)]}, r, MessageKind::signal, {s});
      }
    }
    const std::size_t len = static_cast<std::size_t>(mu_r - 1);
    std::array<std::vector<Symbol>, 2> answers;
    if (len > 0) {
      std::vector<Symbol> pad = last_pad_n_;
      pad.resize(len);
      for (int l = 0; l < 2; ++l) {
        FieldVector prod = masked_product(last_queries_[static_cast<std::size_t>(l)], n_, off0,
                                          len, pad);
        answers[static_cast<std::size_t>(l)] = prod.entries();
        send({n_, db[static_cast<std::size_t>(l)]}, {1, 0}, r, MessageKind::answer,
             prod.entries());
      }
    }
    std::vector<std::uint8_t> bits(len);
    out_.retrieval_download += 2 * len;
    for (std::size_t t = 0; t < len; ++t) {
      Symbol b = field_.sub(answers[1][t], answers[0][t]);
      if (b > 1) throw std::logic_error("ring retrieval decoded a non-binary slice entry");
      bits[t] = static_cast<std::uint8_t>(b);
    }
    return bits;
  }

  void decide(int r, IndexSet solution, bool full_hit, bool skipped) {
    out_.solution = std::move(solution);
    std::sort(out_.solution.begin(), out_.solution.end());
    out_.stopping_round = r;
    out_.full_hit = full_hit;
    out_.skipped_last_round = skipped;
    for (int rr = 1; rr <= r; ++rr) {
      const IndexSet& cls = profile_.classes[static_cast<std::size_t>(rr - 1)];
      out_.leader_knowledge.insert(out_.leader_knowledge.end(), cls.begin(), cls.end());
    }
    std::sort(out_.leader_knowledge.begin(), out_.leader_knowledge.end());
  }

  void finish() {
    out_.download = ledger_.download();
    out_.upload = ledger_.upload();
    out_.relayed = ledger_.relayed();
    out_.ledger = ledger_;
  }

  const Instance& inst_;
  RandomSource& rng_;
  RingConfig config_;
  GlobalProfile profile_;
  PrimeField field_;
  int n_;
  int n_eff_;
  std::vector<IncidenceVector> permuted_;
  int hop_offset0_ = 0;

  std::array<FieldVector, 2> last_queries_{FieldVector{PrimeField{2}, 0},
                                           FieldVector{PrimeField{2}, 0}};
  LanePair last_lanes_;
  std::vector<Symbol> last_pad_n_;
  std::map<int, std::optional<Symbol>> first_pad_;

  CostLedger ledger_;
  Outcome out_;
};

}  // namespace

Symbol ring_default_modulus(const GlobalProfile& profile) {
  int max_mu = 2;
  for (int m : profile.mu) max_mu = std::max(max_mu, m);
  return smallest_prime_above(static_cast<std::uint64_t>(max_mu));
}

Outcome run_ring(const Instance& instance, RandomSource& rng, const RingConfig& config) {
  instance.validate();
  RingSession session(instance, rng, config);
  return session.run();
}

Outcome naive_psi_ring(const Instance& instance, RandomSource& rng, const RingConfig& config) {
  instance.validate();
  RingSession session(instance, rng, config);
  return session.run_naive();
}

std::vector<std::vector<int>> round_assignment(int effective_databases, int rounds) {
  if (effective_databases < 2) {
    throw ContractViolation("round_assignment: need at least two databases");
  }
  std::vector<std::vector<int>> assignment(static_cast<std::size_t>(effective_databases));
  if (effective_databases == 2) {
    for (int r = 1; r <= rounds; ++r) {
      assignment[0].push_back(r);
      assignment[1].push_back(r);
    }
    return assignment;
  }
  const int n = effective_databases;
  for (int j = 1; j <= n; ++j) {
    auto& rj = assignment[static_cast<std::size_t>(j - 1)];
    if (n % 2 == 0) {
      int half = n / 2;
      int lead = (j + 1) / 2;
      for (int k = 0; k <= (2 * (rounds - lead)) / n; ++k) {
        int r = k * half + lead;
        if (r >= 1 && r <= rounds) rj.push_back(r);
      }
    } else if (j % 2 == 1) {
      int count = (2 * rounds - j - 1 + n - 1) / n;  // ceil
      for (int k = 0; k <= count; ++k) {
        int r = (k * n) / 2 + (j + 1) / 2;
        if (r >= 1 && r <= rounds) rj.push_back(r);
      }
    } else {
      int count = (2 * rounds - j) / n;  // floor
      for (int k = 0; k <= count; ++k) {
        int r = (k * n + 1) / 2 + j / 2;
        if (r >= 1 && r <= rounds) rj.push_back(r);
      }
    }
    std::sort(rj.begin(), rj.end());
    rj.erase(std::unique(rj.begin(), rj.end()), rj.end());
  }
  return assignment;
}

std::uint64_t ring_worst_case_cost(int stopping_round, const std::vector<int>& mu, int entities,
                            bool full_hit) {
  const int T = static_cast<int>(mu.size());
  if (stopping_round < 1 || stopping_round > T) {
    throw ContractViolation("ring_worst_case_cost: round outside profile");
  }
  std::int64_t n = entities;
  std::int64_t r = stopping_round;
  std::int64_t sum = 0;
  for (int t = 1; t <= stopping_round; ++t) sum += mu[static_cast<std::size_t>(t - 1)];
  std::int64_t sum_pre = sum - mu[static_cast<std::size_t>(stopping_round - 1)];
  const int mu_r = mu[static_cast<std::size_t>(stopping_round - 1)];
  std::int64_t cost;
  if (stopping_round < T) {
    cost = (mu_r == 1 || full_hit) ? 2 * n * sum + 2 * (r - sum)
                                   : 2 * n * sum + 2 * (r - sum_pre);
  } else {
    std::int64_t k = sum;  // = K
    if (mu_r == 1) {
      cost = 2 * n * k + 2 * (r - 1 - k);
    } else if (full_hit) {
      cost = 2 * n * k + 2 * (r - k);
    } else {
      cost = 2 * n * k + 2 * (r - 1 - sum_pre);
    }
  }
  assert(cost >= 0);
  return static_cast<std::uint64_t>(cost);
}

std::uint64_t naive_psi_ring_cost(int entities, int alphabet_size) {
  return 2ull * static_cast<std::uint64_t>(entities) * static_cast<std::uint64_t>(alphabet_size);
}

std::uint64_t expected_ring_cost(const Outcome& outcome, const GlobalProfile& profile,
                                 int entities) {
  return ring_worst_case_cost(outcome.stopping_round, profile.mu, entities, outcome.full_hit);
}

}  // namespace dofsp
