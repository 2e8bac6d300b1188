#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "dofsp/analysis.hpp"
#include "dofsp/audit.hpp"
#include "dofsp/random.hpp"
#include "dofsp/ring.hpp"
#include "dofsp/star.hpp"
#include "dofsp/two_party.hpp"

using namespace dofsp;

namespace {

// Collects a per-criterion verdict line alongside the doctest assertions.
struct Criterion {
  const char* name;
  double limit_seconds;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool ok = true;

  Criterion(const char* n, double limit = 0.0) : name(n), limit_seconds(limit) {}

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  void expect(bool condition, const char* what) {
    if (!condition) {
      ok = false;
      std::printf("    failed: %s\n", what);
    }
    CHECK_MESSAGE(condition, std::string(what));
  }

  void note(const std::string& text) { std::printf("    note: %s\n", text.c_str()); }

  ~Criterion() {
    double t = elapsed();
    bool in_time = limit_seconds == 0.0 || t <= limit_seconds;
    if (!in_time) {
      ok = false;
      CHECK_MESSAGE(in_time, "runtime limit exceeded");
    }
    std::printf("[%s] %s (%.2f s)\n", ok ? "PASS" : "FAIL", name, t);
  }
};

#define EXPECT(c, rep, what) (rep).expect(static_cast<bool>(c), what)

Instance load_example(const char* file, int mapping = 1) {
  return Instance::load_file(std::string(DOFSP_FIXTURE_DIR) + "/" + file,
                             static_cast<std::size_t>(mapping - 1));
}

std::vector<int> non_leader_dbs(const Instance& inst) {
  std::vector<int> dbs;
  for (int i = 1; i <= inst.entities(); ++i) {
    if (i != inst.leader) dbs.push_back(inst.databases[static_cast<std::size_t>(i - 1)]);
  }
  return dbs;
}

}  // namespace

TEST_CASE("criterion 1: example-1 reproduction (two-party search)") {
  Criterion rep("criterion 1: example-1 reproduction", 1.0);

  struct Expect {
    int mapping, databases;
    IndexSet solution;
    std::uint64_t download, retrieval;
  };
  const Expect table[] = {
      {1, 2, {3, 7}, 6, 4},    {1, 3, {3, 7}, 5, 3},    {1, 4, {3, 7}, 4, 2},
      {2, 2, {3, 4, 7}, 4, 0}, {2, 3, {3, 4, 7}, 3, 0}, {2, 4, {3, 4, 7}, 3, 0},
      {3, 2, {7}, 2, 0},
  };
  for (const Expect& e : table) {
    Instance inst = load_example("example1.json", e.mapping);
    inst.databases[1] = e.databases;
    SeededSource rng(7);
    Outcome out = run_two_party(inst, rng);
    EXPECT(out.solution == e.solution, rep, "solution set");
    EXPECT(out.download == e.download, rep, "total download");
    EXPECT(out.retrieval_download == e.retrieval, rep, "retrieval-phase download");
    LocalProfile profile = local_profile(inst.objective, inst.leader_set());
    EXPECT(out.download == expected_two_party_download(out, profile, e.databases), rep,
           "closed-form download");
  }
  rep.note(
      "mapping 2 with 4 databases costs ceil(2*4/3)=3 answers (2 in round 1 plus 1 reused-vector "
      "answer); the sometimes-quoted value 2 is below the closed-form floor 2N/(N-1)>2");
}

TEST_CASE("criterion 2: example-2 reproduction (ring search)") {
  Criterion rep("criterion 2: example-2 reproduction", 1.0);
  Instance inst = load_example("example2.json");
  SeededSource rng(7);
  RingConfig cfg;
  cfg.check_hop_invariant = true;
  Outcome out = run_ring(inst, rng, cfg);
  EXPECT(out.solution == IndexSet{7}, rep, "solution {G}");
  EXPECT(out.round_costs == std::vector<std::uint64_t>({14, 14, 26}), rep, "round costs");
  EXPECT(out.total_cost() == 54, rep, "total cost 54");
  GlobalProfile profile = global_profile(inst.objective, inst.alphabet);
  EXPECT(ring_worst_case_cost(3, profile.mu, 4) == 54, rep, "closed form 54");
  SeededSource rng2(7);
  Outcome naive = naive_psi_ring(inst, rng2);
  EXPECT(naive.total_cost() == 80, rep, "one-shot baseline 2*4*10");
  EXPECT(naive.solution == IndexSet{7}, rep, "baseline solution");
}

TEST_CASE("criterion 3: example-3 reproduction (star search)") {
  Criterion rep("criterion 3: example-3 reproduction", 1.0);
  {
    Instance inst = load_example("example3.json");
    SeededSource rng(7);
    Outcome out = run_star(inst, rng);
    EXPECT(out.solution == IndexSet{7}, rep, "solution {G}");
    EXPECT(out.download == 24, rep, "download 24");
    EXPECT(out.upload == 240, rep, "upload 240");
    EXPECT(out.total_cost() == 264, rep, "total 264");
  }
  {
    Instance inst = load_example("example3.json");
    for (int i = 2; i <= 4; ++i) inst.databases[static_cast<std::size_t>(i - 1)] = 3;
    SeededSource rng(7);
    Outcome out = run_star(inst, rng);
    EXPECT(out.solution == IndexSet{7}, rep, "solution {G} at 3 databases");
    EXPECT(out.download == star_worst_case_download(4, {3, 3, 3}), rep, "download equals closed form");
    EXPECT(out.download == 18, rep, "download 18 (6 answers per entity)");
    EXPECT(out.total_cost() == 198, rep, "total (10+1)*18");
    rep.note(
        "3-database variant: the transcript has 6 answers per entity (h1; h1+e3; h1+e4; h2; "
        "h2+e10; h2+e7), giving 18/198; the sometimes-quoted 15/165 plugs a prefix of 3 instead "
        "of alpha_1+alpha_2+alpha_3 = 4 into the closed form");
  }
  {
    // zero-test values as symbolic multiples of the hidden multiplier c
    const std::vector<Symbol> multiples{4, 3, 3, 0};
    PrimeField f5(5);
    for (Symbol c = 1; c <= 4; ++c) {
      Instance inst = load_example("example3.json");
      StarConfig cfg;
      cfg.forced_multiplier = c;
      SeededSource rng(7);
      Outcome out = run_star(inst, rng, cfg);
      bool all_match = out.zero_test_values.size() == multiples.size();
      for (std::size_t i = 0; all_match && i < multiples.size(); ++i) {
        all_match = out.zero_test_values[i] == f5.mul(c, multiples[i]);
      }
      EXPECT(all_match, rep, "zero-test values match c*(sum+q-(N-1)) for every c");
    }
    rep.note(
        "decoded values are (4c, 3c, 3c, 0): C is held by two non-leaders and D by one, so "
        "Z_C=c(2+2), Z_D=c(1+2); the sometimes-quoted (3c, 2c) contradicts the declared sets; "
        "the zero/nonzero pattern and the solution are unaffected");
  }
}

TEST_CASE("criterion 4: closed-form ledger equality on exhaustive sweeps") {
  Criterion rep("criterion 4: closed-form ledger equality", 300.0);
  std::uint64_t runs = 0;
  bool all_equal = true;

  // two-party: every set pair at K <= 5, every objective map with range <= 3
  for (int alphabet = 2; alphabet <= 5 && all_equal; ++alphabet) {
    for (int n2 : {2, 3}) {
      for (int mask1 = 1; mask1 < (1 << alphabet); ++mask1) {
        for (int mask2 = 1; mask2 < (1 << alphabet); ++mask2) {
          if ((mask1 & mask2) == 0) continue;
          Instance inst;
          IndexSet s1, s2;
          for (int k = 1; k <= alphabet; ++k) {
            inst.alphabet.labels.push_back(std::string(1, static_cast<char>('a' + k - 1)));
            if (mask1 & (1 << (k - 1))) s1.push_back(k);
            if (mask2 & (1 << (k - 1))) s2.push_back(k);
          }
          inst.sets = {FeasibleSet{s1}, FeasibleSet{s2}};
          inst.databases = {1, n2};
          inst.leader = 1;
          inst.objective.direction = Direction::maximize;
          for (int range = 1; range <= 3; ++range) {
            inst.objective.range = range;
            std::uint64_t maps = 1;
            for (int k = 0; k < alphabet; ++k) maps *= static_cast<std::uint64_t>(range);
            for (std::uint64_t f = 0; f < maps; ++f) {
              inst.objective.values.assign(static_cast<std::size_t>(alphabet), 1);
              std::uint64_t digits = f;
              for (int k = 0; k < alphabet; ++k) {
                inst.objective.values[static_cast<std::size_t>(k)] =
                    1 + static_cast<int>(digits % range);
                digits /= range;
              }
              SeededSource rng(derive_seed(4, runs));
              TwoPartyConfig cfg;
              cfg.record_transcript = false;
              Outcome out = run_two_party(inst, rng, cfg);
              ++runs;
              LocalProfile profile = local_profile(inst.objective, inst.leader_set());
              std::uint64_t expected = expected_two_party_download(out, profile, n2);
              std::uint64_t k64 = static_cast<std::uint64_t>(alphabet);
              if (out.download != expected || out.upload != k64 * out.download ||
                  out.total_cost() != (k64 + 1) * out.download ||
                  out.solution != solution_oracle(inst)) {
                all_equal = false;
              }
            }
          }
        }
      }
    }
  }

  // two-party at K = 6: seeded set pairs, still every objective map
  SeededSource pair_seeds(606);
  for (int sample = 0; sample < 30 && all_equal; ++sample) {
    IndexSet s1, s2;
    int shared = 1 + static_cast<int>(pair_seeds.draw(6));
    for (int k = 1; k <= 6; ++k) {
      if (k == shared || pair_seeds.draw(2)) s1.push_back(k);
      if (k == shared || pair_seeds.draw(2)) s2.push_back(k);
    }
    int n2 = 2 + static_cast<int>(pair_seeds.draw(3));
    Instance inst;
    for (int k = 1; k <= 6; ++k) {
      inst.alphabet.labels.push_back(std::string(1, static_cast<char>('a' + k - 1)));
    }
    inst.sets = {FeasibleSet{s1}, FeasibleSet{s2}};
    inst.databases = {1, n2};
    inst.leader = 1;
    inst.objective.direction = Direction::maximize;
    for (int range = 1; range <= 3 && all_equal; ++range) {
      inst.objective.range = range;
      std::uint64_t maps = 1;
      for (int k = 0; k < 6; ++k) maps *= static_cast<std::uint64_t>(range);
      for (std::uint64_t f = 0; f < maps; ++f) {
        inst.objective.values.assign(6, 1);
        std::uint64_t digits = f;
        for (int k = 0; k < 6; ++k) {
          inst.objective.values[static_cast<std::size_t>(k)] = 1 + static_cast<int>(digits % range);
          digits /= range;
        }
        SeededSource rng(derive_seed(6, runs));
        TwoPartyConfig cfg;
        cfg.record_transcript = false;
        Outcome out = run_two_party(inst, rng, cfg);
        ++runs;
        LocalProfile profile = local_profile(inst.objective, inst.leader_set());
        if (out.download != expected_two_party_download(out, profile, n2) ||
            out.upload != 6 * out.download || out.solution != solution_oracle(inst)) {
          all_equal = false;
        }
      }
    }
  }

  // ring and star: 200 seeded set triples at K <= 4, every map with range <= 3
  SeededSource seeds(404);
  for (int triple = 0; triple < 200 && all_equal; ++triple) {
    int alphabet = 2 + static_cast<int>(seeds.draw(3));
    std::vector<IndexSet> sets(3);
    int common = 1 + static_cast<int>(seeds.draw(static_cast<std::uint32_t>(alphabet)));
    for (auto& s : sets) {
      for (int k = 1; k <= alphabet; ++k) {
        if (k == common || seeds.draw(2)) s.push_back(k);
      }
    }
    int dbs = 2 + static_cast<int>(seeds.draw(2));
    Instance inst;
    for (int k = 1; k <= alphabet; ++k) {
      inst.alphabet.labels.push_back(std::string(1, static_cast<char>('a' + k - 1)));
    }
    for (const IndexSet& s : sets) inst.sets.push_back(FeasibleSet{s});
    inst.databases = {1, dbs, dbs};
    inst.leader = 1;
    inst.objective.direction = Direction::maximize;
    for (int range = 1; range <= 3 && all_equal; ++range) {
      inst.objective.range = range;
      std::uint64_t maps = 1;
      for (int k = 0; k < alphabet; ++k) maps *= static_cast<std::uint64_t>(range);
      for (std::uint64_t f = 0; f < maps && all_equal; ++f) {
        inst.objective.values.assign(static_cast<std::size_t>(alphabet), 1);
        std::uint64_t digits = f;
        for (int k = 0; k < alphabet; ++k) {
          inst.objective.values[static_cast<std::size_t>(k)] = 1 + static_cast<int>(digits % range);
          digits /= range;
        }
        SeededSource rng(derive_seed(5, runs));
        RingConfig ring_cfg;
        ring_cfg.record_transcript = false;
        ring_cfg.check_hop_invariant = true;
        Outcome ring_out = run_ring(inst, rng, ring_cfg);
        GlobalProfile g = global_profile(inst.objective, inst.alphabet);
        if (ring_out.total_cost() != expected_ring_cost(ring_out, g, 3) ||
            ring_out.solution != solution_oracle(inst)) {
          all_equal = false;
        }
        StarConfig star_cfg;
        star_cfg.record_transcript = false;
        Outcome star_out = run_star(inst, rng, star_cfg);
        LocalProfile l = local_profile(inst.objective, inst.leader_set());
        std::uint64_t expected = expected_star_download(star_out, l, {dbs, dbs});
        std::uint64_t k64 = static_cast<std::uint64_t>(alphabet);
        if (star_out.download != expected || star_out.upload != k64 * star_out.download ||
            star_out.solution != solution_oracle(inst)) {
          all_equal = false;
        }
        runs += 2;
      }
    }
  }

  EXPECT(all_equal, rep, "simulated (D,U,C) equals the closed forms on every run");
  rep.note("swept " + std::to_string(runs) + " runs with zero tolerance");
}

TEST_CASE("criterion 5: probability-table reproduction and Monte Carlo adjudication") {
  Criterion rep("criterion 5: probability-table reproduction", 120.0);
  const double printed[4][5] = {
      {2.93, 1.43e-2, 1.04e-3, 2.37e-4, 1.02e-4},
      {2.93, 1.43e-2, 1.04e-3, 2.37e-4, 1.02e-4},
      {2.93, 1.43e-2, 1.04e-3, 2.37e-4, 1.01e-4},
      {2.93, 1.43e-2, 1.04e-3, 2.37e-4, 9.67e-5},
  };
  const int taus[5] = {2, 4, 6, 8, 10};
  for (int m = 1; m <= 4; ++m) {
    for (int t = 0; t < 5; ++t) {
      double cell = peq_ring_exact(10, taus[t], m) * 1e3;
      double want = printed[m - 1][t];
      bool close = std::abs(cell - want) <= 5e-3 * want;
      EXPECT(close, rep, "table cell to 3 significant figures");
    }
  }
  // Monte Carlo column at tau=2, adjudicated against the exhaustive oracle:
  // the closed form counts value combinations only and sits far outside the
  // interval, which is reported rather than patched.
  for (int m = 1; m <= 4; ++m) {
    PeqParams params;
    params.alphabet_size = 10;
    params.intersection_size = m;
    params.value_range = 2;
    params.entities = 4;
    MonteCarloResult mc = peq_monte_carlo(PeqSetting::ring, params, 1000000,
                                          derive_seed(55, static_cast<std::uint64_t>(m)));
    ExhaustiveResult oracle = peq_ring_exhaustive(10, 2, m);
    double exact = peq_ring_exact(10, 2, m);
    // gate the 4-cell column jointly at the 99% level (Bonferroni per cell:
    // z = 3.0233 instead of 2.5758)
    double column_halfwidth = mc.halfwidth99 * (3.0233 / 2.5758293035489004);
    EXPECT(std::abs(mc.estimate - oracle.probability()) <= column_halfwidth, rep,
           "Monte Carlo agrees with the exhaustive event probability");
    char line[192];
    std::snprintf(line, sizeof(line),
                  "tau=2, M=%d: closed-form %.3e vs exhaustive %llu/%llu=%.3e vs MC %.3e±%.1e -> "
                  "closed form is not the event probability (reported)",
                  m, exact, static_cast<unsigned long long>(oracle.hits),
                  static_cast<unsigned long long>(oracle.maps), oracle.probability(), mc.estimate,
                  mc.halfwidth99);
    rep.note(line);
    EXPECT(std::abs(mc.estimate - exact) > mc.halfwidth99, rep,
           "divergence of the closed form is visible at 1e6 trials");
  }
}

TEST_CASE("criterion 6: two-party probability trends and oracle equality") {
  Criterion rep("criterion 6: two-party probability trends", 120.0);
  for (int m = 1; m <= 4; ++m) {
    double prev = 1.0;
    for (int tau = 2; tau <= 10; ++tau) {
      double p = peq_two_party_exact(5, tau, m);
      EXPECT(p < prev, rep, "strictly decreasing in the value range");
      prev = p;
    }
  }
  for (int tau = 2; tau <= 10; ++tau) {
    double prev = 1.0;
    for (int m = 1; m <= 4; ++m) {
      double p = peq_two_party_exact(5, tau, m);
      EXPECT(p <= prev + 1e-15, rep, "decreasing in the intersection size");
      prev = p;
    }
  }
  // exact equality against the exhaustive oracle wherever tau^5 fits 2^16
  for (int tau = 2; tau <= 9; ++tau) {
    for (int m = 1; m <= 4; ++m) {
      ExhaustiveResult oracle = peq_two_party_exhaustive(5, tau, m);
      double exact = peq_two_party_exact(5, tau, m);
      EXPECT(std::abs(exact - oracle.probability()) <= 1e-9 * std::max(1.0, oracle.probability()),
             rep, "closed form equals the exhaustive count");
    }
  }
}

TEST_CASE("criterion 7: star dominates two-party and matches its oracle") {
  Criterion rep("criterion 7: star probability properties", 180.0);
  for (int tau = 2; tau <= 10; ++tau) {
    for (int m = 1; m <= 4; ++m) {
      EXPECT(peq_star_exact(5, tau, m) >= peq_two_party_exact(5, tau, m) - 1e-15, rep,
             "star probability dominates the two-party one");
    }
  }
  bool diverged = false;
  for (int tau = 2; tau <= 9; ++tau) {
    for (int m = 1; m <= 4; ++m) {
      ExhaustiveResult oracle = peq_star_exhaustive(5, tau, m);
      double exact = peq_star_exact(5, tau, m);
      if (std::abs(exact - oracle.probability()) > 1e-9 * std::max(1.0, oracle.probability())) {
        diverged = true;
        char line[128];
        std::snprintf(line, sizeof(line), "divergence at tau=%d M=%d: closed %.6e oracle %.6e",
                      tau, m, exact, oracle.probability());
        rep.note(line);
      }
    }
  }
  EXPECT(!diverged, rep, "star closed form equals the exhaustive oracle everywhere enumerable");
  rep.note(
      "the implemented count distributes the non-intersection elements with a multinomial over "
      "P1-M items (and sums the worst-value choice over all tau values); as sometimes quoted, a "
      "top of P1-M-r makes the parts not sum to the top - the oracle equality above adjudicates "
      "the corrected form");
}

TEST_CASE("criterion 8: privacy audit suite and mutation sensitivity") {
  Criterion rep("criterion 8: privacy audit", 600.0);
  AuditOptions options = audit_options_from_env();
  AuditReport report = run_default_audit(options);
  for (const CheckResult& c : report.checks) {
    std::printf("    [%s] %s (states<=%llu%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                static_cast<unsigned long long>(c.states), c.exact ? "" : ", statistical");
    EXPECT(c.pass, rep, "audit check passes");
    EXPECT(c.exact, rep, "audit stayed within the exact-enumeration budget");
  }
  for (Mutation mutation : {Mutation::drop_mask, Mutation::reuse_pad, Mutation::early_reveal}) {
    InstanceFamily two = filter_members(two_party_small_family(mutation), [](const Instance& i) {
      return i.leader_set().members == IndexSet{3} || i.leader_set().members == IndexSet{1, 2, 3};
    });
    bool caught = !reliability_check(two, options).pass ||
                  !zero_leakage_check(two, options).pass ||
                  !leader_leakage_check(two, options).pass;
    EXPECT(caught, rep, "seeded mutation detected by at least one check");
    rep.note("mutation " + mutation_name(mutation) + (caught ? " caught" : " MISSED"));
  }
  // The hop-mask mutation is also visible to a relay database (a breach of
  // the per-database zero-leakage requirement, not just the leader-side one):
  // members varying only the middle entity's set put unmasked products on
  // the relay link.
  InstanceFamily relay = filter_members(ring_small_family(0, Mutation::drop_mask),
                                        [](const Instance& i) {
                                          IndexSet full{1, 2, 3};
                                          bool mid_small = true;
                                          for (Index k : i.sets[1].members) mid_small &= k <= 2;
                                          return i.sets[0].members == full &&
                                                 i.sets[2].members == full && mid_small;
                                        });
  bool relay_caught = !zero_leakage_check(relay, options).pass;
  EXPECT(relay_caught, rep, "hop-mask mutation visible to a relay database");
}

TEST_CASE("criterion 9: search cost never exceeds the one-shot baseline") {
  Criterion rep("criterion 9: baseline dominance", 300.0);
  bool dominance = true, characterization = true;
  SeededSource seeds(909);
  // two-party: all pairs at K=4, all maps with range <= 3, both db counts
  for (int n2 : {2, 3}) {
    for (int mask1 = 1; mask1 < 16; ++mask1) {
      for (int mask2 = 1; mask2 < 16; ++mask2) {
        if ((mask1 & mask2) == 0) continue;
        IndexSet s1, s2;
        for (int k = 1; k <= 4; ++k) {
          if (mask1 & (1 << (k - 1))) s1.push_back(k);
          if (mask2 & (1 << (k - 1))) s2.push_back(k);
        }
        for (std::uint64_t f = 0; f < 81; ++f) {
          Instance inst;
          for (int k = 1; k <= 4; ++k) {
            inst.alphabet.labels.push_back(std::string(1, static_cast<char>('a' + k - 1)));
          }
          inst.sets = {FeasibleSet{s1}, FeasibleSet{s2}};
          inst.databases = {1, n2};
          inst.leader = 1;
          inst.objective.direction = Direction::maximize;
          inst.objective.range = 3;
          std::uint64_t digits = f;
          for (int k = 0; k < 4; ++k) {
            inst.objective.values.push_back(1 + static_cast<int>(digits % 3));
            digits /= 3;
          }
          SeededSource rng(derive_seed(9, f));
          TwoPartyConfig cfg;
          cfg.record_transcript = false;
          Outcome out = run_two_party(inst, rng, cfg);
          std::uint64_t baseline = naive_psi_two_party_cost(static_cast<int>(s1.size()), n2);
          if (out.download > baseline) dominance = false;
          LocalProfile profile = local_profile(inst.objective, inst.leader_set());
          int stop = nominal_stop_round(inst);
          bool prefix_singletons = true;
          for (int r = 1; r < stop; ++r) {
            prefix_singletons &= profile.alpha[static_cast<std::size_t>(r - 1)] == 1;
          }
          int hits = 0;
          IncidenceVector common = intersection_oracle(inst).incidence;
          for (Index k : profile.runs[static_cast<std::size_t>(stop - 1)]) hits += common.at(k);
          bool event = prefix_singletons &&
                       stop + profile.alpha[static_cast<std::size_t>(stop - 1)] ==
                           static_cast<int>(s1.size()) + 1 &&
                       hits < profile.alpha[static_cast<std::size_t>(stop - 1)];
          if ((out.download == baseline) != event) characterization = false;
        }
      }
    }
  }
  // ring and star: seeded triples, all maps
  for (int triple = 0; triple < 60; ++triple) {
    int alphabet = 2 + static_cast<int>(seeds.draw(3));
    std::vector<IndexSet> sets(3);
    int common_elt = 1 + static_cast<int>(seeds.draw(static_cast<std::uint32_t>(alphabet)));
    for (auto& s : sets) {
      for (int k = 1; k <= alphabet; ++k) {
        if (k == common_elt || seeds.draw(2)) s.push_back(k);
      }
    }
    std::uint64_t maps = 1;
    for (int k = 0; k < alphabet; ++k) maps *= 3;
    for (std::uint64_t f = 0; f < maps; ++f) {
      Instance inst;
      for (int k = 1; k <= alphabet; ++k) {
        inst.alphabet.labels.push_back(std::string(1, static_cast<char>('a' + k - 1)));
      }
      for (const IndexSet& s : sets) inst.sets.push_back(FeasibleSet{s});
      inst.databases = {1, 2, 2};
      inst.leader = 1;
      inst.objective.direction = Direction::maximize;
      inst.objective.range = 3;
      std::uint64_t digits = f;
      for (int k = 0; k < alphabet; ++k) {
        inst.objective.values.push_back(1 + static_cast<int>(digits % 3));
        digits /= 3;
      }
      SeededSource rng(derive_seed(19, f));
      RingConfig ring_cfg;
      ring_cfg.record_transcript = false;
      Outcome ring_out = run_ring(inst, rng, ring_cfg);
      std::uint64_t ring_baseline = naive_psi_ring_cost(3, alphabet);
      if (ring_out.total_cost() > ring_baseline) dominance = false;
      GlobalProfile g = global_profile(inst.objective, inst.alphabet);
      bool mu_singletons = true;
      for (int r = 1; r < ring_out.stopping_round; ++r) {
        mu_singletons &= g.mu[static_cast<std::size_t>(r - 1)] == 1;
      }
      bool ring_event = ring_out.stopping_round == g.rounds() && mu_singletons &&
                        g.mu.back() > 1 && !ring_out.full_hit;
      if ((ring_out.total_cost() == ring_baseline) != ring_event) characterization = false;

      StarConfig star_cfg;
      star_cfg.record_transcript = false;
      Outcome star_out = run_star(inst, rng, star_cfg);
      std::uint64_t star_baseline = naive_psi_star(inst);
      if (star_out.download > star_baseline) dominance = false;
      LocalProfile l = local_profile(inst.objective, inst.leader_set());
      int rounds = star_out.stopping_round - (star_out.skipped_last_round ? 1 : 0);
      int prefix = 0;
      for (int r = 1; r <= rounds; ++r) prefix += l.alpha[static_cast<std::size_t>(r - 1)];
      bool star_event = prefix == inst.leader_set().size();
      if ((star_out.download == star_baseline) != star_event) characterization = false;
    }
  }
  EXPECT(dominance, rep, "search cost <= one-shot baseline on every run");
  EXPECT(characterization, rep, "equality occurs exactly on the characterized events");
}
