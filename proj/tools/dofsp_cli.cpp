#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dofsp/analysis.hpp"
#include "dofsp/audit.hpp"
#include "dofsp/random.hpp"
#include "dofsp/ring.hpp"
#include "dofsp/star.hpp"
#include "dofsp/two_party.hpp"

namespace {

using namespace dofsp;

constexpr int kExitUsage = 1;
constexpr int kExitAssumption = 2;
constexpr int kExitAuditFail = 3;

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

void write_out(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

Instance load_instance(const std::string& path, int mapping, int database_override) {
  Instance inst = Instance::load_file(path, static_cast<std::size_t>(mapping - 1));
  if (database_override > 0) {
    for (int i = 1; i <= inst.entities(); ++i) {
      if (i != inst.leader) inst.databases[static_cast<std::size_t>(i - 1)] = database_override;
    }
  }
  return inst;
}

std::vector<int> non_leader_dbs(const Instance& inst) {
  std::vector<int> dbs;
  for (int i = 1; i <= inst.entities(); ++i) {
    if (i != inst.leader) dbs.push_back(inst.databases[static_cast<std::size_t>(i - 1)]);
  }
  return dbs;
}

struct RunReport {
  Outcome outcome;
  std::uint64_t closed_form = 0;
  std::string closed_form_name;
};

RunReport run_topology(const std::string& topology, const Instance& inst, std::uint64_t seed,
                       Mutation mutation, bool record, bool debug_invariants = false) {
  SeededSource rng(seed);
  RunReport report;
  if (topology == "two_party" || topology == "naive_two_party") {
    TwoPartyConfig cfg;
    cfg.mutation = mutation;
    cfg.record_transcript = record;
    LocalProfile profile = local_profile(inst.objective, inst.leader_set());
    if (topology == "two_party") {
      report.outcome = run_two_party(inst, rng, cfg);
      report.closed_form =
          expected_two_party_download(report.outcome, profile, non_leader_dbs(inst)[0]);
      report.closed_form_name = "worst_case_download";
    } else {
      report.outcome = naive_psi_two_party(inst, rng, cfg);
      report.closed_form =
          naive_psi_two_party_cost(inst.leader_set().size(), non_leader_dbs(inst)[0]);
      report.closed_form_name = "one_shot_download";
    }
  } else if (topology == "ring" || topology == "naive_ring") {
    RingConfig cfg;
    cfg.mutation = mutation;
    cfg.record_transcript = record;
    cfg.check_hop_invariant = debug_invariants;
    if (topology == "ring") {
      report.outcome = run_ring(inst, rng, cfg);
      GlobalProfile profile = global_profile(inst.objective, inst.alphabet);
      report.closed_form = expected_ring_cost(report.outcome, profile, inst.entities());
      report.closed_form_name = "worst_case_total";
    } else {
      report.outcome = naive_psi_ring(inst, rng, cfg);
      report.closed_form = naive_psi_ring_cost(inst.entities(), inst.alphabet.size());
      report.closed_form_name = "one_shot_total";
    }
  } else if (topology == "star" || topology == "naive_star") {
    StarConfig cfg;
    cfg.mutation = mutation;
    cfg.record_transcript = record;
    if (topology == "star") {
      report.outcome = run_star(inst, rng, cfg);
      LocalProfile profile = local_profile(inst.objective, inst.leader_set());
      report.closed_form =
          expected_star_download(report.outcome, profile, non_leader_dbs(inst));
      report.closed_form_name = "worst_case_download";
    } else {
      report.outcome = naive_psi_star_run(inst, rng, cfg);
      report.closed_form = naive_psi_star(inst);
      report.closed_form_name = "one_shot_download";
    }
  } else {
    throw CLI::ValidationError("--topology", "unknown topology " + topology);
  }
  return report;
}

int cmd_run(const std::string& instance_path, int mapping, const std::string& topology,
            std::uint64_t seed, int databases, const std::string& format,
            const std::string& out_path, bool include_transcript, const std::string& mutate,
            bool debug_invariants) {
  Instance inst = load_instance(instance_path, mapping, databases);
  RunReport report =
      run_topology(topology, inst, seed, mutation_from_string(mutate), true, debug_invariants);
  const Outcome& o = report.outcome;
  if (format == "json") {
    nlohmann::json j;
    j["topology"] = topology;
    j["solution"] = o.solution_labels(inst.alphabet);
    j["stopping_round"] = o.stopping_round;
    j["full_hit"] = o.full_hit;
    j["skipped_last_round"] = o.skipped_last_round;
    j["ledger"] = o.ledger.to_json();
    j["field_modulus"] = o.field_modulus;
    std::vector<std::string> knowledge;
    for (Index k : o.leader_knowledge) knowledge.push_back(inst.alphabet.label(k));
    j["leader_knowledge"] = knowledge;
    if (topology == "two_party" || topology == "star" || topology == "naive_two_party" ||
        topology == "naive_star") {
      nlohmann::json entropies;
      for (int i = 1; i <= inst.entities(); ++i) {
        if (i == inst.leader) continue;
        entropies["E" + std::to_string(i)] = nominal_leakage_entropy_bits(inst, i);
      }
      j["nominal_leakage_entropy_bits"] = entropies;
      j["nominal_entropy_prior"] = "uniform over sets of the declared size";
    }
    j[report.closed_form_name] = report.closed_form;
    j["transcript_hash"] = o.transcript.hash();
    if (include_transcript) j["transcript"] = o.transcript.to_json();
    write_out(out_path, j.dump(2) + "\n");
  } else {
    std::ostringstream text;
    text << "topology=" << topology << "\n";
    text << "solution={";
    for (std::size_t i = 0; i < o.solution.size(); ++i) {
      text << (i ? "," : "") << inst.alphabet.label(o.solution[i]);
    }
    text << "}\nstopping_round=" << o.stopping_round << "\n";
    text << "upload=" << o.upload << " download=" << o.download << " relayed=" << o.relayed
         << " total_cost=" << o.total_cost() << "\n";
    text << report.closed_form_name << "=" << report.closed_form << "\n";
    text << "leader_knowledge={";
    for (std::size_t i = 0; i < o.leader_knowledge.size(); ++i) {
      text << (i ? "," : "") << inst.alphabet.label(o.leader_knowledge[i]);
    }
    text << "}\n";
    write_out(out_path, text.str());
  }
  return 0;
}

std::vector<int> parse_grid_values(const std::string& grid, const std::string& key,
                                   std::vector<int> fallback) {
  // grid syntax: "tau=2:10;m=1,2,3" (ranges inclusive, lists comma-separated)
  std::stringstream ss(grid);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto eq = part.find('=');
    if (eq == std::string::npos || part.substr(0, eq) != key) continue;
    std::string range_spec = part.substr(eq + 1);
    std::vector<int> values;
    if (range_spec.empty()) return values;
    auto colon = range_spec.find(':');
    if (colon != std::string::npos) {
      int lo = std::stoi(range_spec.substr(0, colon));
      int hi = std::stoi(range_spec.substr(colon + 1));
      for (int v = lo; v <= hi; ++v) values.push_back(v);
      return values;
    }
    std::stringstream list(range_spec);
    std::string item;
    while (std::getline(list, item, ',')) {
      if (!item.empty()) values.push_back(std::stoi(item));
    }
    return values;
  }
  return fallback;
}

int cmd_peq(const std::string& setting_name, int p1, int k, int entities, int databases,
            const std::string& grid, std::uint64_t trials, std::uint64_t seed,
            const std::string& out_path, bool with_exhaustive) {
  PeqSetting setting;
  if (setting_name == "two_party") {
    setting = PeqSetting::two_party;
  } else if (setting_name == "ring") {
    setting = PeqSetting::ring;
  } else if (setting_name == "star") {
    setting = PeqSetting::star;
  } else {
    throw CLI::ValidationError("--setting", "unknown setting " + setting_name);
  }
  std::vector<int> taus = parse_grid_values(grid, "tau", {2, 4, 6, 8, 10});
  std::vector<int> ms = parse_grid_values(grid, "m", {1, 2, 3, 4});
  std::ostringstream csv;
  csv << "setting,k,p1,m,tau,n,trials,exact,mc_estimate,mc_halfwidth,exhaustive\n";
  std::uint64_t cell = 0;
  for (int m : ms) {
    for (int tau : taus) {
      PeqParams params;
      params.alphabet_size = k;
      params.leader_set_size = p1;
      params.intersection_size = m;
      params.value_range = tau;
      params.entities = entities;
      params.databases = databases;
      double exact = 0.0;
      switch (setting) {
        case PeqSetting::two_party: exact = peq_two_party_exact(p1, tau, m); break;
        case PeqSetting::ring: exact = peq_ring_exact(k, tau, m); break;
        case PeqSetting::star: exact = peq_star_exact(p1, tau, m); break;
      }
      MonteCarloResult mc = peq_monte_carlo(setting, params, trials, derive_seed(seed, cell));
      std::string exhaustive = "";
      if (with_exhaustive) {
        try {
          ExhaustiveResult ex;
          switch (setting) {
            case PeqSetting::two_party:
              ex = peq_two_party_exhaustive(p1, tau, m, databases);
              break;
            case PeqSetting::ring: ex = peq_ring_exhaustive(k, tau, m, entities); break;
            case PeqSetting::star: ex = peq_star_exhaustive(p1, tau, m, entities); break;
          }
          exhaustive = format_sci(ex.probability());
        } catch (const BudgetExceeded&) {
          exhaustive = "";
        }
      }
      csv << setting_name << "," << k << "," << p1 << "," << m << "," << tau << "," << entities
          << "," << trials << "," << format_sci(exact) << "," << format_sci(mc.estimate) << ","
          << format_sci(mc.halfwidth99) << "," << exhaustive << "\n";
      ++cell;
    }
  }
  write_out(out_path, csv.str());
  return 0;
}

int cmd_audit(const std::string& protocol, const std::string& mutate, bool expect_leak,
              std::uint64_t seed, const std::string& out_path) {
  AuditOptions options = audit_options_from_env();
  options.seed = seed;
  Mutation mutation = mutation_from_string(mutate);
  AuditReport report;
  if (protocol == "naive") {
    // Demonstrates the baseline's extra leakage: the leader check fails
    // whenever the nominal search would have stopped early.
    InstanceFamily family = two_party_small_family();
    family.protocol = ProtocolKind::naive_two_party;
    family.name = "naive_two_party_k4";
    report.checks.push_back(reliability_check(family, options));
    report.checks.push_back(leader_leakage_check(family, options));
    report.notes = "baseline leakage demonstration: leader learns the full support";
  } else if (protocol == "all") {
    report = run_default_audit(options, mutation);
  } else {
    Mutation m = mutation;
    std::vector<InstanceFamily> families;
    if (protocol == "two_party") {
      families.push_back(two_party_small_family(m));
    } else if (protocol == "ring") {
      families.push_back(ring_small_family(0, m));
      families.push_back(ring_small_family(1, m));
    } else if (protocol == "star") {
      families.push_back(star_small_family(0, m));
      families.push_back(star_small_family(1, m));
    } else {
      throw CLI::ValidationError("--protocol", "unknown protocol " + protocol);
    }
    for (const InstanceFamily& family : families) {
      report.checks.push_back(reliability_check(family, options));
      report.checks.push_back(zero_leakage_check(family, options));
      report.checks.push_back(leader_leakage_check(family, options));
    }
  }
  for (const CheckResult& c : report.checks) {
    std::printf("[%s] %s%s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.exact ? "" : " (statistical fallback)", c.detail.c_str());
  }
  if (!out_path.empty()) write_out(out_path, report.to_json().dump(2) + "\n");
  if (protocol == "naive" && expect_leak) {
    bool leaked = false;
    for (const CheckResult& c : report.checks) {
      if (c.name.rfind("leader_leakage", 0) == 0 && !c.pass) leaked = true;
    }
    std::printf("expected leakage %s\n", leaked ? "confirmed" : "NOT observed");
    return leaked ? 0 : kExitAuditFail;
  }
  return report.all_pass() ? 0 : kExitAuditFail;
}

bool check_match(const std::string& name, std::uint64_t got, std::uint64_t want,
                 std::vector<std::string>& failures) {
  if (got == want) return true;
  failures.push_back(name + ": got " + std::to_string(got) + ", want " + std::to_string(want));
  return false;
}

int cmd_verify_examples(const std::string& dir, std::uint64_t seed) {
  std::vector<std::string> failures;
  auto verify_solution = [&](const std::string& name, const Instance& inst, const Outcome& out,
                             const nlohmann::json& entry) {
    if (!entry.contains("solution")) return;
    std::vector<std::string> want = entry.at("solution").get<std::vector<std::string>>();
    std::vector<std::string> got = out.solution_labels(inst.alphabet);
    if (got != want) failures.push_back(name + ": wrong solution");
  };

  {  // example1: two-party search over three score mappings
    nlohmann::json j;
    std::ifstream in(dir + "/example1.json");
    in >> j;
    for (const auto& entry : j.at("expected").at("two_party")) {
      int mapping = entry.value("mapping", 1);
      Instance inst = Instance::from_json(j, static_cast<std::size_t>(mapping - 1));
      inst.databases[1] = entry.value("databases", 2);
      SeededSource rng(seed);
      Outcome out = run_two_party(inst, rng);
      std::string name = "example1/two_party/m" + std::to_string(mapping) + "/n" +
                         std::to_string(inst.databases[1]);
      verify_solution(name, inst, out, entry);
      check_match(name + "/download", out.download, entry.at("download"), failures);
      if (entry.contains("retrieval_download")) {
        check_match(name + "/retrieval", out.retrieval_download, entry.at("retrieval_download"),
                    failures);
      }
    }
    for (const auto& entry : j.at("expected").at("naive_two_party")) {
      int mapping = entry.value("mapping", 1);
      Instance inst = Instance::from_json(j, static_cast<std::size_t>(mapping - 1));
      inst.databases[1] = entry.value("databases", 2);
      SeededSource rng(seed);
      Outcome out = naive_psi_two_party(inst, rng);
      check_match("example1/naive/n" + std::to_string(inst.databases[1]) + "/download",
                  out.download, entry.at("download"), failures);
    }
  }

  {  // example2: ring
    nlohmann::json j;
    std::ifstream in(dir + "/example2.json");
    in >> j;
    Instance inst = Instance::from_json(j);
    SeededSource rng(seed);
    Outcome out = run_ring(inst, rng);
    const auto& expected = j.at("expected").at("ring");
    verify_solution("example2/ring", inst, out, expected);
    check_match("example2/ring/total", out.total_cost(), expected.at("total"), failures);
    std::vector<std::uint64_t> want_rounds =
        expected.at("round_costs").get<std::vector<std::uint64_t>>();
    if (out.round_costs != want_rounds) failures.push_back("example2/ring: wrong round costs");
    SeededSource rng2(seed);
    Outcome naive = naive_psi_ring(inst, rng2);
    check_match("example2/naive_ring/total", naive.total_cost(),
                j.at("expected").at("naive_ring").at("total"), failures);
  }

  {  // example3: star
    nlohmann::json j;
    std::ifstream in(dir + "/example3.json");
    in >> j;
    for (const auto& entry : j.at("expected").at("star")) {
      Instance inst = Instance::from_json(j);
      int dbs = entry.value("databases", 2);
      for (int i = 2; i <= inst.entities(); ++i) inst.databases[static_cast<std::size_t>(i - 1)] = dbs;
      StarConfig cfg;
      cfg.forced_multiplier = 1;
      SeededSource rng(seed);
      Outcome out = run_star(inst, rng, cfg);
      std::string name = "example3/star/n" + std::to_string(dbs);
      verify_solution(name, inst, out, entry);
      check_match(name + "/download", out.download, entry.at("download"), failures);
      check_match(name + "/upload", out.upload, entry.at("upload"), failures);
      check_match(name + "/total", out.total_cost(), entry.at("total"), failures);
      if (entry.contains("zero_multiples")) {
        std::vector<Symbol> want = entry.at("zero_multiples").get<std::vector<Symbol>>();
        if (out.zero_test_values != want) failures.push_back(name + ": wrong zero-test values");
      }
    }
    for (const auto& entry : j.at("expected").at("naive_star")) {
      Instance inst = Instance::from_json(j);
      int dbs = entry.value("databases", 2);
      for (int i = 2; i <= inst.entities(); ++i) inst.databases[static_cast<std::size_t>(i - 1)] = dbs;
      check_match("example3/naive_star/n" + std::to_string(dbs), naive_psi_star(inst),
                  entry.at("download"), failures);
    }
  }

  if (failures.empty()) {
    std::printf("verify-examples: all bundled expectations hold\n");
    return 0;
  }
  for (const std::string& f : failures) std::printf("[MISMATCH] %s\n", f.c_str());
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private distributed-optimization protocol simulator and analyzer"};
  app.require_subcommand(1);

  std::string instance_path, topology = "two_party", format = "text", out_path, mutate = "none";
  std::string setting = "two_party", grid = "tau=2:10;m=1:4", protocol = "all";
  std::string fixture_dir = DOFSP_FIXTURE_DIR;
  std::uint64_t seed = 1, trials = 100000;
  int mapping = 1, databases = 0, p1 = 5, k = 10, entities = 4, star_entities_dbs = 2;
  bool include_transcript = false, expect_leak = false, with_exhaustive = false;
  bool debug_invariants = false;

  CLI::App* run = app.add_subcommand("run", "execute one protocol on an instance file");
  run->add_option("--instance", instance_path, "instance JSON file")->required();
  run->add_option("--mapping", mapping, "objective mapping index (1-based)");
  run->add_option("--topology", topology,
                  "two_party|ring|star|naive_two_party|naive_ring|naive_star");
  run->add_option("--seed", seed, "RNG seed");
  run->add_option("--databases", databases, "override non-leader database count");
  run->add_option("--format", format, "text|json");
  run->add_option("--out", out_path, "write report to file");
  run->add_option("--mutate", mutate, "none|drop-mask|reuse-pad|early-reveal");
  run->add_flag("--transcript", include_transcript, "include full transcript in JSON output");
  run->add_flag("--debug-invariants", debug_invariants,
                "assert the ring lane-difference invariant on every hop");

  CLI::App* peq = app.add_subcommand("peq", "cost-equality probability tables (CSV)");
  peq->add_option("--setting", setting, "two_party|ring|star");
  peq->add_option("--p1", p1, "leader set size");
  peq->add_option("--k", k, "alphabet size (ring)");
  peq->add_option("--entities", entities, "entity count (ring/star)");
  peq->add_option("--databases", star_entities_dbs, "replication per non-leader");
  peq->add_option("--grid", grid, "e.g. \"tau=2:10;m=1,2,3,4\"");
  peq->add_option("--trials", trials, "Monte Carlo trials per cell");
  peq->add_option("--seed", seed, "base seed (cells derive their own streams)");
  peq->add_option("--out", out_path, "write CSV to file");
  peq->add_flag("--exhaustive", with_exhaustive, "add exhaustive-enumeration column when feasible");

  CLI::App* audit = app.add_subcommand("audit", "exhaustive privacy and reliability checks");
  audit->add_option("--protocol", protocol, "all|two_party|ring|star|naive");
  audit->add_option("--mutate", mutate, "run a deliberately broken variant");
  audit->add_flag("--expect-leak", expect_leak, "with --protocol naive: succeed when the leak shows");
  audit->add_option("--seed", seed, "seed for statistical fallbacks");
  audit->add_option("--out", out_path, "write JSON report to file");

  CLI::App* verify = app.add_subcommand("verify-examples", "run the bundled instances against their expected outputs");
  verify->add_option("--dir", fixture_dir, "fixture directory");
  verify->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
    if (run->parsed()) {
      return cmd_run(instance_path, mapping, topology, seed, databases, format, out_path,
                     include_transcript, mutate, debug_invariants);
    }
    if (peq->parsed()) {
      return cmd_peq(setting, p1, k, entities, star_entities_dbs, grid, trials, seed, out_path,
                     with_exhaustive);
    }
    if (audit->parsed()) return cmd_audit(protocol, mutate, expect_leak, seed, out_path);
    if (verify->parsed()) return cmd_verify_examples(fixture_dir, seed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitUsage : 0;
  } catch (const AssumptionViolation& e) {
    std::fprintf(stderr, "assumption violated: %s\n", e.what());
    return kExitAssumption;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return 0;
}
