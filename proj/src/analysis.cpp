#include "dofsp/analysis.hpp"

#include <cmath>

#include "dofsp/random.hpp"
#include "dofsp/ring.hpp"
#include "dofsp/star.hpp"
#include "dofsp/two_party.hpp"

namespace dofsp {

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
  return acc;
}

namespace {

double factorial(int n) {
  double acc = 1.0;
  for (int i = 2; i <= n; ++i) acc *= static_cast<double>(i);
  return acc;
}

double pow_inv(int base, int exponent) {
  // (1/base)^exponent, via logs once the direct power would lose range
  double direct = std::pow(static_cast<double>(base), static_cast<double>(exponent));
  if (std::isfinite(direct) && direct > 0.0) return 1.0 / direct;
  return std::exp(-static_cast<double>(exponent) * std::log(static_cast<double>(base)));
}

}  // namespace

double peq_two_party_exact(int leader_set_size, int value_range, int intersection_size) {
  const int p1 = leader_set_size;
  const int tau = value_range;
  const int m = intersection_size;
  if (m < 1 || m > p1 || tau < 1) throw ContractViolation("peq_two_party_exact: bad parameters");
  const int r_max = std::min(tau, p1 - m + 1);
  const double scale = pow_inv(tau, p1);
  double total = 0.0;
  for (int r = 1; r <= r_max; ++r) {
    if (!(m < p1 - r + 1)) continue;
    if (r == 1) {
      total += static_cast<double>(tau) * scale;
      continue;
    }
    double value_ways = 0.0;
    for (int j = r - 1; j <= tau - 1; ++j) {
      value_ways += binomial(j - 1, r - 2) * static_cast<double>(tau - j);
    }
    total += binomial(p1 - m, r - 1) * factorial(r - 1) * value_ways * scale;
  }
  return total;
}

double peq_ring_exact(int alphabet_size, int value_range, int intersection_size) {
  const int k = alphabet_size;
  const int tau = value_range;
  const int m = intersection_size;
  if (m < 1 || m > k || tau < 1) throw ContractViolation("peq_ring_exact: bad parameters");
  const int t_max = std::min(tau, k - std::max(2, m) + 1);
  double count = 0.0;
  for (int r = 1; r <= t_max; ++r) {
    for (int j = 1; j <= tau; ++j) count += binomial(tau - j, r - 1);
  }
  return count * pow_inv(tau, k);
}

namespace {

// Compositions alpha_1..alpha_{r-1} >= 1, alpha_r >= max(M,2), sum = P1,
// weighted by the ways to spread the P1-M non-intersection elements over the
// classes (the M intersection elements are pinned to the last class).
double star_composition_weight(int p1, int m, int r) {
  const int floor_last = std::max(m, 2);
  const double numer = factorial(p1 - m);
  double total = 0.0;
  // alpha_r = p1 - (sum of first r-1 parts); iterate over the first parts.
  std::vector<int> parts(static_cast<std::size_t>(r - 1), 1);
  auto weight = [&]() -> double {
    int used = 0;
    double denom = 1.0;
    for (int a : parts) {
      used += a;
      denom *= factorial(a);
    }
    int last = p1 - used;
    if (last < floor_last) return 0.0;
    denom *= factorial(last - m);
    return numer / denom;
  };
  if (r == 1) {
    return p1 >= floor_last ? numer / factorial(p1 - m) : 0.0;
  }
  // Odometer over the first r-1 parts; each at least 1 and small enough to
  // leave room for the last part.
  for (;;) {
    total += weight();
    int i = r - 2;
    for (; i >= 0; --i) {
      parts[static_cast<std::size_t>(i)]++;
      int sum = 0;
      for (int a : parts) sum += a;
      if (sum + floor_last <= p1) break;
      parts[static_cast<std::size_t>(i)] = 1;
    }
    if (i < 0) break;
  }
  return total;
}

}  // namespace

double peq_star_exact(int leader_set_size, int value_range, int intersection_size) {
  const int p1 = leader_set_size;
  const int tau = value_range;
  const int m = intersection_size;
  if (m < 1 || m > p1 || tau < 1) throw ContractViolation("peq_star_exact: bad parameters");
  const int l_max = std::min(tau, p1 - std::max(2, m) + 1);
  double count = 0.0;
  for (int r = 1; r <= l_max; ++r) {
    double value_ways = 0.0;
    for (int j = 1; j <= tau; ++j) value_ways += binomial(tau - j, r - 1);
    count += value_ways * star_composition_weight(p1, m, r);
  }
  return count * pow_inv(tau, p1);
}

namespace {

Instance base_instance(int alphabet_size, std::vector<IndexSet> sets, std::vector<int> dbs) {
  Instance inst;
  for (int k = 1; k <= alphabet_size; ++k) inst.alphabet.labels.push_back("x" + std::to_string(k));
  for (auto& s : sets) inst.sets.push_back(FeasibleSet{std::move(s)});
  inst.databases = std::move(dbs);
  inst.objective.direction = Direction::maximize;
  inst.objective.values.assign(static_cast<std::size_t>(alphabet_size), 1);
  inst.objective.range = 1;
  inst.leader = 1;
  return inst;
}

IndexSet iota_set(int n) {
  IndexSet s;
  for (int k = 1; k <= n; ++k) s.push_back(k);
  return s;
}

}  // namespace

Instance peq_two_party_instance(int leader_set_size, int intersection_size, int databases) {
  if (intersection_size < 1 || intersection_size > leader_set_size) {
    throw ContractViolation("peq instance: need 1 <= M <= P1");
  }
  return base_instance(leader_set_size,
                       {iota_set(leader_set_size), iota_set(intersection_size)},
                       {1, databases});
}

Instance peq_ring_instance(int alphabet_size, int intersection_size, int entities) {
  std::vector<IndexSet> sets;
  std::vector<int> dbs;
  for (int i = 1; i < entities; ++i) {
    sets.push_back(iota_set(alphabet_size));
    dbs.push_back(i == 1 ? 1 : 2);
  }
  sets.push_back(iota_set(intersection_size));
  dbs.push_back(2);
  return base_instance(alphabet_size, std::move(sets), std::move(dbs));
}

Instance peq_star_instance(int leader_set_size, int intersection_size, int entities,
                           int databases) {
  std::vector<IndexSet> sets{iota_set(leader_set_size)};
  std::vector<int> dbs{1};
  for (int i = 2; i <= entities; ++i) {
    sets.push_back(iota_set(intersection_size));
    dbs.push_back(databases);
  }
  return base_instance(leader_set_size, std::move(sets), std::move(dbs));
}

bool cost_equality_event(PeqSetting setting, const Instance& instance, RandomSource& rng) {
  switch (setting) {
    case PeqSetting::two_party: {
      TwoPartyConfig cfg;
      cfg.record_transcript = false;
      Outcome out = run_two_party(instance, rng, cfg);
      int n2 = instance.databases[1];
      return out.download == naive_psi_two_party_cost(instance.leader_set().size(), n2);
    }
    case PeqSetting::ring: {
      RingConfig cfg;
      cfg.record_transcript = false;
      Outcome out = run_ring(instance, rng, cfg);
      return out.total_cost() ==
             naive_psi_ring_cost(instance.entities(), instance.alphabet.size());
    }
    case PeqSetting::star: {
      StarConfig cfg;
      cfg.record_transcript = false;
      Outcome out = run_star(instance, rng, cfg);
      return out.download == naive_psi_star(instance);
    }
  }
  return false;
}

namespace {

template <typename Fn>
ExhaustiveResult enumerate_objectives(Instance instance, int value_range, std::uint64_t limit,
                                      Fn&& event) {
  const int domain = instance.alphabet.size();
  double total = std::pow(static_cast<double>(value_range), static_cast<double>(domain));
  if (total > static_cast<double>(limit)) {
    throw BudgetExceeded("exhaustive objective sweep exceeds limit");
  }
  instance.objective.range = value_range;
  std::vector<int> digits(static_cast<std::size_t>(domain), 0);
  ExhaustiveResult result;
  for (;;) {
    for (int k = 0; k < domain; ++k) {
      instance.objective.values[static_cast<std::size_t>(k)] = digits[static_cast<std::size_t>(k)] + 1;
    }
    ++result.maps;
    if (event(instance)) ++result.hits;
    int i = 0;
    for (; i < domain; ++i) {
      if (++digits[static_cast<std::size_t>(i)] < value_range) break;
      digits[static_cast<std::size_t>(i)] = 0;
    }
    if (i == domain) break;
  }
  return result;
}

}  // namespace

ExhaustiveResult peq_two_party_exhaustive(int leader_set_size, int value_range,
                                          int intersection_size, int databases,
                                          std::uint64_t limit) {
  Instance inst = peq_two_party_instance(leader_set_size, intersection_size, databases);
  SeededSource rng(1);
  return enumerate_objectives(inst, value_range, limit, [&](const Instance& i) {
    return cost_equality_event(PeqSetting::two_party, i, rng);
  });
}

ExhaustiveResult peq_ring_exhaustive(int alphabet_size, int value_range, int intersection_size,
                                     int entities, std::uint64_t limit) {
  Instance inst = peq_ring_instance(alphabet_size, intersection_size, entities);
  SeededSource rng(1);
  return enumerate_objectives(inst, value_range, limit, [&](const Instance& i) {
    return cost_equality_event(PeqSetting::ring, i, rng);
  });
}

ExhaustiveResult peq_star_exhaustive(int leader_set_size, int value_range, int intersection_size,
                                     int entities, std::uint64_t limit) {
  Instance inst = peq_star_instance(leader_set_size, intersection_size, entities, 2);
  SeededSource rng(1);
  return enumerate_objectives(inst, value_range, limit, [&](const Instance& i) {
    return cost_equality_event(PeqSetting::star, i, rng);
  });
}

MonteCarloResult peq_monte_carlo(PeqSetting setting, const PeqParams& params,
                                 std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw ContractViolation("peq_monte_carlo: need at least one trial");
  Instance inst;
  switch (setting) {
    case PeqSetting::two_party:
      inst = peq_two_party_instance(params.leader_set_size, params.intersection_size,
                                    params.databases);
      break;
    case PeqSetting::ring:
      inst = peq_ring_instance(params.alphabet_size, params.intersection_size, params.entities);
      break;
    case PeqSetting::star:
      inst = peq_star_instance(params.leader_set_size, params.intersection_size, params.entities,
                               params.databases);
      break;
  }
  inst.objective.range = params.value_range;
  const int domain = inst.alphabet.size();
  std::uint64_t hits = 0;
  SeededSource rng(derive_seed(seed, 0));
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (int k = 0; k < domain; ++k) {
      inst.objective.values[static_cast<std::size_t>(k)] =
          1 + static_cast<int>(rng.draw(static_cast<std::uint32_t>(params.value_range)));
    }
    if (cost_equality_event(setting, inst, rng)) ++hits;
  }
  MonteCarloResult result;
  result.trials = trials;
  result.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  // 99% normal-approximation half-width
  double p = result.estimate;
  result.halfwidth99 = 2.5758293035489004 * std::sqrt(std::max(p * (1.0 - p), 1e-300) /
                                                      static_cast<double>(trials));
  return result;
}

}  // namespace dofsp
