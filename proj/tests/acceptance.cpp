// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Tolerances and runtime budgets are
// pinned below.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "hbds/hbds.hpp"
#include "oracle.hpp"

using namespace hbds;

namespace {

constexpr double kFormulaTol = 1e-12;
constexpr double kIaSumTol = 1e-9;
constexpr double kVcgTol = 1e-9;
constexpr int kVcgInstances = 10'000;
constexpr int kCiaTriples = 50;
constexpr double kHbdsGainAt08 = 0.02;
constexpr double kAuditTol = 1e-6;

constexpr double kBudgetFormula = 1.0;
constexpr double kBudgetVcg = 300.0;
constexpr double kBudgetCia = 1.0;
constexpr double kBudgetDegradation = 600.0;
constexpr double kBudgetBenefit = 900.0;
constexpr double kBudgetOrdering = 1200.0;
constexpr double kBudgetAuditPerRun = 10.0;
constexpr double kBudgetDeterminism = 120.0;
constexpr double kBudgetNullIncentive = 120.0;

const std::vector<double> kFractions{0.0, 0.2, 0.4, 0.6, 0.8};
const std::vector<Protocol> kProtocols{Protocol::HBDS, Protocol::NoIncentive, Protocol::SSARLike,
                                       Protocol::SimBetLike};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

int failures = 0;

void report(int id, const char* name, const Outcome& o, double budget) {
  const bool in_budget = o.seconds <= budget;
  const bool pass = o.pass && in_budget;
  if (!pass) ++failures;
  std::printf("%s %d %s: %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), o.seconds,
              budget, in_budget ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---- 1 ----------------------------------------------------------------------

Outcome formula_exactness() {
  Outcome o;
  double worst_e = 0.0, worst_zero = 0.0;
  for (std::uint64_t c = 1; c <= 1000; ++c) {
    worst_e = std::max(worst_e, std::abs(penalty_coefficient(c, 0) - std::exp(1.0)));
    worst_zero = std::max(worst_zero, std::abs(penalty_coefficient(c, c)));
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mag(-6.0, 6.0);
  double worst_sum = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const auto ia =
        importance_aspect(std::pow(10.0, mag(rng)), std::pow(10.0, mag(rng)), std::pow(10.0, mag(rng)));
    worst_sum = std::max(worst_sum, std::abs(ia[0] + ia[1] + ia[2] - 1.0));
  }
  // Weight triples on the 0.1 grid summing to 1.
  std::vector<HonestyWeights> weights;
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; a + b <= 10; ++b) weights.push_back({a / 10.0, b / 10.0, (10 - a - b) / 10.0});
  double worst_one = 0.0;
  std::size_t monotone_violations = 0;
  for (const auto& w : weights) {
    worst_one = std::max(worst_one, std::abs(final_honesty(1, 1, 1, w) - 1.0));
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j <= 10; ++j)
        for (int k = 0; k <= 10; ++k) {
          const double v = final_honesty(i / 10.0, j / 10.0, k / 10.0, w);
          if (i < 10 && final_honesty((i + 1) / 10.0, j / 10.0, k / 10.0, w) < v) ++monotone_violations;
          if (j < 10 && final_honesty(i / 10.0, (j + 1) / 10.0, k / 10.0, w) < v) ++monotone_violations;
          if (k < 10 && final_honesty(i / 10.0, j / 10.0, (k + 1) / 10.0, w) < v) ++monotone_violations;
        }
  }
  o.pass = worst_e <= kFormulaTol && worst_zero <= kFormulaTol && worst_sum <= kIaSumTol && worst_one <= kFormulaTol &&
           monotone_violations == 0;
  o.detail = "max|P(C,0)-e|=" + fmt(worst_e, 17) + " max|P(C,C)|=" + fmt(worst_zero, 17) +
             " max|sum IA-1|=" + fmt(worst_sum, 17) + " max|FH(1,1,1)-1|=" + fmt(worst_one, 17) +
             " monotonicity violations=" + std::to_string(monotone_violations);
  return o;
}

// ---- 2 ----------------------------------------------------------------------

// Pay - Cost for candidate xi when it declares `report`; the cost uses the
// true honesty, since that is what the node actually pays against.
std::pair<double, Heads> vcg_utility(std::vector<Candidate> cands, std::size_t xi, double report,
                                     const std::vector<NodeId>& voters, const HonestyMatrix& m,
                                     const IncentiveConstants& k) {
  const double truth = cands[xi].fh;
  cands[xi].fh = report;
  const NodeId x = cands[xi].id;
  const auto ballots = cast_votes(cands, voters, m);
  const auto heads = *elect_heads(ballots, cands);
  const auto v = votes_for(x, ballots);
  const double beta = compute_beta(x, cands, voters, m);
  double u = compute_pay(v, beta, k);
  if (heads.ch == x && v > 0) u -= compute_cost(truth, rival_honesty(x, cands), v, beta, k);
  return {u, heads};
}

Outcome vcg_truthfulness() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> grid(1, 10);
  const IncentiveConstants k{1.0, 1.0, 0.5};
  long checks = 0, tie_cases = 0, violations = 0;
  double worst_gain = 0.0;
  for (int inst = 0; inst < kVcgInstances; ++inst) {
    const int n = 4 + static_cast<int>(rng() % 3);  // 4..6 nodes
    const int c = 3 + static_cast<int>(rng() % static_cast<unsigned>(n - 3));
    std::vector<Candidate> cands;
    for (int i = 0; i < c; ++i) cands.push_back({NodeId(static_cast<std::uint32_t>(i)), grid(rng) / 10.0});
    std::vector<NodeId> voters;
    for (int i = 0; i < n; ++i) voters.push_back(NodeId(static_cast<std::uint32_t>(i)));
    HonestyMatrix m;
    for (NodeId v : voters)
      for (const auto& cand : cands) m.set(v, cand.id, grid(rng) / 10.0);
    for (std::size_t xi = 0; xi < cands.size(); ++xi) {
      const auto [u_true, h_true] = vcg_utility(cands, xi, cands[xi].fh, voters, m, k);
      for (int r = 1; r <= 10; ++r) {
        ++checks;
        const auto [u_lie, h_lie] = vcg_utility(cands, xi, r / 10.0, voters, m, k);
        if (!(h_lie == h_true)) {
          ++tie_cases;
          continue;
        }
        if (u_lie > u_true + kVcgTol) {
          ++violations;
          worst_gain = std::max(worst_gain, u_lie - u_true);
        }
      }
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(kVcgInstances) + " elections, " + std::to_string(checks) + " misreports, " +
             std::to_string(tie_cases) + " changed the heads (tie-broken), " + std::to_string(violations) +
             " profitable" + (violations ? " (max gain " + fmt(worst_gain, 6) + ")" : std::string());
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome cia_equivalence() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  int cases = 0, mismatches = 0;
  for (int t = 0; t < kCiaTriples; ++t) {
    const auto ia = importance_aspect(u(rng), u(rng), u(rng));
    const double w[3] = {ia[0], ia[1], ia[2]};
    for (int mask = 0; mask < 8; ++mask) {
      std::array<Verdict, 3> r;
      bool coop[3];
      for (int i = 0; i < 3; ++i) {
        coop[i] = (mask >> i) & 1;
        r[static_cast<std::size_t>(i)] = coop[i] ? Verdict::Coop : Verdict::Self;
      }
      ++cases;
      if ((cia_aggregate(r, ia) == Verdict::Coop) != oracle::cia_coop(coop, w)) ++mismatches;
    }
  }
  // Two watchdogs report Self but the heavier third reports Coop.
  const auto override_ia = importance_aspect(1.0, 1.0, 3.0);
  const bool override_coop =
      cia_aggregate({Verdict::Self, Verdict::Self, Verdict::Coop}, override_ia) == Verdict::Coop;
  const bool majority_self =
      cia_aggregate({Verdict::Self, Verdict::Self, Verdict::Coop}, importance_aspect(1, 1, 1)) == Verdict::Self;
  o.pass = mismatches == 0 && override_coop && majority_self;
  o.detail = std::to_string(cases - mismatches) + "/" + std::to_string(cases) +
             " combinations match the mass oracle; two-vs-one override " + (override_coop ? "holds" : "FAILS") +
             ", equal-weight majority " + (majority_self ? "holds" : "FAILS");
  return o;
}

// ---- 4-6: one shared desk sweep ---------------------------------------------

struct SweepCache {
  ResultTable table;
  double seconds = 0.0;
};

const SweepCache& desk_sweep() {
  static const SweepCache cache = [] {
    SweepPlan plan;
    plan.base = desk_profile();
    plan.axis = SweepAxis::SelfishFraction;
    plan.values = kFractions;
    plan.protocols = kProtocols;
    plan.seeds = default_seeds();
    plan.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto t0 = Clock::now();
    SweepCache c{sweep(plan), 0.0};
    c.seconds = seconds_since(t0);
    return c;
  }();
  return cache;
}

AggregateRow cell(Protocol p, double fraction) {
  return *desk_sweep().table.find(to_string(p), fraction);
}

double overhead_mean(const AggregateRow& a) {
  return a.overhead_ratio ? a.overhead_ratio->mean : std::numeric_limits<double>::infinity();
}

Outcome selfishness_degradation() {
  Outcome o;
  o.seconds = desk_sweep().seconds;
  std::string d = "NoIncentive delivery";
  for (std::size_t i = 0; i < kFractions.size(); ++i) {
    const auto a = cell(Protocol::NoIncentive, kFractions[i]);
    d += " " + fmt(kFractions[i], 1) + ":" + fmt(a.delivery_probability.mean) + "±" +
         fmt(a.delivery_probability.stddev);
    if (i == 0) continue;
    const auto prev = cell(Protocol::NoIncentive, kFractions[i - 1]);
    // A step may rise by at most one sample stddev (the larger of the two cells).
    const double slack = std::max(prev.delivery_probability.stddev, a.delivery_probability.stddev);
    if (a.delivery_probability.mean > prev.delivery_probability.mean + slack) {
      o.pass = false;
      d += "(rise beyond 1 sd)";
    }
  }
  const auto first = cell(Protocol::NoIncentive, 0.0), last = cell(Protocol::NoIncentive, 0.8);
  d += "; net change " + fmt(last.delivery_probability.mean - first.delivery_probability.mean);
  o.detail = d;
  return o;
}

Outcome hbds_benefit() {
  Outcome o;
  o.seconds = desk_sweep().seconds;
  std::string d;
  for (double f : kFractions) {
    if (f < 0.2) continue;
    const auto h = cell(Protocol::HBDS, f), b = cell(Protocol::NoIncentive, f);
    const double gain = h.delivery_probability.mean - b.delivery_probability.mean;
    bool ok = gain >= 0.0 && h.avg_delay_s.mean <= b.avg_delay_s.mean &&
              h.packets_dropped.mean <= b.packets_dropped.mean;
    if (f == 0.8 && gain < kHbdsGainAt08) ok = false;
    if (!ok) o.pass = false;
    d += (d.empty() ? "" : "; ") + fmt(f, 1) + ": delivery " + fmt(h.delivery_probability.mean) + " vs " +
         fmt(b.delivery_probability.mean) + " (" + (gain >= 0 ? "+" : "") + fmt(100.0 * gain, 2) + " pts), delay " +
         fmt(h.avg_delay_s.mean, 1) + " vs " + fmt(b.avg_delay_s.mean, 1) + " s, drops " +
         fmt(h.packets_dropped.mean, 1) + " vs " + fmt(b.packets_dropped.mean, 1) + (ok ? "" : " [violated]");
  }
  o.detail = d;
  return o;
}

Outcome protocol_ordering() {
  Outcome o;
  o.seconds = desk_sweep().seconds;
  std::string d;
  for (double f : kFractions) {
    if (f < 0.2) continue;
    const auto h = cell(Protocol::HBDS, f), s = cell(Protocol::SSARLike, f), m = cell(Protocol::SimBetLike, f);
    std::vector<std::string> broken;
    if (!(h.delivery_probability.mean > s.delivery_probability.mean &&
          s.delivery_probability.mean > m.delivery_probability.mean))
      broken.push_back("delivery");
    if (!(h.avg_delay_s.mean < s.avg_delay_s.mean && s.avg_delay_s.mean < m.avg_delay_s.mean))
      broken.push_back("delay");
    if (!(overhead_mean(h) < overhead_mean(s) && overhead_mean(s) < overhead_mean(m))) broken.push_back("overhead");
    if (!(h.packets_dropped.mean < s.packets_dropped.mean && s.packets_dropped.mean < m.packets_dropped.mean))
      broken.push_back("drops");
    if (!broken.empty()) o.pass = false;
    std::string b;
    for (const auto& x : broken) b += (b.empty() ? "" : ",") + x;
    d += (d.empty() ? "" : "; ") + fmt(f, 1) + " HBDS/SSAR-like/SimBet-like delivery " +
         fmt(h.delivery_probability.mean) + "/" + fmt(s.delivery_probability.mean) + "/" +
         fmt(m.delivery_probability.mean) + " delay " + fmt(h.avg_delay_s.mean, 0) + "/" +
         fmt(s.avg_delay_s.mean, 0) + "/" + fmt(m.avg_delay_s.mean, 0) + " overhead " + fmt(overhead_mean(h), 2) +
         "/" + fmt(overhead_mean(s), 2) + "/" + fmt(overhead_mean(m), 2) + " drops " +
         fmt(h.packets_dropped.mean, 0) + "/" + fmt(s.packets_dropped.mean, 0) + "/" +
         fmt(m.packets_dropped.mean, 0) + (broken.empty() ? "" : " [out of order: " + b + "]");
  }
  o.detail = d;
  return o;
}

// ---- 7 ----------------------------------------------------------------------

Outcome ledger_audit(double& slowest) {
  Outcome o;
  int runs = 0, failed = 0;
  double worst = 0.0;
  slowest = 0.0;
  std::string first_issue;
  for (Protocol p : {Protocol::HBDS, Protocol::NoIncentive})
    for (double f : kFractions)
      for (std::uint64_t seed : {1u, 2u}) {
        auto c = desk_profile();
        c.protocol = p;
        c.selfish_fraction = f;
        c.rng_seed = seed;
        const auto t0 = Clock::now();
        const auto r = simulate(c);
        const auto a = audit_trace(r.trace, kAuditTol);
        slowest = std::max(slowest, seconds_since(t0));
        ++runs;
        const double err = std::abs(a.replayed_total - r.final_total_reputation);
        worst = std::max({worst, err, a.max_node_error});
        if (!a.ok() || err > kAuditTol) {
          ++failed;
          if (first_issue.empty() && !a.issues.empty()) first_issue = a.issues.front();
        }
      }
  o.pass = failed == 0;
  o.detail = std::to_string(runs - failed) + "/" + std::to_string(runs) +
             " runs reconcile, worst gap " + fmt(worst, 12) + (first_issue.empty() ? "" : "; " + first_issue);
  o.seconds = slowest;
  return o;
}

// ---- 8 ----------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  int identical = 0, runs = 0;
  for (Protocol p : kProtocols) {
    auto c = desk_profile();
    c.protocol = p;
    c.selfish_fraction = 0.4;
    c.rng_seed = 7;
    const auto a = simulate(c), b = simulate(c);
    auto csv = [&](const RunResult& r) {
      ResultTable t;
      t.add({std::string(to_string(p)), "selfish", c.selfish_fraction, c.rng_seed, r.metrics});
      return to_csv(t);
    };
    ++runs;
    if (a.trace.text() == b.trace.text() && csv(a) == csv(b)) ++identical;
  }
  o.pass = identical == runs;
  o.detail = std::to_string(identical) + "/" + std::to_string(runs) + " protocols byte-identical in trace and CSV";
  return o;
}

// ---- 9 ----------------------------------------------------------------------

Outcome null_incentive() {
  Outcome o;
  int equal = 0;
  std::size_t delivered = 0;
  for (std::uint64_t seed : default_seeds()) {
    auto c = desk_profile();
    c.selfish_fraction = 0.0;
    c.rng_seed = seed;
    c.protocol = Protocol::HBDS;
    const auto h = simulate(c);
    c.protocol = Protocol::NoIncentive;
    const auto b = simulate(c);
    if (h.delivered == b.delivered) ++equal;
    delivered += h.delivered.size();
  }
  o.pass = equal == static_cast<int>(default_seeds().size());
  o.detail = std::to_string(equal) + "/" + std::to_string(default_seeds().size()) +
             " seeds deliver identical packet sets (" + std::to_string(delivered) + " packets in total)";
  return o;
}

template <class Fn>
Outcome timed(Fn&& fn) {
  const auto t0 = Clock::now();
  Outcome o = fn();
  o.seconds = seconds_since(t0);
  return o;
}

}  // namespace

int main() {
  report(1, "formula exactness", timed(formula_exactness), kBudgetFormula);
  report(2, "VCG truthfulness", timed(vcg_truthfulness), kBudgetVcg);
  report(3, "CIA oracle equivalence", timed(cia_equivalence), kBudgetCia);
  desk_sweep();
  report(4, "selfishness degradation trend", selfishness_degradation(), kBudgetDegradation);
  report(5, "HBDS benefit", hbds_benefit(), kBudgetBenefit);
  report(6, "protocol ordering", protocol_ordering(), kBudgetOrdering);
  double slowest = 0.0;
  report(7, "ledger conservation audit", ledger_audit(slowest), kBudgetAuditPerRun);
  report(8, "determinism", timed(determinism), kBudgetDeterminism);
  report(9, "null-incentive equivalence", timed(null_incentive), kBudgetNullIncentive);
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
