// Command-line front end: single runs, sweeps, report conversion and the
// ledger conservation audit. HBDS_PROFILE=paper|desk picks the defaults.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hbds/hbds.hpp"

namespace fs = std::filesystem;
using namespace hbds;

namespace {

std::vector<Protocol> parse_protocols(const std::vector<std::string>& names) {
  std::vector<Protocol> out;
  for (const auto& n : names) {
    auto p = parse_protocol(n);
    if (!p) throw ValidationError("unknown protocol '" + n + "' (HBDS, NoIncentive, SimBet-like, SSAR-like)");
    out.push_back(*p);
  }
  return out;
}

void print_metrics(const MetricsReport& m) {
  std::printf("delivery_probability=%.4f avg_delay_s=%.1f overhead_ratio=%s dropped=%llu created=%llu "
              "delivered=%llu relays=%llu\n",
              m.delivery_probability, m.avg_delivery_delay, format_overhead(m.overhead_ratio).c_str(),
              static_cast<unsigned long long>(m.packets_dropped), static_cast<unsigned long long>(m.packets_created),
              static_cast<unsigned long long>(m.packets_delivered),
              static_cast<unsigned long long>(m.relay_transmissions));
}

int cmd_run(const std::string& scenario, std::optional<std::uint64_t> seed, const std::string& protocol,
            const fs::path& out) {
  ScenarioConfig cfg = scenario.empty() ? profile_from_env() : load_scenario(scenario);
  if (seed) cfg.rng_seed = *seed;
  if (!protocol.empty()) cfg.protocol = parse_protocols({protocol}).front();
  cfg.validate();
  ensure_directory(out);
  auto r = simulate(cfg);
  r.trace.write((out / "trace.txt").string());
  ResultTable t({ResultRow{std::string(to_string(cfg.protocol)), std::string(to_string(SweepAxis::SelfishFraction)),
                           cfg.selfish_fraction, cfg.rng_seed, r.metrics}});
  write_text_file(out / "results.csv", to_csv(t));
  write_text_file(out / "scenario.txt", to_scenario_text(cfg));
  print_metrics(r.metrics);
  const auto audit = audit_trace(r.trace);
  std::printf("ledger audit: %s (total reputation %.6f)\n", audit.ok() ? "ok" : "FAILED", audit.replayed_total);
  return audit.ok() ? 0 : 1;
}

int cmd_sweep(const std::string& scenario, const std::string& axis_name, std::vector<double> values,
              const std::vector<std::string>& protocols, std::vector<std::uint64_t> seeds, unsigned threads,
              const fs::path& out) {
  SweepPlan plan;
  plan.base = scenario.empty() ? profile_from_env() : load_scenario(scenario);
  auto axis = parse_axis(axis_name);
  if (!axis) throw ValidationError("axis must be 'selfish' or 'nodes'");
  plan.axis = *axis;
  plan.values = values.empty() ? default_axis_values(*axis) : std::move(values);
  if (!protocols.empty()) plan.protocols = parse_protocols(protocols);
  if (!seeds.empty()) plan.seeds = std::move(seeds);
  plan.threads = threads;
  ensure_directory(out);
  auto table = sweep(plan, [](std::size_t done, std::size_t total, const ResultRow& r) {
    std::fprintf(stderr, "[%zu/%zu] %s %s=%g seed=%llu delivery=%.4f\n", done, total, r.protocol.c_str(),
                 r.axis.c_str(), r.axis_value, static_cast<unsigned long long>(r.seed),
                 r.metrics.delivery_probability);
  });
  write_report(table, out, ReportFormat::Csv);
  write_report(table, out, ReportFormat::Json);
  std::printf("%zu rows written to %s\n", table.rows().size(), out.string().c_str());
  return 0;
}

int cmd_report(const fs::path& in, const std::string& format, const fs::path& out) {
  ReportFormat fmt;
  if (format == "csv") fmt = ReportFormat::Csv;
  else if (format == "json") fmt = ReportFormat::Json;
  else throw ValidationError("format must be csv or json");
  const auto table = load_results(in);
  for (const auto& p : write_report(table, out.empty() ? in : out, fmt)) std::printf("%s\n", p.string().c_str());
  return 0;
}

int cmd_audit(const fs::path& trace_path) {
  const auto a = audit_trace(Trace::read(trace_path.string()));
  std::printf("deltas=%zu nodes=%zu replayed_total=%s snapshot_total=%s reported_total=%s max_node_error=%g\n",
              a.deltas, a.nodes, format_double(a.replayed_total).c_str(), format_double(a.snapshot_total).c_str(),
              a.reported_total ? format_double(*a.reported_total).c_str() : kUndefined, a.max_node_error);
  for (const auto& [cause, v] : a.by_cause) std::printf("  %s %s\n", cause.c_str(), format_double(v).c_str());
  for (const auto& i : a.issues) std::printf("issue: %s\n", i.c_str());
  std::printf("audit %s\n", a.ok() ? "ok" : "FAILED");
  return a.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular DTN simulator with honesty-based elections and incentives"};
  app.require_subcommand(1);
  int rc = 0;

  auto* run = app.add_subcommand("run", "Run one scenario and write its trace and metrics");
  std::string run_scenario, run_protocol;
  std::optional<std::uint64_t> run_seed;
  fs::path run_out = "out";
  run->add_option("--scenario", run_scenario, "key=value scenario file (profile defaults when omitted)")
      ->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "RNG seed overriding the scenario");
  run->add_option("--protocol", run_protocol, "protocol overriding the scenario");
  run->add_option("--out", run_out, "output directory")->required();
  run->callback([&] { rc = cmd_run(run_scenario, run_seed, run_protocol, run_out); });

  auto* sw = app.add_subcommand("sweep", "Sweep an axis across protocols and seeds");
  std::string sw_scenario, sw_axis = "selfish";
  std::vector<double> sw_values;
  std::vector<std::string> sw_protocols;
  std::vector<std::uint64_t> sw_seeds;
  unsigned sw_threads = 1;
  fs::path sw_out;
  sw->add_option("--scenario", sw_scenario, "base scenario file")->check(CLI::ExistingFile);
  sw->add_option("--axis", sw_axis, "selfish or nodes")->check(CLI::IsMember({"selfish", "nodes"}));
  sw->add_option("--values", sw_values, "axis values (comma separated)")->delimiter(',');
  sw->add_option("--protocols", sw_protocols, "protocols (comma separated)")->delimiter(',');
  sw->add_option("--seeds", sw_seeds, "seeds (comma separated, default 1..10)")->delimiter(',');
  sw->add_option("--threads", sw_threads, "concurrent simulation instances")->check(CLI::PositiveNumber);
  sw->add_option("--out", sw_out, "output directory")->required();
  sw->callback([&] { rc = cmd_sweep(sw_scenario, sw_axis, sw_values, sw_protocols, sw_seeds, sw_threads, sw_out); });

  auto* rep = app.add_subcommand("report", "Rewrite sweep results as CSV or JSON plus series files");
  fs::path rep_in, rep_out;
  std::string rep_format = "csv";
  rep->add_option("--in", rep_in, "directory holding results.csv or results.json")->required();
  rep->add_option("--format", rep_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  rep->add_option("--out", rep_out, "output directory (defaults to --in)");
  rep->callback([&] { rc = cmd_report(rep_in, rep_format, rep_out); });

  auto* au = app.add_subcommand("audit", "Check ledger conservation over a run trace");
  fs::path au_trace;
  au->add_option("--trace", au_trace, "trace file")->required()->check(CLI::ExistingFile);
  au->callback([&] { rc = cmd_audit(au_trace); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return rc;
}
