// Parameter sweeps over selfish fraction or node count, the result table,
// its CSV and JSON forms, and the plot-ready series files.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hbds/metrics.hpp"
#include "hbds/scenario.hpp"
#include "hbds/simulator.hpp"

namespace hbds {

enum class SweepAxis { SelfishFraction, NodeCount };

inline std::string_view to_string(SweepAxis a) { return a == SweepAxis::SelfishFraction ? "selfish" : "nodes"; }

inline std::optional<SweepAxis> parse_axis(std::string_view s) {
  if (s == "selfish" || s == "selfish_fraction") return SweepAxis::SelfishFraction;
  if (s == "nodes" || s == "node_count") return SweepAxis::NodeCount;
  return std::nullopt;
}

inline const std::vector<double>& default_axis_values(SweepAxis a) {
  static const std::vector<double> selfish{0.0, 0.2, 0.4, 0.6, 0.8};
  static const std::vector<double> nodes{20, 30, 40, 50, 60, 70, 80, 90, 100};
  return a == SweepAxis::SelfishFraction ? selfish : nodes;
}

inline std::vector<std::uint64_t> default_seeds() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

// Applies one axis value to a scenario. The node axis varies terminal nodes;
// the relay infrastructure stays as configured.
inline ScenarioConfig apply_axis(ScenarioConfig c, SweepAxis axis, double value) {
  if (axis == SweepAxis::SelfishFraction) {
    c.selfish_fraction = value;
  } else {
    if (!(value >= 2.0) || value != std::floor(value))
      throw ValidationError("node count axis value must be an integer >= 2, got " + format_double(value));
    c.n_terminal_nodes = static_cast<std::uint32_t>(value);
  }
  return c;
}

// One (protocol, axis value, seed) cell.
struct ResultRow {
  std::string protocol;
  std::string axis;
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  MetricsReport metrics;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t n = 0;

  double stderr_of_mean() const { return n > 0 ? stddev / std::sqrt(static_cast<double>(n)) : 0.0; }
  friend bool operator==(const Stat&, const Stat&) = default;
};

inline Stat summarize(const std::vector<double>& xs) {
  Stat s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// Mean and spread of every metric over the seeds of one cell.
struct AggregateRow {
  std::string protocol;
  std::string axis;
  double axis_value = 0.0;
  std::size_t seeds = 0;
  Stat delivery_probability;
  Stat avg_delay_s;
  std::optional<Stat> overhead_ratio;  // over seeds where it is defined
  Stat packets_dropped;
  Stat packets_created;
  Stat packets_delivered;
  Stat relay_transmissions;
};

inline int protocol_rank(std::string_view name) {
  if (auto p = parse_protocol(name)) return static_cast<int>(*p);
  return 100;
}

inline bool row_order(const ResultRow& a, const ResultRow& b) {
  return std::tuple(protocol_rank(a.protocol), a.protocol, a.axis_value, a.seed) <
         std::tuple(protocol_rank(b.protocol), b.protocol, b.axis_value, b.seed);
}

class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<ResultRow> rows) : rows_(std::move(rows)) { sort(); }

  void add(ResultRow r) {
    rows_.push_back(std::move(r));
    sort();
  }
  const std::vector<ResultRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  // One aggregate per (protocol, axis value), in row order.
  std::vector<AggregateRow> aggregates() const {
    std::vector<AggregateRow> out;
    for (std::size_t i = 0; i < rows_.size();) {
      std::size_t j = i;
      while (j < rows_.size() && rows_[j].protocol == rows_[i].protocol && rows_[j].axis == rows_[i].axis &&
             rows_[j].axis_value == rows_[i].axis_value)
        ++j;
      out.push_back(aggregate(i, j));
      i = j;
    }
    return out;
  }

  std::optional<AggregateRow> find(std::string_view protocol, double axis_value) const {
    for (auto& a : aggregates())
      if (a.protocol == protocol && a.axis_value == axis_value) return a;
    return std::nullopt;
  }

  friend bool operator==(const ResultTable&, const ResultTable&) = default;

 private:
  void sort() { std::stable_sort(rows_.begin(), rows_.end(), row_order); }

  AggregateRow aggregate(std::size_t i, std::size_t j) const {
    AggregateRow a;
    a.protocol = rows_[i].protocol;
    a.axis = rows_[i].axis;
    a.axis_value = rows_[i].axis_value;
    a.seeds = j - i;
    auto col = [&](auto get) {
      std::vector<double> v;
      for (std::size_t k = i; k < j; ++k) v.push_back(static_cast<double>(get(rows_[k].metrics)));
      return summarize(v);
    };
    a.delivery_probability = col([](const MetricsReport& m) { return m.delivery_probability; });
    a.avg_delay_s = col([](const MetricsReport& m) { return m.avg_delivery_delay; });
    a.packets_dropped = col([](const MetricsReport& m) { return m.packets_dropped; });
    a.packets_created = col([](const MetricsReport& m) { return m.packets_created; });
    a.packets_delivered = col([](const MetricsReport& m) { return m.packets_delivered; });
    a.relay_transmissions = col([](const MetricsReport& m) { return m.relay_transmissions; });
    std::vector<double> oh;
    for (std::size_t k = i; k < j; ++k)
      if (rows_[k].metrics.overhead_ratio) oh.push_back(*rows_[k].metrics.overhead_ratio);
    if (!oh.empty()) a.overhead_ratio = summarize(oh);
    return a;
  }

  std::vector<ResultRow> rows_;
};

// ---- sweeps ----------------------------------------------------------------

struct SweepPlan {
  ScenarioConfig base = desk_profile();
  SweepAxis axis = SweepAxis::SelfishFraction;
  std::vector<double> values = default_axis_values(SweepAxis::SelfishFraction);
  std::vector<Protocol> protocols{Protocol::HBDS, Protocol::NoIncentive, Protocol::SSARLike, Protocol::SimBetLike};
  std::vector<std::uint64_t> seeds = default_seeds();
  unsigned threads = 1;
};

// Called after each finished cell with (done, total, row).
using SweepProgress = std::function<void(std::size_t, std::size_t, const ResultRow&)>;

inline ResultTable sweep(const SweepPlan& plan, const SweepProgress& progress = {}) {
  if (plan.seeds.empty()) throw ValidationError("sweep: at least one seed is required");
  struct Cell {
    ScenarioConfig cfg;
    double value;
  };
  std::vector<Cell> cells;
  for (Protocol p : plan.protocols)
    for (double v : plan.values)
      for (std::uint64_t s : plan.seeds) {
        ScenarioConfig c = apply_axis(plan.base, plan.axis, v);
        c.protocol = p;
        c.rng_seed = s;
        c.validate();
        cells.push_back({std::move(c), v});
      }

  std::vector<std::optional<ResultRow>> out(cells.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const auto& cell = cells[i];
        ResultRow row{std::string(to_string(cell.cfg.protocol)), std::string(to_string(plan.axis)), cell.value,
                      cell.cfg.rng_seed, simulate(cell.cfg).metrics};
        std::lock_guard lock(mu);
        out[i] = row;
        ++done;
        if (progress) progress(done, cells.size(), row);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = cells.size();
        return;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(plan.threads, static_cast<unsigned>(cells.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<ResultRow> rows;
  rows.reserve(out.size());
  for (auto& r : out) rows.push_back(std::move(*r));
  return ResultTable(std::move(rows));
}

// ---- CSV -------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "protocol,axis,axis_value,seed,delivery_probability,avg_delay_s,overhead_ratio,packets_dropped,"
    "packets_created,packets_delivered,relay_transmissions";

inline constexpr const char* kMeanSeed = "mean";

inline std::string csv_row(const ResultRow& r) {
  const auto& m = r.metrics;
  std::ostringstream os;
  os << r.protocol << ',' << r.axis << ',' << format_double(r.axis_value) << ',' << r.seed << ','
     << format_double(m.delivery_probability) << ',' << format_double(m.avg_delivery_delay) << ','
     << format_overhead(m.overhead_ratio) << ',' << m.packets_dropped << ',' << m.packets_created << ','
     << m.packets_delivered << ',' << m.relay_transmissions;
  return os.str();
}

inline std::string csv_row(const AggregateRow& a) {
  std::ostringstream os;
  os << a.protocol << ',' << a.axis << ',' << format_double(a.axis_value) << ',' << kMeanSeed << ','
     << format_double(a.delivery_probability.mean) << ',' << format_double(a.avg_delay_s.mean) << ','
     << (a.overhead_ratio ? format_double(a.overhead_ratio->mean) : std::string(kUndefined)) << ','
     << format_double(a.packets_dropped.mean) << ',' << format_double(a.packets_created.mean) << ','
     << format_double(a.packets_delivered.mean) << ',' << format_double(a.relay_transmissions.mean);
  return os.str();
}

// Data rows of each cell followed by its mean row.
inline std::string to_csv(const ResultTable& t) {
  std::string s = std::string(kCsvHeader) + '\n';
  const auto aggs = t.aggregates();
  std::size_t k = 0;
  for (const auto& a : aggs) {
    for (std::size_t i = 0; i < a.seeds; ++i, ++k) s += csv_row(t.rows()[k]) + '\n';
    s += csv_row(a) + '\n';
  }
  return s;
}

namespace detail {

inline std::uint64_t parse_u64(const std::string& v, const char* what) {
  std::size_t used = 0;
  const auto x = std::stoull(v, &used);
  if (used != v.size()) throw std::runtime_error(std::string("results: bad ") + what + " '" + v + "'");
  return x;
}

inline double parse_real(const std::string& v, const char* what) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::runtime_error(std::string("results: bad ") + what + " '" + v + "'");
  return x;
}

}  // namespace detail

// Parses the data rows back; mean rows are recomputed, not read.
inline ResultTable parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("results: unexpected CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = detail::split(line, ',');
    if (f.size() != 11) throw std::runtime_error("results: expected 11 CSV fields in '" + line + "'");
    if (f[3] == kMeanSeed) continue;
    ResultRow r;
    r.protocol = f[0];
    r.axis = f[1];
    r.axis_value = detail::parse_real(f[2], "axis_value");
    r.seed = detail::parse_u64(f[3], "seed");
    auto& m = r.metrics;
    m.delivery_probability = detail::parse_real(f[4], "delivery_probability");
    m.avg_delivery_delay = detail::parse_real(f[5], "avg_delay_s");
    if (f[6] != kUndefined) m.overhead_ratio = detail::parse_real(f[6], "overhead_ratio");
    m.packets_dropped = detail::parse_u64(f[7], "packets_dropped");
    m.packets_created = detail::parse_u64(f[8], "packets_created");
    m.packets_delivered = detail::parse_u64(f[9], "packets_delivered");
    m.relay_transmissions = detail::parse_u64(f[10], "relay_transmissions");
    rows.push_back(std::move(r));
  }
  return ResultTable(std::move(rows));
}

// ---- JSON ------------------------------------------------------------------

inline nlohmann::ordered_json to_json_value(const Stat& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"n", s.n}};
}

inline nlohmann::ordered_json to_json_value(const ResultTable& t) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows()) {
    const auto& m = r.metrics;
    rows.push_back({{"protocol", r.protocol},
                    {"axis", r.axis},
                    {"axis_value", r.axis_value},
                    {"seed", r.seed},
                    {"delivery_probability", m.delivery_probability},
                    {"avg_delay_s", m.avg_delivery_delay},
                    {"overhead_ratio", m.overhead_ratio ? ordered_json(*m.overhead_ratio) : ordered_json(nullptr)},
                    {"packets_dropped", m.packets_dropped},
                    {"packets_created", m.packets_created},
                    {"packets_delivered", m.packets_delivered},
                    {"relay_transmissions", m.relay_transmissions}});
  }
  ordered_json aggs = ordered_json::array();
  for (const auto& a : t.aggregates()) {
    aggs.push_back({{"protocol", a.protocol},
                    {"axis", a.axis},
                    {"axis_value", a.axis_value},
                    {"seeds", a.seeds},
                    {"delivery_probability", to_json_value(a.delivery_probability)},
                    {"avg_delay_s", to_json_value(a.avg_delay_s)},
                    {"overhead_ratio", a.overhead_ratio ? to_json_value(*a.overhead_ratio) : ordered_json(nullptr)},
                    {"packets_dropped", to_json_value(a.packets_dropped)},
                    {"packets_created", to_json_value(a.packets_created)},
                    {"packets_delivered", to_json_value(a.packets_delivered)},
                    {"relay_transmissions", to_json_value(a.relay_transmissions)}});
  }
  return {{"columns", kCsvHeader}, {"rows", rows}, {"aggregates", aggs}};
}

inline std::string to_json(const ResultTable& t) { return to_json_value(t).dump(2) + '\n'; }

inline ResultTable parse_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<ResultRow> rows;
  for (const auto& o : j.at("rows")) {
    ResultRow r;
    r.protocol = o.at("protocol").get<std::string>();
    r.axis = o.at("axis").get<std::string>();
    r.axis_value = o.at("axis_value").get<double>();
    r.seed = o.at("seed").get<std::uint64_t>();
    auto& m = r.metrics;
    m.delivery_probability = o.at("delivery_probability").get<double>();
    m.avg_delivery_delay = o.at("avg_delay_s").get<double>();
    if (!o.at("overhead_ratio").is_null()) m.overhead_ratio = o.at("overhead_ratio").get<double>();
    m.packets_dropped = o.at("packets_dropped").get<std::uint64_t>();
    m.packets_created = o.at("packets_created").get<std::uint64_t>();
    m.packets_delivered = o.at("packets_delivered").get<std::uint64_t>();
    m.relay_transmissions = o.at("relay_transmissions").get<std::uint64_t>();
    rows.push_back(std::move(r));
  }
  return ResultTable(std::move(rows));
}

// ---- series ----------------------------------------------------------------

struct SeriesPoint {
  double x = 0.0;
  double y = 0.0;
  double stderr_ = 0.0;
};

inline const std::vector<std::string>& series_metrics() {
  static const std::vector<std::string> m{"delivery_probability", "avg_delay_min", "overhead_ratio",
                                          "packets_dropped"};
  return m;
}

// Delay is plotted in minutes.
inline std::map<std::string, std::vector<SeriesPoint>> series_for(const ResultTable& t, const std::string& metric) {
  std::map<std::string, std::vector<SeriesPoint>> out;
  for (const auto& a : t.aggregates()) {
    std::optional<Stat> s;
    double scale = 1.0;
    if (metric == "delivery_probability") s = a.delivery_probability;
    else if (metric == "avg_delay_min") s = a.avg_delay_s, scale = 1.0 / 60.0;
    else if (metric == "overhead_ratio") s = a.overhead_ratio;
    else if (metric == "packets_dropped") s = a.packets_dropped;
    else throw std::invalid_argument("unknown series metric: " + metric);
    if (!s) continue;
    out[a.protocol].push_back({a.axis_value, s->mean * scale, s->stderr_of_mean() * scale});
  }
  return out;
}

inline std::string series_csv(const std::vector<SeriesPoint>& pts) {
  std::string s = "x,y,stderr\n";
  for (const auto& p : pts) s += format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(p.stderr_) + '\n';
  return s;
}

// ---- files -----------------------------------------------------------------

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("error writing " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

enum class ReportFormat { Csv, Json };

// Writes results.<fmt> and one series/<metric>__<protocol>.csv per pair.
inline std::vector<std::filesystem::path> write_report(const ResultTable& t, const std::filesystem::path& dir,
                                                       ReportFormat fmt) {
  ensure_directory(dir);
  std::vector<std::filesystem::path> written;
  const auto main = dir / (fmt == ReportFormat::Csv ? "results.csv" : "results.json");
  write_text_file(main, fmt == ReportFormat::Csv ? to_csv(t) : to_json(t));
  written.push_back(main);
  const auto sdir = dir / "series";
  ensure_directory(sdir);
  for (const auto& metric : series_metrics())
    for (const auto& [protocol, pts] : series_for(t, metric)) {
      const auto p = sdir / (metric + "__" + protocol + ".csv");
      write_text_file(p, series_csv(pts));
      written.push_back(p);
    }
  return written;
}

// Loads results.csv, or results.json when no CSV is present.
inline ResultTable load_results(const std::filesystem::path& dir) {
  if (std::filesystem::exists(dir / "results.csv")) return parse_csv(read_text_file(dir / "results.csv"));
  if (std::filesystem::exists(dir / "results.json")) return parse_json(read_text_file(dir / "results.json"));
  throw std::runtime_error("no results.csv or results.json in " + dir.string());
}

}  // namespace hbds
