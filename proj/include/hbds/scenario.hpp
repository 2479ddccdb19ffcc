// Scenario configuration, the two built-in profiles and the flat
// key=value scenario file format.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbds/core.hpp"
#include "hbds/election.hpp"

namespace hbds {

enum class Protocol { HBDS, NoIncentive, SimBetLike, SSARLike };

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::HBDS: return "HBDS";
    case Protocol::NoIncentive: return "NoIncentive";
    case Protocol::SimBetLike: return "SimBet-like";
    case Protocol::SSARLike: return "SSAR-like";
  }
  return "?";
}

inline std::optional<Protocol> parse_protocol(std::string_view s) {
  if (s == "HBDS" || s == "hbds") return Protocol::HBDS;
  if (s == "NoIncentive" || s == "noincentive" || s == "none") return Protocol::NoIncentive;
  if (s == "SimBet-like" || s == "SimBetLike" || s == "simbet") return Protocol::SimBetLike;
  if (s == "SSAR-like" || s == "SSARLike" || s == "ssar") return Protocol::SSARLike;
  return std::nullopt;
}

template <class T>
struct Range {
  T min{};
  T max{};
  bool valid() const { return min <= max; }
  friend bool operator==(const Range&, const Range&) = default;
};

struct ScenarioConfig {
  double area_width = 1500.0;   // m
  double area_height = 1200.0;  // m
  std::uint32_t n_terminal_nodes = 50;
  std::uint32_t n_relay_nodes = 5;
  double tx_range = 300.0;   // m
  double avg_speed = 60.0;   // km/h
  SimTime sim_duration = 2 * 3600;
  Range<SimTime> packet_interval{20, 30};
  Range<std::int64_t> packet_size{50 * 1000, 650 * 1000};
  SimTime packet_ttl = 320 * 60;
  std::int64_t terminal_buffer = 150LL * 1000 * 1000;
  std::int64_t relay_buffer = 250LL * 1000 * 1000;
  double selfish_fraction = 0.0;
  double selfish_drop_probability = 0.9;
  SimTime election_period = 900;
  std::uint64_t rng_seed = 1;
  Protocol protocol = Protocol::HBDS;
  IncentiveConstants incentive_constants{};

  // Engine knobs with fixed defaults.
  std::uint32_t n_communities = 5;
  double link_rate = 2.0e6 / 8.0;  // bytes per second (2 Mbit/s)
  SimTime watchdog_timeout = 60;
  SimTime expel_duration = 900;
  double selfish_gain_threshold = 0.5;
  double rep_target_margin = 10.0;  // Rep_target = median + margin * f_pay
  bool random_honesty_weights = false;
  double ssar_tie_threshold = 0.5;

  std::uint32_t node_count() const { return n_terminal_nodes + n_relay_nodes; }

  // Selfish terminal count, half rounded up.
  std::uint32_t selfish_count() const {
    return static_cast<std::uint32_t>(
        std::floor(selfish_fraction * static_cast<double>(n_terminal_nodes) + 0.5));
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw ValidationError("scenario: " + m); };
    if (!(area_width > 0.0) || !(area_height > 0.0)) fail("simulation area must be non-empty");
    if (n_terminal_nodes < 2) fail("need at least two terminal nodes");
    if (!(tx_range > 0.0)) fail("tx_range must be positive");
    if (avg_speed < 0.0) fail("avg_speed must be non-negative");
    if (sim_duration <= 0) fail("sim_duration must be positive");
    if (!packet_interval.valid() || packet_interval.min <= 0) fail("packet_interval range invalid");
    if (!packet_size.valid() || packet_size.min <= 0) fail("packet_size range invalid");
    if (packet_ttl <= 0) fail("packet_ttl must be positive");
    if (terminal_buffer <= 0 || relay_buffer <= 0) fail("buffers must be positive");
    if (selfish_fraction < 0.0 || selfish_fraction > 1.0) fail("selfish_fraction outside [0,1]");
    if (!(selfish_drop_probability > 0.0) || selfish_drop_probability > 1.0)
      fail("selfish_drop_probability outside (0,1]");
    if (election_period <= 0) fail("election_period must be positive");
    if (!incentive_constants.valid()) fail("incentive constants must be positive");
    if (n_communities == 0) fail("n_communities must be positive");
    if (!(link_rate > 0.0)) fail("link_rate must be positive");
    if (watchdog_timeout <= 0) fail("watchdog_timeout must be positive");
    if (expel_duration <= 0) fail("expel_duration must be positive");
  }
};

inline ScenarioConfig desk_profile() { return ScenarioConfig{}; }

inline ScenarioConfig paper_profile() {
  ScenarioConfig c;
  c.area_width = 4500.0;
  c.area_height = 3500.0;
  c.n_terminal_nodes = 100;
  c.n_relay_nodes = 5;
  c.sim_duration = 24 * 3600;
  c.n_communities = 10;
  return c;
}

// HBDS_PROFILE=paper|desk; desk when unset.
inline ScenarioConfig profile_from_env() {
  const char* p = std::getenv("HBDS_PROFILE");
  if (!p || std::string_view(p).empty() || std::string_view(p) == "desk") return desk_profile();
  if (std::string_view(p) == "paper") return paper_profile();
  throw ValidationError(std::string("HBDS_PROFILE must be 'paper' or 'desk', got '") + p + "'");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T out{};
  is >> out;
  if (!is || !is.eof()) throw ValidationError("scenario: bad value for " + key + ": '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError("scenario: bad boolean for " + key + ": '" + v + "'");
}

template <class T>
Range<T> parse_range(const std::string& key, const std::string& v) {
  auto parts = split(v, ',');
  if (parts.size() != 2) throw ValidationError("scenario: " + key + " expects min,max");
  return {parse_number<T>(key, parts[0]), parse_number<T>(key, parts[1])};
}

inline std::string fmt_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace detail

// Applies one key=value setting. Unknown keys are fatal.
inline void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& v) {
  using detail::parse_number;
  if (key == "area_width") c.area_width = parse_number<double>(key, v);
  else if (key == "area_height") c.area_height = parse_number<double>(key, v);
  else if (key == "n_terminal_nodes") c.n_terminal_nodes = parse_number<std::uint32_t>(key, v);
  else if (key == "n_relay_nodes") c.n_relay_nodes = parse_number<std::uint32_t>(key, v);
  else if (key == "tx_range") c.tx_range = parse_number<double>(key, v);
  else if (key == "avg_speed") c.avg_speed = parse_number<double>(key, v);
  else if (key == "sim_duration") c.sim_duration = parse_number<SimTime>(key, v);
  else if (key == "packet_interval") c.packet_interval = detail::parse_range<SimTime>(key, v);
  else if (key == "packet_size") c.packet_size = detail::parse_range<std::int64_t>(key, v);
  else if (key == "packet_ttl") c.packet_ttl = parse_number<SimTime>(key, v);
  else if (key == "terminal_buffer") c.terminal_buffer = parse_number<std::int64_t>(key, v);
  else if (key == "relay_buffer") c.relay_buffer = parse_number<std::int64_t>(key, v);
  else if (key == "selfish_fraction") c.selfish_fraction = parse_number<double>(key, v);
  else if (key == "selfish_drop_probability") c.selfish_drop_probability = parse_number<double>(key, v);
  else if (key == "election_period") c.election_period = parse_number<SimTime>(key, v);
  else if (key == "rng_seed") c.rng_seed = parse_number<std::uint64_t>(key, v);
  else if (key == "protocol") {
    auto p = parse_protocol(v);
    if (!p) throw ValidationError("scenario: unknown protocol '" + v + "'");
    c.protocol = *p;
  } else if (key == "incentive_constants") {
    auto parts = detail::split(v, ',');
    if (parts.size() != 3) throw ValidationError("scenario: incentive_constants expects fb,f_pay,wn_pay");
    c.incentive_constants = {parse_number<double>(key, parts[0]), parse_number<double>(key, parts[1]),
                             parse_number<double>(key, parts[2])};
  } else if (key == "n_communities") c.n_communities = parse_number<std::uint32_t>(key, v);
  else if (key == "link_rate") c.link_rate = parse_number<double>(key, v);
  else if (key == "watchdog_timeout") c.watchdog_timeout = parse_number<SimTime>(key, v);
  else if (key == "expel_duration") c.expel_duration = parse_number<SimTime>(key, v);
  else if (key == "selfish_gain_threshold") c.selfish_gain_threshold = parse_number<double>(key, v);
  else if (key == "rep_target_margin") c.rep_target_margin = parse_number<double>(key, v);
  else if (key == "random_honesty_weights") c.random_honesty_weights = detail::parse_bool(key, v);
  else if (key == "ssar_tie_threshold") c.ssar_tie_threshold = parse_number<double>(key, v);
  else throw ValidationError("scenario: unknown key '" + key + "'");
}

// Parses scenario text on top of `base`. Blank lines and '#' comments are ignored.
inline ScenarioConfig parse_scenario(std::string_view text, ScenarioConfig base = desk_profile()) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("scenario line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(base, detail::trim(std::string_view(t).substr(0, eq)),
                  detail::trim(std::string_view(t).substr(eq + 1)));
  }
  base.validate();
  return base;
}

inline ScenarioConfig load_scenario(const std::string& path, ScenarioConfig base = profile_from_env()) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str(), std::move(base));
}

inline std::string to_scenario_text(const ScenarioConfig& c) {
  using detail::fmt_double;
  std::ostringstream os;
  os << "area_width=" << fmt_double(c.area_width) << '\n'
     << "area_height=" << fmt_double(c.area_height) << '\n'
     << "n_terminal_nodes=" << c.n_terminal_nodes << '\n'
     << "n_relay_nodes=" << c.n_relay_nodes << '\n'
     << "tx_range=" << fmt_double(c.tx_range) << '\n'
     << "avg_speed=" << fmt_double(c.avg_speed) << '\n'
     << "sim_duration=" << c.sim_duration << '\n'
     << "packet_interval=" << c.packet_interval.min << ',' << c.packet_interval.max << '\n'
     << "packet_size=" << c.packet_size.min << ',' << c.packet_size.max << '\n'
     << "packet_ttl=" << c.packet_ttl << '\n'
     << "terminal_buffer=" << c.terminal_buffer << '\n'
     << "relay_buffer=" << c.relay_buffer << '\n'
     << "selfish_fraction=" << fmt_double(c.selfish_fraction) << '\n'
     << "selfish_drop_probability=" << fmt_double(c.selfish_drop_probability) << '\n'
     << "election_period=" << c.election_period << '\n'
     << "rng_seed=" << c.rng_seed << '\n'
     << "protocol=" << to_string(c.protocol) << '\n'
     << "incentive_constants=" << fmt_double(c.incentive_constants.fixed_budget) << ','
     << fmt_double(c.incentive_constants.f_pay) << ',' << fmt_double(c.incentive_constants.wn_pay) << '\n'
     << "n_communities=" << c.n_communities << '\n'
     << "link_rate=" << fmt_double(c.link_rate) << '\n'
     << "watchdog_timeout=" << c.watchdog_timeout << '\n'
     << "expel_duration=" << c.expel_duration << '\n'
     << "selfish_gain_threshold=" << fmt_double(c.selfish_gain_threshold) << '\n'
     << "rep_target_margin=" << fmt_double(c.rep_target_margin) << '\n'
     << "random_honesty_weights=" << (c.random_honesty_weights ? "true" : "false") << '\n'
     << "ssar_tie_threshold=" << fmt_double(c.ssar_tie_threshold) << '\n';
  return os.str();
}

}  // namespace hbds
