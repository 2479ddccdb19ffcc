// Append-only run trace: one `t=<seconds> kind=<event> key=value ...` line
// per record. Lines are written straight into a text buffer; analysis code
// walks them back as parsed TraceRecords.

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbds/core.hpp"

namespace hbds {

// Shortest text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

struct TraceRecord {
  SimTime t = 0;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;

  TraceRecord& add(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  TraceRecord& add(std::string key, double v) { return add(std::move(key), format_double(v)); }
  TraceRecord& add(std::string key, std::int64_t v) { return add(std::move(key), std::to_string(v)); }
  TraceRecord& add(std::string key, std::uint64_t v) { return add(std::move(key), std::to_string(v)); }
  TraceRecord& add(std::string key, int v) { return add(std::move(key), std::to_string(v)); }
  TraceRecord& add(std::string key, unsigned v) { return add(std::move(key), std::to_string(v)); }
  TraceRecord& add(std::string key, NodeId n) { return add(std::move(key), std::to_string(n.value)); }
  TraceRecord& add(std::string key, const char* v) { return add(std::move(key), std::string(v)); }
  TraceRecord& add(std::string key, std::string_view v) { return add(std::move(key), std::string(v)); }

  std::optional<std::string_view> get(std::string_view key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return std::string_view(v);
    return std::nullopt;
  }
  std::string_view at(std::string_view key) const {
    auto v = get(key);
    if (!v) throw std::runtime_error("trace record '" + kind + "' lacks field " + std::string(key));
    return *v;
  }
  double number(std::string_view key) const { return std::stod(std::string(at(key))); }
  std::int64_t integer(std::string_view key) const { return std::stoll(std::string(at(key))); }

  std::string to_line() const {
    std::string s = "t=" + std::to_string(t) + " kind=" + kind;
    for (const auto& [k, v] : fields) {
      s += ' ';
      s += k;
      s += '=';
      s += v;
    }
    return s;
  }

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline void parse_trace_line(std::string_view line, TraceRecord& r) {
  r.fields.clear();
  bool have_t = false, have_kind = false;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    auto end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    auto tok = line.substr(pos, end - pos);
    auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw std::runtime_error("malformed trace token: " + std::string(tok));
    auto key = tok.substr(0, eq);
    auto val = tok.substr(eq + 1);
    if (key == "t" && !have_t) {
      SimTime t = 0;
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), t);
      if (ec != std::errc() || p != val.data() + val.size())
        throw std::runtime_error("bad trace timestamp: " + std::string(val));
      r.t = t;
      have_t = true;
    } else if (key == "kind" && !have_kind) {
      r.kind.assign(val);
      have_kind = true;
    } else {
      r.fields.emplace_back(std::string(key), std::string(val));
    }
    pos = end;
  }
  if (!have_t || !have_kind) throw std::runtime_error("trace line lacks t= or kind=: " + std::string(line));
}

inline TraceRecord parse_trace_line(std::string_view line) {
  TraceRecord r;
  parse_trace_line(line, r);
  return r;
}

// Writes one line; the newline is appended when the writer goes out of scope
// at the end of the emitting statement.
class TraceLine {
 public:
  explicit TraceLine(std::string& out) : out_(&out) {}
  TraceLine(TraceLine&& o) noexcept : out_(o.out_) { o.out_ = nullptr; }
  TraceLine(const TraceLine&) = delete;
  TraceLine& operator=(const TraceLine&) = delete;
  TraceLine& operator=(TraceLine&&) = delete;
  ~TraceLine() {
    if (out_) out_->push_back('\n');
  }

  TraceLine& add(std::string_view key, std::string_view v) {
    out_->push_back(' ');
    out_->append(key);
    out_->push_back('=');
    out_->append(v);
    return *this;
  }
  TraceLine& add(std::string_view key, const char* v) { return add(key, std::string_view(v)); }
  TraceLine& add(std::string_view key, const std::string& v) { return add(key, std::string_view(v)); }
  TraceLine& add(std::string_view key, double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return add(key, std::string_view(buf, static_cast<std::size_t>(p - buf)));
  }
  TraceLine& add(std::string_view key, std::int64_t v) { return integer(key, v); }
  TraceLine& add(std::string_view key, std::uint64_t v) { return integer(key, v); }
  TraceLine& add(std::string_view key, int v) { return integer(key, v); }
  TraceLine& add(std::string_view key, unsigned v) { return integer(key, v); }
  TraceLine& add(std::string_view key, NodeId n) { return integer(key, n.value); }

 private:
  template <class I>
  TraceLine& integer(std::string_view key, I v) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return add(key, std::string_view(buf, static_cast<std::size_t>(p - buf)));
  }

  std::string* out_;
};

class Trace {
 public:
  TraceLine emit(SimTime t, std::string_view kind) {
    ++lines_;
    text_ += "t=";
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, t);
    text_.append(buf, p);
    text_ += " kind=";
    text_ += kind;
    return TraceLine(text_);
  }

  void append(const TraceRecord& r) {
    text_ += r.to_line();
    text_ += '\n';
    ++lines_;
  }

  std::size_t size() const { return lines_; }
  const std::string& text() const { return text_; }

  // Calls fn(const TraceRecord&) for every line in order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    TraceRecord r;
    std::size_t pos = 0;
    const std::string_view all(text_);
    while (pos < all.size()) {
      auto end = all.find('\n', pos);
      if (end == std::string_view::npos) end = all.size();
      auto line = all.substr(pos, end - pos);
      if (!line.empty()) {
        parse_trace_line(line, r);
        fn(static_cast<const TraceRecord&>(r));
      }
      pos = end + 1;
    }
  }

  std::vector<TraceRecord> records() const {
    std::vector<TraceRecord> out;
    out.reserve(lines_);
    for_each([&out](const TraceRecord& r) { out.push_back(r); });
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write trace file: " + path);
    f << text_;
    if (!f) throw std::runtime_error("error writing trace file: " + path);
  }

  // Validates every line; blank lines and CR line endings are tolerated.
  static Trace parse(std::string_view text) {
    Trace tr;
    std::size_t pos = 0;
    TraceRecord r;
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      auto line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) {
        parse_trace_line(line, r);
        tr.text_.append(line);
        tr.text_ += '\n';
        ++tr.lines_;
      }
      pos = end + 1;
    }
    return tr;
  }

  static Trace read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read trace file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

 private:
  std::string text_;
  std::size_t lines_ = 0;
};

}  // namespace hbds
