#include "secjam/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace secjam {

namespace {

using Kind = ConfigError::Kind;

struct Entry {
  std::vector<double> values;
  bool is_vector = false;
  int line = 0;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& key, const std::string& msg) {
  throw ConfigError(Kind::parse, key, line, "line " + std::to_string(line) + ": " + msg);
}

double parse_number(std::string_view tok, int line, const std::string& key) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (tok.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    parse_fail(line, key, "'" + key + "' expects a number, got '" + std::string(tok) + "'");
  return v;
}

Entry parse_value(std::string_view raw, int line, const std::string& key) {
  Entry e;
  e.line = line;
  raw = trim(raw);
  if (raw.empty()) parse_fail(line, key, "missing value for '" + key + "'");
  if (raw.front() == '[') {
    if (raw.back() != ']') parse_fail(line, key, "unterminated vector for '" + key + "'");
    e.is_vector = true;
    auto body = raw.substr(1, raw.size() - 2);
    while (true) {
      const auto comma = body.find(',');
      e.values.push_back(parse_number(body.substr(0, comma), line, key));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
  } else {
    e.values.push_back(parse_number(raw, line, key));
  }
  return e;
}

class Entries {
 public:
  explicit Entries(std::map<std::string, Entry> m) : map_(std::move(m)) {}

  bool has(const std::string& key) const { return map_.count(key) != 0; }

  double scalar(const std::string& key) { return get_scalar(take_required(key)); }

  std::optional<double> optional_scalar(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return get_scalar(take_required(key));
  }

  Point2 point(const std::string& key) { return get_point(take_required(key)); }

  std::optional<Point2> optional_point(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return get_point(take_required(key));
  }

  /// Exactly one of `a` (preferred, named in errors) or `b` must be present.
  std::pair<double, bool> one_of(const std::string& a, const std::string& b) {
    if (has(a) && has(b))
      throw ConfigError(Kind::parse, a, map_.at(b).line,
                        "line " + std::to_string(map_.at(b).line) + ": '" + a + "' and '" + b +
                            "' are mutually exclusive");
    if (has(b)) return {scalar(b), false};
    return {scalar(a), true};
  }

  void reject_leftovers() const {
    if (map_.empty()) return;
    const auto& [key, e] = *map_.begin();
    throw ConfigError(Kind::unknown_key, key, e.line,
                      "line " + std::to_string(e.line) + ": unknown key '" + key + "'");
  }

 private:
  std::pair<std::string, Entry> take_required(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end())
      throw ConfigError(Kind::missing_key, key, 0, "missing required key '" + key + "'");
    auto out = std::make_pair(it->first, it->second);
    map_.erase(it);
    return out;
  }

  static double get_scalar(const std::pair<std::string, Entry>& kv) {
    const auto& [key, e] = kv;
    if (e.is_vector || e.values.size() != 1) parse_fail(e.line, key, "'" + key + "' expects a scalar");
    return e.values[0];
  }

  static Point2 get_point(const std::pair<std::string, Entry>& kv) {
    const auto& [key, e] = kv;
    if (!e.is_vector || e.values.size() != 2)
      parse_fail(e.line, key, "'" + key + "' expects [x, y]");
    return {e.values[0], e.values[1]};
  }

  std::map<std::string, Entry> map_;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string vec(const Point2& p) { return "[" + num(p.x()) + ", " + num(p.y()) + "]"; }

}  // namespace

Scenario parse_scenario(std::string_view text) {
  std::map<std::string, Entry> raw;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      parse_fail(line_no, "", "expected 'key = value', got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) parse_fail(line_no, "", "empty key");
    if (raw.count(key)) parse_fail(line_no, key, "duplicate key '" + key + "'");
    raw.emplace(key, parse_value(line.substr(eq + 1), line_no, key));
  }

  Entries e(std::move(raw));
  Scenario s;
  s.gn_location = e.point("gn");
  s.est_eve_location = e.point("eve_est");
  s.eve_uncertainty = e.scalar("eve_eps_m");
  s.altitude_tx = e.scalar("h1_m");
  s.altitude_jam = e.scalar("h2_m");

  if (e.has("v_mps")) {
    s.speed_tx = s.speed_jam = e.scalar("v_mps");
    if (e.has("v1_mps") || e.has("v2_mps"))
      throw ConfigError(Kind::parse, "v_mps", 0, "'v_mps' and 'v1_mps'/'v2_mps' are mutually exclusive");
  } else if (e.has("v1_mps") || e.has("v2_mps")) {
    s.speed_tx = e.scalar("v1_mps");
    s.speed_jam = e.scalar("v2_mps");
  } else {
    e.scalar("v_mps");  // throws missing_key
  }

  s.slot_duration = e.scalar("slot_s");
  const double horizon = e.scalar("horizon_s");
  if (!(s.slot_duration > 0.0))
    throw ConfigError(Kind::validation, "slot_s", 0, "slot_s must be > 0");
  const double slots = horizon / s.slot_duration;
  const double rounded = std::round(slots);
  if (std::abs(slots - rounded) > 1e-9 * std::max(1.0, rounded) || rounded > 1e7)
    throw ConfigError(Kind::validation, "horizon_s", 0,
                      "horizon_s must be an integer multiple of slot_s");
  s.num_slots = static_cast<int>(rounded);

  if (auto [v, is_db] = e.one_of("p_ave_dbm", "p_ave_w"); is_db)
    s.p_ave = dbm_to_watts(v);
  else
    s.p_ave = v;
  if (auto [v, is_ratio] = e.one_of("p_peak_over_ave", "p_peak_w"); is_ratio)
    s.p_peak = v * s.p_ave;
  else
    s.p_peak = v;
  if (auto [v, is_db] = e.one_of("gamma0_db", "gamma0"); is_db)
    s.gamma0 = db_to_linear(v);
  else
    s.gamma0 = v;

  const auto start = e.optional_point("start");
  const auto end = e.optional_point("end");
  auto endpoint = [&](const char* key, const std::optional<Point2>& shared, const char* shared_key) {
    if (auto p = e.optional_point(key)) return *p;
    if (shared) return *shared;
    throw ConfigError(Kind::missing_key, shared_key, 0,
                      std::string("missing required key '") + shared_key + "' (or '" + key + "')");
  };
  s.start_tx = endpoint("start_tx", start, "start");
  s.end_tx = endpoint("end_tx", end, "end");
  s.start_jam = endpoint("start_jam", start, "start");
  s.end_jam = endpoint("end_jam", end, "end");

  e.reject_leftovers();

  if (const auto report = validate(s); !report.ok()) {
    throw ConfigError(Kind::validation, report.violations.front().field, 0,
                      "invalid scenario: " + report.to_string());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(Kind::io, "", 0, "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "# secure-jamming scenario (linear units)\n"
     << "gn = " << vec(s.gn_location) << "\n"
     << "eve_est = " << vec(s.est_eve_location) << "\n"
     << "eve_eps_m = " << num(s.eve_uncertainty) << "\n"
     << "h1_m = " << num(s.altitude_tx) << "\n"
     << "h2_m = " << num(s.altitude_jam) << "\n"
     << "v1_mps = " << num(s.speed_tx) << "\n"
     << "v2_mps = " << num(s.speed_jam) << "\n"
     << "slot_s = " << num(s.slot_duration) << "\n"
     << "horizon_s = " << num(s.num_slots * s.slot_duration) << "\n"
     << "p_ave_w = " << num(s.p_ave) << "\n"
     << "p_peak_w = " << num(s.p_peak) << "\n"
     << "gamma0 = " << num(s.gamma0) << "\n"
     << "start_tx = " << vec(s.start_tx) << "\n"
     << "end_tx = " << vec(s.end_tx) << "\n"
     << "start_jam = " << vec(s.start_jam) << "\n"
     << "end_jam = " << vec(s.end_jam) << "\n";
  return os.str();
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(Kind::io, "", 0, "cannot write '" + path.string() + "'");
  out << format_scenario(s);
}

}  // namespace secjam
