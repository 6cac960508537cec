#pragma once

#include "secjam/scenario.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace secjam {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { io, parse, missing_key, unknown_key, validation };

  ConfigError(Kind kind, std::string key, int line, const std::string& what)
      : std::runtime_error(what), kind_(kind), key_(std::move(key)), line_(line) {}

  Kind kind() const { return kind_; }
  const std::string& key() const { return key_; }
  /// 1-based line of the offending entry, 0 when not tied to a line.
  int line() const { return line_; }

 private:
  Kind kind_;
  std::string key_;
  int line_;
};

/// Parses the key-value scenario format and validates the result.
///
/// Syntax is one `key = value` per line, `#` starts a comment, vectors are
/// written `[x, y]`. Accepted keys:
///
///   gn, eve_est, start, end           2-D points, m
///   start_tx, end_tx, start_jam, end_jam  per-UAV overrides of start/end
///   eve_eps_m, h1_m, h2_m, slot_s, horizon_s
///   v_mps (or v1_mps and v2_mps)
///   p_ave_dbm | p_ave_w               exactly one
///   p_peak_over_ave | p_peak_w        exactly one
///   gamma0_db | gamma0                exactly one
///
/// Unknown keys, duplicate keys and malformed values are errors.
Scenario parse_scenario(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);

/// Linear-unit serialization that reloads field-for-field.
std::string format_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

}  // namespace secjam
