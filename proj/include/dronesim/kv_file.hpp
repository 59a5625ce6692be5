#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dronesim {

/// Raised for malformed or invalid configuration input. The message names the
/// offending key (and value, when there is one).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered `key = value` document. Keys may repeat (e.g. `drone` lines).
class KvDocument {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static KvDocument parse(std::string_view text);
  static KvDocument load(const std::filesystem::path& path);

  const std::vector<Entry>& entries() const { return entries_; }
  bool contains(std::string_view key) const;

  /// Last value for `key`; throws "missing key: <key>" when absent.
  const std::string& require(std::string_view key) const;
  std::optional<std::string> find(std::string_view key) const;
  std::vector<std::string> all(std::string_view key) const;

  double require_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;

  void set(std::string key, std::string value);
  void append(std::string key, std::string value);

  std::string serialize() const;

 private:
  std::vector<Entry> entries_;
};

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Strict numeric parse of the whole field; throws ConfigError mentioning `key`.
double parse_double(std::string_view text, std::string_view key);
std::uint64_t parse_uint(std::string_view text, std::string_view key);

/// Shortest representation that round-trips (max 17 significant digits).
std::string format_double(double v);
/// Fixed 17-significant-digit representation used in logs.
std::string format_double17(double v);

}  // namespace dronesim
