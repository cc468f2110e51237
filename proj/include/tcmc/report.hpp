#pragma once

#include <string>
#include <vector>

namespace tcmc {

enum class ReportFormat { Text, Structured };

// Reports are flat key/value sequences; the structured format is a JSON
// object (insertion-ordered keys, so it round-trips the text layout), the
// text format one aligned `key = value` line per entry.
class Report {
 public:
  explicit Report(std::string kind) : kind_(std::move(kind)) {}

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, bool value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, std::size_t value) {
    add(key, static_cast<long long>(value));
  }
  void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }

  const std::string& kind() const { return kind_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string value(const std::string& key) const;  // throws InputError when absent

  std::string render(ReportFormat fmt) const;
  static Report parse_structured(const std::string& json_text);

 private:
  std::string kind_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace tcmc
