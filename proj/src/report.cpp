#include "tcmc/report.hpp"

#include <json.hpp>

#include "tcmc/util.hpp"

namespace tcmc {

void Report::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}
void Report::add(const std::string& key, bool value) {
  entries_.emplace_back(key, value ? "yes" : "no");
}
void Report::add(const std::string& key, long long value) {
  entries_.emplace_back(key, std::to_string(value));
}

std::string Report::value(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw InputError("report has no entry '" + key + "'");
}

std::string Report::render(ReportFormat fmt) const {
  if (fmt == ReportFormat::Structured) {
    nlohmann::ordered_json j;
    j["report"] = kind_;
    for (const auto& [k, v] : entries_) j[k] = v;
    return j.dump(2);
  }
  std::size_t width = 0;
  for (const auto& [k, v] : entries_) width = std::max(width, k.size());
  std::string out = "[" + kind_ + "]\n";
  for (const auto& [k, v] : entries_) {
    out += "  " + k + std::string(width - k.size(), ' ') + " = " + v + "\n";
  }
  return out;
}

Report Report::parse_structured(const std::string& json_text) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("report"))
    throw InputError("not a structured report");
  Report r(j["report"].get<std::string>());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "report") continue;
    r.add(it.key(), it.value().get<std::string>());
  }
  return r;
}

}  // namespace tcmc
