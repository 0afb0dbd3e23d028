#pragma once

// Output staging for CLI runs: files are built in memory and written only once the whole
// run has succeeded, followed by a JSON manifest.

#include <bectwist/config.hpp>
#include <bectwist/errors.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#ifndef BECTWIST_VERSION
#define BECTWIST_VERSION "unknown"
#endif

namespace bectwist {

class CsvWriter {
public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t k = 0; k < header.size(); ++k) text_ += (k ? "," : "") + header[k];
    text_ += '\n';
  }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

private:
  static std::string cell(double v) { return fmt::format("{:.17g}", v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

  std::string text_;
};

struct RunOutput {
  std::string command;
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  std::vector<std::string> warnings;
  nlohmann::json extra = nlohmann::json::object();

  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
  void warn(std::string w) { warnings.push_back(std::move(w)); }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes all staged files, the resolved config and manifest.json into `dir`.
/// Returns the manifest.
inline nlohmann::json commit_run(const RunOutput& run, const Config& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json outputs = nlohmann::json::array();
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    outputs.push_back(name);
  };
  for (const auto& [name, content] : run.files) write(name, content);
  write("resolved_config.cfg", cfg.resolved_ini());

  nlohmann::json resolved = nlohmann::json::object();
  for (const auto& [section, keys] : cfg.resolved())
    for (const auto& [k, v] : keys) resolved[section][k] = v;

  nlohmann::json manifest = {
      {"command", run.command},       {"version", BECTWIST_VERSION},
      {"timestamp", utc_timestamp()}, {"config_source", cfg.source()},
      {"resolved_config", resolved},  {"outputs", outputs},
      {"warnings", run.warnings},
  };
  if (!run.extra.empty()) manifest["details"] = run.extra;
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest.json");
  return manifest;
}

/// f(i) for i in [0, n) on up to `threads` workers. Results must be stored by index, so the
/// output never depends on scheduling. The exception of the lowest failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bectwist
