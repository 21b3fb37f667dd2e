#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "elolab/curves_io.hpp"
#include "elolab/errors.hpp"
#include "elolab/version.hpp"
#include "json.hpp"

namespace elolab::cli {

namespace fs = std::filesystem;

// Usage / validation problems map to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline unsigned threads_from_env() {
  const char* raw = std::getenv("ELO_LAB_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (*end != '\0' || value < 1) throw UsageError("ELO_LAB_THREADS must be a positive integer");
  return static_cast<unsigned>(value);
}

// Collects the files of one command invocation and writes manifest.json.
class OutputBundle {
 public:
  OutputBundle(std::string command, const std::string& dir) : command_(std::move(command)) {
    if (!dir.empty()) {
      dir_ = dir;
      fs::create_directories(dir_);
    }
  }

  bool enabled() const { return !dir_.empty(); }
  nlohmann::ordered_json& parameters() { return parameters_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  void write_text(const std::string& name, const std::string& text) {
    if (!enabled()) return;
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << text;
    files_.push_back(name);
  }

  void write_json(const std::string& name, const nlohmann::ordered_json& j) {
    write_text(name, j.dump(2) + "\n");
  }

  void write_curves(const std::string& stem, const CurveTable& table) {
    if (!enabled()) return;
    std::ostringstream csv;
    write_curves_csv(csv, table);
    write_text(stem + ".csv", csv.str());
    write_json(stem + ".json", curves_to_json(table));
  }

  void finish() {
    if (!enabled()) return;
    nlohmann::ordered_json manifest;
    manifest["command"] = command_;
    manifest["tool"] = "elo_lab";
    manifest["version"] = kVersion;
    if (seed_) manifest["seed"] = *seed_;
    else manifest["seed"] = nullptr;
    manifest["parameters"] = parameters_;
    auto outputs = files_;
    outputs.push_back("manifest.json");
    manifest["outputs"] = outputs;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path dir_;
  nlohmann::ordered_json parameters_ = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> files_;
};

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  return out;
}

}  // namespace elolab::cli
