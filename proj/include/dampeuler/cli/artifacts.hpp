#pragma once

// Output files: CSV tables, binary snapshots, JSON reports and the manifest
// that lists each of them with its SHA-256.

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dampeuler/cli/config.hpp"
#include "dampeuler/euler2d/snapshot.hpp"

#ifndef DAMPEULER_VERSION
#define DAMPEULER_VERSION "0.0.0"
#endif

namespace dampeuler::cli {

inline constexpr const char* kSoftwareVersion = DAMPEULER_VERSION;

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 0xf]);
  }
  return out;
}

/// Hash of the canonical config with the output directory removed, so that
/// the same experiment written to two places carries the same hash.
inline std::string config_hash(const ExperimentConfig& c) {
  json j = config_to_json(c);
  j.erase("output");
  return sha256_hex(j.dump());
}

/// Shortest text that reads back to the same double.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string fmt(std::optional<double> x) { return x ? fmt(*x) : ""; }
inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(long x) { return std::to_string(x); }
inline std::string fmt(std::size_t x) { return std::to_string(x); }
inline std::string fmt(bool x) { return x ? "true" : "false"; }
inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  template <class... T>
  void row(const T&... cells) {
    if (sizeof...(T) != columns_.size()) throw std::logic_error("CsvTable: row width mismatch");
    rows_.push_back({fmt(cells)...});
  }

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  /// Comment block (version, config hash, description), header row, data.
  std::string render(const std::string& config_sha, const std::string& description) const {
    std::ostringstream os;
    os << "# dampeuler " << kSoftwareVersion << "\n";
    os << "# config_sha256 " << config_sha << "\n";
    if (!description.empty()) os << "# " << description << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) os << ',';
        const std::string& c = cells[k];
        if (c.find_first_of(",\"\n") != std::string::npos) {
          os << '"';
          for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
          os << '"';
        } else {
          os << c;
        }
      }
      os << "\n";
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
    return os.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct ManifestEntry {
  std::string path;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

/// Writes files into one directory and records each in the manifest.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, std::string config_sha)
      : dir_(std::move(dir)), config_sha_(std::move(config_sha)) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }
  const std::string& config_sha() const { return config_sha_; }

  void write_csv(const std::string& name, const CsvTable& t, const std::string& description = "") {
    write_bytes(name, t.render(config_sha_, description));
  }

  void write_json(const std::string& name, const json& j) { write_bytes(name, j.dump(2) + "\n"); }

  void write_snapshot(const std::string& name, const euler2d::FlowState2D& s) {
    std::ostringstream os(std::ios::binary);
    euler2d::write_snapshot(os, s);
    write_bytes(name, os.str());
  }

  void write_bytes(const std::string& name, const std::string& data) {
    const auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!os) throw std::runtime_error("write failed for " + path.string());
    entries_[name] = {name, data.size(), sha256_hex(data)};
  }

  std::vector<ManifestEntry> entries() const {
    std::vector<ManifestEntry> out;
    for (const auto& [k, v] : entries_) out.push_back(v);
    return out;
  }

  /// manifest.json: mode, status, config hash, version and every file written
  /// so far (sorted by name). The manifest does not list itself.
  json write_manifest(const ExperimentConfig& c, const std::string& status, const json& extra = {}) {
    json files = json::array();
    for (const auto& e : entries()) {
      files.push_back({{"path", e.path}, {"bytes", e.bytes}, {"sha256", e.sha256}});
    }
    json m = {{"software", std::string("dampeuler ") + kSoftwareVersion},
              {"mode", to_string(c.mode)},
              {"status", status},
              {"config_sha256", config_sha_},
              {"files", files}};
    if (!extra.is_null()) m["summary"] = extra;
    const std::string text = m.dump(2) + "\n";
    std::ofstream os(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write manifest");
    os << text;
    return m;
  }

 private:
  std::filesystem::path dir_;
  std::string config_sha_;
  std::map<std::string, ManifestEntry> entries_;
};

/// Recomputes every hash listed in a manifest; returns the paths that differ.
inline std::vector<std::string> check_manifest(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw std::runtime_error("manifest.json not found in " + dir.string());
  const json m = json::parse(is);
  std::vector<std::string> bad;
  for (const auto& f : m.at("files")) {
    const std::string p = f.at("path").get<std::string>();
    std::ifstream in(dir / p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in || sha256_hex(ss.str()) != f.at("sha256").get<std::string>()) bad.push_back(p);
  }
  return bad;
}

}  // namespace dampeuler::cli
