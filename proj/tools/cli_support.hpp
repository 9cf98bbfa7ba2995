// Support pieces for the painfair CLI: run manifests, output-directory
// locking, digests, CSV round-tripping and aligned-text tables. The CLI layer
// sees the core only through the C API.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "painfair/painfair.h"

namespace pfcli {

// SHA-256 of a byte string / file, lowercase hex.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::string& path);

std::string status_category(pf_status status);  // "usage" | "data" | "numeric" | "internal"
int status_exit_code(pf_status status);         // 2 | 3 | 4

// One line per run, machine readable: {"category":...,"message":...}
std::string error_json(const std::string& category, const std::string& message);

// Every run writes <out_dir>/manifest.json describing inputs (by digest),
// resolved configuration, seeds, and emitted artifacts.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::vector<std::pair<std::string, std::string>> config;  // key, value
  std::vector<std::string> input_files;                     // digested on write
  std::vector<uint64_t> seeds;
  std::vector<std::string> outputs;
  std::string started_at;  // ISO 8601 UTC
  double wall_seconds = 0.0;
  std::string status = "ok";
  std::string error_category;
  std::string error_message;

  void add_config(const std::string& key, const std::string& value);
  void add_config(const std::string& key, double value);
  void add_config(const std::string& key, long long value);
  void write(const std::string& out_dir) const;
};

std::string now_iso8601_utc();

// Exclusive per-output-directory lock; one run at a time.
class RunLock {
public:
  explicit RunLock(const std::string& out_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

private:
  std::string path_;
  bool held_ = false;
};

// Number formatting shared by tables and CSV artifacts: tables use 3
// decimals, CSV keeps full precision.
std::string fmt3(double v);
std::string fmt6(double v);
std::string fmt_full(double v);
std::string fmt_count_brackets(long long n);  // "[1,000]"

class TextTable {
public:
  explicit TextTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  std::string render() const;  // two-space gutters, left-aligned

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Minimal CSV used for the CLI's own artifacts.
struct CsvDoc {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvDoc read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvDoc& doc);
std::string csv_escape(const std::string& field);

bool file_exists(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Human-readable tables rendered from the CLI's CSV artifacts, so a stored
// run directory and a live run produce identical text.
std::string render_bias_tables(const CsvDoc& bias);
std::string render_ranking_table(const CsvDoc& ranking);
std::string render_au_table(const CsvDoc& au);
std::string render_pairshift_table(const CsvDoc& pairshift);
std::string render_metrics_table(const CsvDoc& metrics);
const char* star_legend();

}  // namespace pfcli
