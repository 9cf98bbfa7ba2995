#include "cli_support.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pfcli {

// ---------------------------------------------------------------- sha256

namespace {

struct Sha256 {
  uint32_t state[8];
  uint64_t bitlen = 0;
  uint8_t buffer[64];
  size_t buflen = 0;

  static constexpr uint32_t k[64] = {
      0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
      0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
      0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
      0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
      0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
      0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
      0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
      0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
      0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
      0xc67178f2};

  Sha256() {
    state[0] = 0x6a09e667;
    state[1] = 0xbb67ae85;
    state[2] = 0x3c6ef372;
    state[3] = 0xa54ff53a;
    state[4] = 0x510e527f;
    state[5] = 0x9b05688c;
    state[6] = 0x1f83d9ab;
    state[7] = 0x5be0cd19;
  }

  static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

  void transform(const uint8_t* data) {
    uint32_t m[64];
    for (int i = 0; i < 16; ++i)
      m[i] = (uint32_t(data[i * 4]) << 24) | (uint32_t(data[i * 4 + 1]) << 16) |
             (uint32_t(data[i * 4 + 2]) << 8) | uint32_t(data[i * 4 + 3]);
    for (int i = 16; i < 64; ++i) {
      uint32_t s0 = rotr(m[i - 15], 7) ^ rotr(m[i - 15], 18) ^ (m[i - 15] >> 3);
      uint32_t s1 = rotr(m[i - 2], 17) ^ rotr(m[i - 2], 19) ^ (m[i - 2] >> 10);
      m[i] = m[i - 16] + s0 + m[i - 7] + s1;
    }
    uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
    uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
    for (int i = 0; i < 64; ++i) {
      uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      uint32_t ch = (e & f) ^ (~e & g);
      uint32_t t1 = h + s1 + ch + k[i] + m[i];
      uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      uint32_t t2 = s0 + maj;
      h = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    state[0] += a;
    state[1] += b;
    state[2] += c;
    state[3] += d;
    state[4] += e;
    state[5] += f;
    state[6] += g;
    state[7] += h;
  }

  void update(const uint8_t* data, size_t len) {
    for (size_t i = 0; i < len; ++i) {
      buffer[buflen++] = data[i];
      if (buflen == 64) {
        transform(buffer);
        bitlen += 512;
        buflen = 0;
      }
    }
  }

  void finish(uint8_t out[32]) {
    bitlen += buflen * 8;
    buffer[buflen++] = 0x80;
    if (buflen > 56) {
      while (buflen < 64) buffer[buflen++] = 0;
      transform(buffer);
      buflen = 0;
    }
    while (buflen < 56) buffer[buflen++] = 0;
    for (int i = 7; i >= 0; --i) buffer[buflen++] = uint8_t(bitlen >> (i * 8));
    transform(buffer);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 4; ++j) out[i * 4 + j] = uint8_t(state[i] >> (24 - j * 8));
  }
};

std::string to_hex(const uint8_t* bytes, size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (size_t i = 0; i < n; ++i) {
    out += digits[bytes[i] >> 4];
    out += digits[bytes[i] & 0xf];
  }
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size());
  uint8_t digest[32];
  h.finish(digest);
  return to_hex(digest, 32);
}

std::string sha256_file_hex(const std::string& path) { return sha256_hex(read_file(path)); }

// ---------------------------------------------------------------- status

std::string status_category(pf_status status) {
  switch (status) {
    case PF_OK: return "ok";
    case PF_ERR_ARGUMENT: return "usage";
    case PF_ERR_IO:
    case PF_ERR_SCHEMA:
    case PF_ERR_INVARIANT:
    case PF_ERR_STATE: return "data";
    case PF_ERR_NUMERIC: return "numeric";
    case PF_ERR_INTERNAL: break;
  }
  return "internal";
}

int status_exit_code(pf_status status) {
  switch (status) {
    case PF_OK: return 0;
    case PF_ERR_ARGUMENT: return 2;
    case PF_ERR_NUMERIC: return 4;
    default: return 3;
  }
}

std::string error_json(const std::string& category, const std::string& message) {
  nlohmann::ordered_json j;
  j["category"] = category;
  j["message"] = message;
  return j.dump();
}

// ---------------------------------------------------------------- manifest

void RunManifest::add_config(const std::string& key, const std::string& value) {
  config.emplace_back(key, value);
}
void RunManifest::add_config(const std::string& key, double value) {
  config.emplace_back(key, fmt_full(value));
}
void RunManifest::add_config(const std::string& key, long long value) {
  config.emplace_back(key, std::to_string(value));
}

void RunManifest::write(const std::string& out_dir) const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["tool_version"] = tool_version;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config) cfg[key] = value;
  j["config"] = std::move(cfg);
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& path : input_files) {
    nlohmann::ordered_json e;
    e["path"] = path;
    e["sha256"] = file_exists(path) ? sha256_file_hex(path) : "";
    inputs.push_back(std::move(e));
  }
  j["inputs"] = std::move(inputs);
  j["seeds"] = seeds;
  j["outputs"] = outputs;
  j["started_at"] = started_at;
  j["wall_seconds"] = wall_seconds;
  j["status"] = status;
  if (!error_category.empty()) {
    j["error_category"] = error_category;
    j["error_message"] = error_message;
  }
  std::filesystem::create_directories(out_dir);
  write_file((std::filesystem::path(out_dir) / "manifest.json").string(), j.dump(1) + "\n");
}

std::string now_iso8601_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------- lock

RunLock::RunLock(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  path_ = (std::filesystem::path(out_dir) / ".painfair.lock").string();
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0)
    throw std::runtime_error("output directory is locked by another run (" + path_ +
                             " exists); remove the lockfile if that run is gone");
  ::close(fd);
  held_ = true;
}

RunLock::~RunLock() {
  if (held_) ::unlink(path_.c_str());
}

// ---------------------------------------------------------------- formatting

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_count_brackets(long long n) {
  std::string digits = std::to_string(n);
  std::string grouped;
  int count = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (count && count % 3 == 0 && *it != '-') grouped += ',';
    grouped += *it;
    ++count;
  }
  std::reverse(grouped.begin(), grouped.end());
  return "[" + grouped + "]";
}

TextTable::TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

void TextTable::add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

std::string TextTable::render() const {
  std::vector<size_t> width(header_.size(), 0);
  for (size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
  for (const auto& row : rows_)
    for (size_t c = 0; c < row.size() && c < width.size(); ++c)
      width[c] = std::max(width[c], row[c].size());

  auto emit = [&](const std::vector<std::string>& row, std::string& out) {
    for (size_t c = 0; c < width.size(); ++c) {
      std::string cell = c < row.size() ? row[c] : "";
      out += cell;
      if (c + 1 < width.size()) out += std::string(width[c] - cell.size() + 2, ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  };

  std::string out;
  emit(header_, out);
  for (const auto& row : rows_) emit(row, out);
  return out;
}

// ---------------------------------------------------------------- csv/files

namespace {

std::vector<std::vector<std::string>> parse_csv_text(const std::string& text,
                                                     const std::string& origin) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      row_started = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
      row_started = true;
    } else if (c == '\r') {
    } else if (c == '\n') {
      if (row_started || !field.empty() || !fields.empty()) {
        fields.push_back(field);
        field.clear();
        rows.push_back(fields);
        fields.clear();
        row_started = false;
      }
    } else {
      field += c;
      row_started = true;
    }
  }
  if (in_quotes) throw std::runtime_error(origin + ": unterminated quoted field");
  if (row_started || !field.empty() || !fields.empty()) {
    fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

CsvDoc read_csv(const std::string& path) {
  auto rows = parse_csv_text(read_file(path), path);
  if (rows.empty()) throw std::runtime_error(path + ": missing header row");
  CsvDoc doc;
  doc.header = rows.front();
  doc.rows.assign(rows.begin() + 1, rows.end());
  return doc;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const std::string& path, const CsvDoc& doc) {
  std::string text;
  auto emit = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) text += ',';
      text += csv_escape(row[i]);
    }
    text += '\n';
  };
  emit(doc.header);
  for (const auto& row : doc.rows) emit(row);
  write_file(path, text);
}

bool file_exists(const std::string& path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// ---------------------------------------------------------------- renderers

namespace {

size_t column(const CsvDoc& doc, const std::string& name) {
  for (size_t i = 0; i < doc.header.size(); ++i)
    if (doc.header[i] == name) return i;
  throw std::runtime_error("artifact misses column '" + name + "'");
}

double cell_d(const std::vector<std::string>& row, size_t col) { return std::stod(row.at(col)); }

long long cell_n(const std::vector<std::string>& row, size_t col) {
  return std::stoll(row.at(col));
}

std::string fmt_pct2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

std::string mean_cell(double mean, long long n) { return fmt3(mean) + " " + fmt_count_brackets(n); }

}  // namespace

const char* star_legend() { return "* p < 0.1; ** p < 0.05; *** p < 0.01."; }

std::string render_bias_tables(const CsvDoc& bias) {
  size_t c_attr = column(bias, "attribute");
  size_t c_sample = column(bias, "sample");
  size_t c_paired = column(bias, "paired");
  size_t c_mean_a = column(bias, "mean_a");
  size_t c_n_a = column(bias, "n_a");
  size_t c_mean_b = column(bias, "mean_b");
  size_t c_n_b = column(bias, "n_b");
  size_t c_diff = column(bias, "diff");
  size_t c_diff_se = column(bias, "diff_se");
  size_t c_p = column(bias, "p_value");
  size_t c_stars = column(bias, "stars");
  size_t c_pct = column(bias, "pct_bias");
  (void)c_p;

  std::string out;
  for (const std::string& attr : {std::string("race"), std::string("age")}) {
    bool paired = false;
    TextTable table({"Sample", attr == "race" ? "PSPI for Black" : "PSPI for Senior",
                     attr == "race" ? "PSPI for White" : "PSPI for Young", "Difference",
                     "Pct bias"});
    size_t n_rows = 0;
    for (const auto& row : bias.rows) {
      if (row.at(c_attr) != attr) continue;
      ++n_rows;
      paired = row.at(c_paired) == "1";
      std::string diff = fmt3(cell_d(row, c_diff)) + row.at(c_stars) + " (" +
                         fmt3(cell_d(row, c_diff_se)) + ")";
      std::string pct = row.at(c_pct).empty() ? "-" : fmt_pct2(cell_d(row, c_pct));
      table.add_row({row.at(c_sample), mean_cell(cell_d(row, c_mean_a), cell_n(row, c_n_a)),
                     mean_cell(cell_d(row, c_mean_b), cell_n(row, c_n_b)), diff, pct});
    }
    if (n_rows == 0) continue;
    out += attr == "race" ? "Racial bias in PSPI scores" : "Age bias in PSPI scores";
    if (paired) out += " (paired by subject)";
    out += "\n";
    out += table.render();
    out += star_legend();
    out += "\n\n";
  }
  return out;
}

std::string render_ranking_table(const CsvDoc& ranking) {
  size_t c_rank = column(ranking, "rank");
  size_t c_group = column(ranking, "group");
  size_t c_mean = column(ranking, "mean_pspi");
  size_t c_n = column(ranking, "n");
  size_t c_tied = column(ranking, "tied");

  bool any_tie = false;
  TextTable table({"Rank", "Group", "Mean PSPI", "N"});
  for (const auto& row : ranking.rows) {
    table.add_row({row.at(c_rank), row.at(c_group), fmt3(cell_d(row, c_mean)),
                   fmt_count_brackets(cell_n(row, c_n))});
    if (row.at(c_tied) == "1") any_tie = true;
  }
  std::string out = "PSPI ranking by race and age band\n" + table.render();
  if (any_tie) out += "(exact ties present; tied groups keep the fixed cell order)\n";
  out += "\n";
  return out;
}

std::string render_au_table(const CsvDoc& au) {
  size_t c_attr = column(au, "attribute");
  size_t c_au = column(au, "au");
  size_t c_t = column(au, "t_stat");
  size_t c_p = column(au, "p_value");
  size_t c_testable = column(au, "testable");

  std::string out;
  for (const std::string& attr : {std::string("race"), std::string("age")}) {
    TextTable table({"AU", "t stat", "p value", ""});
    size_t n_rows = 0;
    for (const auto& row : au.rows) {
      if (row.at(c_attr) != attr) continue;
      ++n_rows;
      if (row.at(c_testable) == "1") {
        double p = cell_d(row, c_p);
        const char* stars = p < 0.01 ? "***" : (p < 0.05 ? "**" : (p < 0.1 ? "*" : ""));
        table.add_row({row.at(c_au), fmt3(cell_d(row, c_t)), fmt3(p), stars});
      } else {
        table.add_row({row.at(c_au), "-", "-", "degenerate"});
      }
    }
    if (n_rows == 0) continue;
    out += attr == "race" ? "AU-level bias tests by race (t > 0: Black scored higher)\n"
                          : "AU-level bias tests by age (t > 0: Senior scored higher)\n";
    out += table.render();
    out += star_legend();
    out += "\n\n";
  }
  return out;
}

std::string render_pairshift_table(const CsvDoc& pairshift) {
  size_t c_type = column(pairshift, "row_type");
  size_t c_a = column(pairshift, "condition_a");
  size_t c_b = column(pairshift, "condition_b");
  size_t c_mean = column(pairshift, "mean_distance");
  size_t c_n = column(pairshift, "n");
  size_t c_t = column(pairshift, "t_stat");
  size_t c_p = column(pairshift, "p_value");
  size_t c_sig = column(pairshift, "significant");
  size_t c_testable = column(pairshift, "testable");
  size_t c_alpha = column(pairshift, "alpha");

  std::string alpha;
  TextTable means({"Condition", "Mean landmark distance vs original", "Groups"});
  TextTable tests({"Conditions", "t stat", "p value", "Verdict"});
  bool any_significant = false;
  bool degenerate = false;
  for (const auto& row : pairshift.rows) {
    alpha = row.at(c_alpha);
    if (row.at(c_type) == "mean") {
      means.add_row({row.at(c_a), fmt6(cell_d(row, c_mean)),
                     fmt_count_brackets(cell_n(row, c_n))});
    } else if (row.at(c_type) == "test") {
      std::string verdict;
      if (row.at(c_testable) != "1") {
        verdict = "untestable (degenerate distances)";
        degenerate = true;
        tests.add_row({row.at(c_a) + " vs " + row.at(c_b), "-", "-", verdict});
      } else {
        bool sig = row.at(c_sig) == "1";
        if (sig) any_significant = true;
        verdict = sig ? "SIGNIFICANT" : "not significant";
        tests.add_row({row.at(c_a) + " vs " + row.at(c_b), fmt3(cell_d(row, c_t)),
                       fmt3(cell_d(row, c_p)), verdict});
      }
    }
  }
  std::string out = "Counterfactual pair validation (alpha = " + alpha + ")\n";
  out += means.render();
  out += "\n";
  out += tests.render();
  out += any_significant
             ? "Landmark shift detected: at least one condition differs significantly.\n"
             : "No evidence of landmark shift between conditions.\n";
  if (degenerate)
    out += "Warning: degenerate distances made at least one pair untestable.\n";
  out += "\n";
  return out;
}

std::string render_metrics_table(const CsvDoc& metrics) {
  size_t c_cond = column(metrics, "condition");
  size_t c_fold = column(metrics, "fold");
  size_t c_mse = column(metrics, "mse");
  size_t c_rmse = column(metrics, "rmse");
  size_t c_if_raw = column(metrics, "if_raw");
  size_t c_if_pct = column(metrics, "if_pct");

  TextTable table({"Condition", "Fold", "Test MSE", "Test RMSE", "IF raw", "IF"});
  for (const auto& row : metrics.rows) {
    table.add_row({row.at(c_cond), row.at(c_fold), fmt3(cell_d(row, c_mse)),
                   fmt3(cell_d(row, c_rmse)), fmt3(cell_d(row, c_if_raw)),
                   fmt_pct2(cell_d(row, c_if_pct))});
  }
  return "Pain model correction metrics (subject-level folds)\n" + table.render() + "\n";
}

}  // namespace pfcli
