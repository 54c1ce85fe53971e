#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace swat {

struct Sample {
  std::string id;
  // Tokens are qualified by their column, e.g. "user_id=42".
  std::vector<std::string> categorical_ids;
  std::vector<double> numeric;
  double raw_target = 0.0;
  std::int64_t target = 0;  // round(c * raw_target)
  // Logged per-bucket watch times, when the source provides them.
  std::vector<std::int64_t> bucket_times;
};

struct Provenance {
  std::string source;
  std::size_t rows = 0;     // data rows read
  std::size_t skipped = 0;  // rows rejected (bad or negative target, bad shape)
};

struct Dataset {
  std::vector<Sample> samples;
  double c = 1.0;
  Provenance provenance;

  std::vector<std::int64_t> targets() const;
  std::vector<double> raw_targets() const;
};

// Column mapping for a CSV source. Empty names are unused.
struct CsvSchema {
  std::string id_column;  // empty: row number is used
  std::vector<std::string> categorical_columns;
  std::string id_list_column;  // one column holding a list of item ids
  char list_separator = ';';
  std::vector<std::string> numeric_columns;
  std::string target_column = "watch_time";
  std::string bucket_times_column;  // ';'-separated integers
};

// Named layouts: "kuairec", "cikm", "simulate".
CsvSchema preset_schema(const std::string& name);
// Default scaling constant for a preset: 50, 100, else 1.
double preset_scale(const std::string& name);

// Splits one CSV record. Quoted fields may contain commas, doubled quotes and
// newlines. Returns std::nullopt at end of input.
std::optional<std::vector<std::string>> read_csv_record(std::istream& in);

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                 double c);

// Seeded uniform shuffle; the first floor(ratio * n) samples go to train.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double ratio,
                                  std::uint64_t seed);

inline double unscale(double prediction, double c) { return prediction / c; }

void write_predictions(const std::filesystem::path& path, const Dataset& data,
                       std::span<const double> predictions);

// Flat "key = value" file; '#' starts a comment.
using KeyValueConfig = std::map<std::string, std::string>;
KeyValueConfig load_config(const std::filesystem::path& path);

// Applies config keys (preset, id_column, categorical_columns,
// id_list_column, list_separator, numeric_columns, target_column,
// bucket_times_column) on top of `base`.
CsvSchema schema_from_config(const KeyValueConfig& config, CsvSchema base);

std::vector<std::string> split_list(const std::string& text, char sep);

}  // namespace swat
