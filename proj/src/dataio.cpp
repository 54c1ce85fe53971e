#include "swat/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "swat/errors.hpp"

namespace swat {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::optional<double> parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name,
                         const std::filesystem::path& path) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw InputError(path.string() + ": missing column '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::int64_t> Dataset::targets() const {
  std::vector<std::int64_t> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.target);
  return out;
}

std::vector<double> Dataset::raw_targets() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.raw_target);
  return out;
}

CsvSchema preset_schema(const std::string& name) {
  CsvSchema s;
  if (name == "kuairec") {
    s.categorical_columns = {"user_id", "video_id"};
    s.target_column = "watch_time";
  } else if (name == "cikm") {
    s.id_column = "session_id";
    s.id_list_column = "items";
    s.target_column = "dwell_time";
  } else if (name == "simulate" || name.empty()) {
    s.id_column = "sample_id";
    s.categorical_columns = {"segment"};
    s.target_column = "watch_time";
    s.bucket_times_column = "bucket_times";
  } else {
    throw std::invalid_argument("unknown schema preset '" + name +
                                "' (expected kuairec, cikm or simulate)");
  }
  return s;
}

double preset_scale(const std::string& name) {
  if (name == "kuairec") return 50.0;
  if (name == "cikm") return 100.0;
  return 1.0;
}

std::optional<std::vector<std::string>> read_csv_record(std::istream& in) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  char ch = 0;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (!any) return std::nullopt;
  fields.push_back(std::move(field));
  return fields;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(sep, pos);
    auto token = trim(text.substr(pos, next == std::string::npos ? std::string::npos
                                                                 : next - pos));
    if (!token.empty()) out.push_back(std::move(token));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                 double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scaling constant c must be > 0");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");

  auto header = read_csv_record(in);
  if (!header) throw InputError(path.string() + ": empty file");
  for (auto& h : *header) h = trim(h);
  // Strip a UTF-8 byte order mark.
  if (!header->empty() && header->front().rfind("\xEF\xBB\xBF", 0) == 0) {
    header->front().erase(0, 3);
  }

  const auto target_col = column_index(*header, schema.target_column, path);
  std::optional<std::size_t> id_col, list_col, times_col;
  if (!schema.id_column.empty()) id_col = column_index(*header, schema.id_column, path);
  if (!schema.id_list_column.empty()) {
    list_col = column_index(*header, schema.id_list_column, path);
  }
  if (!schema.bucket_times_column.empty()) {
    // Optional: only simulator output carries per-bucket times.
    const auto it = std::find(header->begin(), header->end(), schema.bucket_times_column);
    if (it != header->end()) times_col = static_cast<std::size_t>(it - header->begin());
  }
  std::vector<std::size_t> cat_cols, num_cols;
  for (const auto& name : schema.categorical_columns) {
    cat_cols.push_back(column_index(*header, name, path));
  }
  for (const auto& name : schema.numeric_columns) {
    num_cols.push_back(column_index(*header, name, path));
  }

  Dataset data;
  data.c = c;
  data.provenance.source = path.string();
  while (auto record = read_csv_record(in)) {
    if (record->size() == 1 && trim(record->front()).empty()) continue;
    ++data.provenance.rows;
    if (record->size() != header->size()) {
      ++data.provenance.skipped;
      continue;
    }
    const auto& f = *record;
    const auto raw = parse_double(f[target_col]);
    if (!raw || *raw < 0.0) {
      ++data.provenance.skipped;
      continue;
    }
    Sample s;
    s.id = id_col ? trim(f[*id_col]) : std::to_string(data.provenance.rows);
    s.raw_target = *raw;
    s.target = std::llround(c * *raw);
    for (std::size_t k = 0; k < cat_cols.size(); ++k) {
      s.categorical_ids.push_back(schema.categorical_columns[k] + "=" +
                                  trim(f[cat_cols[k]]));
    }
    if (list_col) {
      for (auto& item : split_list(f[*list_col], schema.list_separator)) {
        s.categorical_ids.push_back(schema.id_list_column + "=" + item);
      }
    }
    bool ok = true;
    for (std::size_t col : num_cols) {
      const auto v = parse_double(f[col]);
      if (!v) {
        ok = false;
        break;
      }
      s.numeric.push_back(*v);
    }
    if (ok && times_col) {
      for (const auto& tok : split_list(f[*times_col], ';')) {
        const auto v = parse_double(tok);
        if (!v || *v < 0.0 || *v != std::floor(*v)) {
          ok = false;
          break;
        }
        s.bucket_times.push_back(static_cast<std::int64_t>(*v));
      }
    }
    if (!ok) {
      ++data.provenance.skipped;
      continue;
    }
    data.samples.push_back(std::move(s));
  }
  if (data.samples.empty()) {
    throw InputError(path.string() + ": no valid rows (" +
                     std::to_string(data.provenance.skipped) + " skipped)");
  }
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double ratio,
                                  std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split ratio must be in (0, 1)");
  }
  const std::size_t n = dataset.samples.size();
  if (n < 2) throw std::invalid_argument("split needs at least 2 samples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(n) + 1e-9));

  Dataset train, test;
  for (Dataset* d : {&train, &test}) {
    d->c = dataset.c;
    d->provenance = dataset.provenance;
  }
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).samples.push_back(dataset.samples[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

void write_predictions(const std::filesystem::path& path, const Dataset& data,
                       std::span<const double> predictions) {
  if (predictions.size() != data.samples.size()) {
    throw std::invalid_argument("write_predictions: size mismatch");
  }
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write");
  out.precision(17);
  out << "id,raw_target,prediction\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out << csv_escape(data.samples[i].id) << ',' << data.samples[i].raw_target
        << ',' << predictions[i] << '\n';
  }
}

KeyValueConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open config");
  KeyValueConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected key = value");
    }
    config[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return config;
}

CsvSchema schema_from_config(const KeyValueConfig& config, CsvSchema base) {
  if (const auto it = config.find("preset"); it != config.end()) {
    base = preset_schema(it->second);
  }
  for (const auto& [key, value] : config) {
    if (key == "id_column") {
      base.id_column = value;
    } else if (key == "categorical_columns") {
      base.categorical_columns = split_list(value, ',');
    } else if (key == "id_list_column") {
      base.id_list_column = value;
    } else if (key == "list_separator") {
      if (value.size() != 1) {
        throw std::invalid_argument("list_separator must be one character");
      }
      base.list_separator = value[0];
    } else if (key == "numeric_columns") {
      base.numeric_columns = split_list(value, ',');
    } else if (key == "target_column") {
      base.target_column = value;
    } else if (key == "bucket_times_column") {
      base.bucket_times_column = value;
    }
  }
  return base;
}

}  // namespace swat
