#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "swat/dataio.hpp"
#include "swat/errors.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& body) {
  const auto dir = fs::temp_directory_path() / "swat_dataio_test";
  fs::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

swat::Dataset numbered(std::size_t n) {
  swat::Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    swat::Sample s;
    s.id = std::to_string(i);
    s.target = static_cast<std::int64_t>(i);
    d.samples.push_back(s);
  }
  return d;
}

}  // namespace

TEST(DataIo, CsvRecordQuoting) {
  std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\nlast,,x\n");
  EXPECT_EQ(*swat::read_csv_record(in), (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ(*swat::read_csv_record(in), (std::vector<std::string>{"last", "", "x"}));
  EXPECT_FALSE(swat::read_csv_record(in).has_value());
}

TEST(DataIo, LoadScalesAndSkips) {
  const auto p = temp_file("kr.csv",
                           "user_id,video_id,watch_time\n"
                           "u1,v1,3.4\n"
                           "u2,v2,-1\n"
                           "u3,v3,abc\n"
                           "u4,v4,0.01\n");
  const auto d = swat::load_csv(p, swat::preset_schema("kuairec"), 50);
  ASSERT_EQ(d.samples.size(), 2u);
  EXPECT_EQ(d.samples[0].target, 170);
  EXPECT_DOUBLE_EQ(d.samples[0].raw_target, 3.4);
  EXPECT_EQ(d.samples[1].target, 1);
  EXPECT_EQ(d.provenance.rows, 4u);
  EXPECT_EQ(d.provenance.skipped, 2u);
  EXPECT_EQ(d.samples[0].categorical_ids,
            (std::vector<std::string>{"user_id=u1", "video_id=v1"}));
}

TEST(DataIo, IdentityScaling) {
  const auto p = temp_file("sim.csv",
                           "sample_id,segment,watch_time,bucket_times\n"
                           "0,a,7,5;2;0\n"
                           "1,b,0,0;0;0\n");
  const auto d = swat::load_csv(p, swat::preset_schema("simulate"), 1);
  ASSERT_EQ(d.samples.size(), 2u);
  EXPECT_EQ(d.samples[0].target, 7);
  EXPECT_EQ(d.samples[0].bucket_times, (std::vector<std::int64_t>{5, 2, 0}));
  EXPECT_EQ(d.samples[1].id, "1");
}

TEST(DataIo, CikmItemList) {
  const auto p = temp_file("cikm.csv",
                           "session_id,items,dwell_time\n"
                           "s1,\"i1;i2;i3\",0.52\n");
  const auto d = swat::load_csv(p, swat::preset_schema("cikm"), swat::preset_scale("cikm"));
  ASSERT_EQ(d.samples.size(), 1u);
  EXPECT_EQ(d.samples[0].target, 52);
  EXPECT_EQ(d.samples[0].categorical_ids.size(), 3u);
  EXPECT_DOUBLE_EQ(d.c, 100.0);
}

TEST(DataIo, PresetScales) {
  EXPECT_DOUBLE_EQ(swat::preset_scale("kuairec"), 50.0);
  EXPECT_DOUBLE_EQ(swat::preset_scale("cikm"), 100.0);
  EXPECT_DOUBLE_EQ(swat::preset_scale(""), 1.0);
}

TEST(DataIo, LoadErrors) {
  EXPECT_THROW(swat::load_csv("/nonexistent/x.csv", swat::preset_schema(""), 1), swat::InputError);
  const auto missing = temp_file("missing.csv", "sample_id,watch_time\n1,2\n");
  EXPECT_THROW(swat::load_csv(missing, swat::preset_schema("kuairec"), 1), swat::InputError);
  const auto empty = temp_file("allbad.csv", "user_id,video_id,watch_time\nu,v,-3\n");
  EXPECT_THROW(swat::load_csv(empty, swat::preset_schema("kuairec"), 1), swat::InputError);
  const auto ok = temp_file("ok.csv", "user_id,video_id,watch_time\nu,v,3\n");
  EXPECT_THROW(swat::load_csv(ok, swat::preset_schema("kuairec"), 0), std::invalid_argument);
}

TEST(DataIo, SplitSizesAndPartition) {
  const auto d = numbered(10);
  const auto [tr, te] = swat::split(d, 0.8, 1);
  EXPECT_EQ(tr.samples.size(), 8u);
  EXPECT_EQ(te.samples.size(), 2u);
  std::set<std::string> ids;
  for (const auto& s : tr.samples) ids.insert(s.id);
  for (const auto& s : te.samples) ids.insert(s.id);
  EXPECT_EQ(ids.size(), 10u);

  const auto [a, b] = swat::split(numbered(2), 0.5, 3);
  EXPECT_EQ(a.samples.size(), 1u);
  EXPECT_EQ(b.samples.size(), 1u);
}

TEST(DataIo, SplitIsSeeded) {
  const auto d = numbered(100);
  const auto x = swat::split(d, 0.7, 5).first;
  const auto y = swat::split(d, 0.7, 5).first;
  ASSERT_EQ(x.samples.size(), y.samples.size());
  for (std::size_t i = 0; i < x.samples.size(); ++i) EXPECT_EQ(x.samples[i].id, y.samples[i].id);
}

TEST(DataIo, SplitErrors) {
  EXPECT_THROW(swat::split(numbered(1), 0.5, 0), std::invalid_argument);
  EXPECT_THROW(swat::split(numbered(10), 1.0, 0), std::invalid_argument);
  EXPECT_THROW(swat::split(numbered(10), 0.0, 0), std::invalid_argument);
}

TEST(DataIo, Unscale) {
  EXPECT_DOUBLE_EQ(swat::unscale(170, 50), 3.4);
  EXPECT_DOUBLE_EQ(swat::unscale(0, 7), 0.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1000);
  for (int i = 0; i < 1000; ++i) {
    const double raw = u(rng);
    for (double c : {1.0, 50.0, 100.0}) {
      const auto target = std::llround(c * raw);
      EXPECT_LE(std::abs(swat::unscale(static_cast<double>(target), c) - raw), 0.5 / c + 1e-12);
    }
  }
}

TEST(DataIo, WritePredictions) {
  auto d = numbered(2);
  d.samples[0].raw_target = 1.5;
  d.samples[1].raw_target = 2;
  const auto p = fs::temp_directory_path() / "swat_dataio_test" / "preds.csv";
  const std::vector<double> preds{1.25, 3};
  swat::write_predictions(p, d, preds);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "id,raw_target,prediction");
  const std::vector<double> wrong{1};
  EXPECT_THROW(swat::write_predictions(p, d, wrong), std::invalid_argument);
}

TEST(DataIo, ConfigDrivenSchema) {
  const auto cfg = temp_file("data.cfg",
                             "# custom layout\n"
                             "target_column = secs\n"
                             "categorical_columns = a, b\n"
                             "c = 10\n");
  const auto kv = swat::load_config(cfg);
  EXPECT_EQ(kv.at("c"), "10");
  const auto schema = swat::schema_from_config(kv, swat::preset_schema(""));
  EXPECT_EQ(schema.target_column, "secs");
  EXPECT_EQ(schema.categorical_columns, (std::vector<std::string>{"a", "b"}));
}
