#include "wallbreak/sweep.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace wallbreak;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("wallbreak-sweep-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string &name) const { return (path_ / name).string(); }

private:
  fs::path path_;
};

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

SweepSpec small_spec(const std::string &out) {
  SweepSpec s;
  s.slopes = parse_slope_list("3,5/3,2");
  s.regions = RegionSelector::parse("all");
  s.bombs = {bomb_choice("single"), bomb_choice("wingedwedge:2")};
  s.cap = 3000;
  s.out = out;
  return s;
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

} // namespace

TEST(Sweep, SlopeLists) {
  auto s = parse_slope_list("3, 5/3,quad:1,1,2,1");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[2].str(), "quad:1,1,2,1");
  EXPECT_EQ(parse_slope_list("even:1..10").size(), 5u);
  EXPECT_EQ(parse_slope_list("odd:1..10").size(), 5u);
  auto r = parse_slope_list("3..3.1:1/20");
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[1].rational(), BigRational(61, 20));
  EXPECT_THROW(parse_slope_list("3..4"), ParseError);
  EXPECT_THROW(parse_slope_list("quad:1,2"), ParseError);
  EXPECT_THROW(parse_slope_list(""), ParseError);
}

TEST(Sweep, RegionSelectors) {
  EXPECT_TRUE(RegionSelector::parse("all").all);
  auto sel = RegionSelector::parse("0,3,center,1/3:1/7");
  ASSERT_EQ(sel.starts.size(), 4u);
  EXPECT_EQ(sel.starts[1].label(), "3");
  EXPECT_EQ(sel.starts[2].label(), "1/2:1/2");
  EXPECT_EQ(sel.starts[3].label(), "1/3:1/7");
  EXPECT_THROW(RegionSelector::parse("-1"), ParseError);
  EXPECT_THROW(RegionSelector::parse("1,,2"), ParseError);
}

TEST(Sweep, CsvRecordShape) {
  SweepRecord r;
  r.slope = "5/3";
  r.region = "2";
  r.bomb = "single";
  r.outcome = "tunnel";
  r.period = 6;
  r.disp1 = Displacement{1, 1};
  r.onset = 4;
  r.tunnel_slope = BandSlope{BigRational(1), false};
  r.total_collisions = 100;
  r.walls_erased = 100;
  r.bbox = IntBox{-1, -2, 3, 4};
  EXPECT_EQ(to_csv_line(r), "5/3,2,single,tunnel,6,1,1,,,4,1,1,100,100,-1,-2,3,4");
  r.tunnel_slope = BandSlope{0, true};
  r.bomb = "file:a,b";
  EXPECT_EQ(to_csv_line(r), "5/3,2,\"file:a,b\",tunnel,6,1,1,,,4,1,0,100,100,-1,-2,3,4");
  std::string header = kSweepCsvHeader;
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 17);
}

TEST(Sweep, SlopeThreeRegions) {
  TempDir tmp;
  SweepSpec s;
  s.slopes = parse_slope_list("3");
  s.regions = RegionSelector::parse("all");
  s.bombs = {bomb_choice("single")};
  s.cap = 10000;
  s.out = tmp.file("three.csv");
  Sweep sweep(s);
  auto p = sweep.run();
  EXPECT_TRUE(p.finished);
  auto rows = lines(slurp(s.out));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], kSweepCsvHeader);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].rfind("3," + std::to_string(i - 1) + ",single,tunnel,6,", 0), 0u) << rows[i];
  }
}

TEST(Sweep, WorkerCountDoesNotChangeOutput) {
  TempDir tmp;
  auto a = small_spec(tmp.file("a.csv"));
  auto b = small_spec(tmp.file("b.csv"));
  b.jobs = 3;
  b.checkpoint_interval = 2;
  Sweep(a).run();
  Sweep(b).run();
  EXPECT_EQ(slurp(a.out), slurp(b.out));
  EXPECT_EQ(lines(slurp(a.out)).size(), 1u + (4 + 8 + 3) * 2);
}

TEST(Sweep, InterruptAndResume) {
  TempDir tmp;
  auto whole = small_spec(tmp.file("whole.csv"));
  Sweep(whole).run();

  auto part = small_spec(tmp.file("part.csv"));
  part.max_runs = 7;
  auto p1 = Sweep(part).run();
  EXPECT_FALSE(p1.finished);
  EXPECT_EQ(p1.completed, 7u);
  EXPECT_FALSE(fs::exists(part.out));
  part.max_runs.reset();
  part.jobs = 2;
  auto p2 = Sweep(part).run(true);
  EXPECT_TRUE(p2.finished);
  EXPECT_EQ(p2.ran_now, 30u - 7u);
  EXPECT_EQ(slurp(part.out), slurp(whole.out));

  // a finished sweep resumes to the same file without running anything
  auto p3 = Sweep(part).run(true);
  EXPECT_EQ(p3.ran_now, 0u);
  EXPECT_EQ(slurp(part.out), slurp(whole.out));
}

TEST(Sweep, CheckpointForDifferentSpecIsRejected) {
  TempDir tmp;
  auto s = small_spec(tmp.file("x.csv"));
  s.max_runs = 3;
  Sweep(s).run();
  s.cap = 4000;
  EXPECT_THROW(Sweep(s).run(true), SweepError);
}

TEST(Sweep, CorruptCheckpointIsRejected) {
  TempDir tmp;
  auto s = small_spec(tmp.file("y.csv"));
  s.max_runs = 5;
  Sweep sweep(s);
  sweep.run();
  std::string ckpt = slurp(sweep.checkpoint_path().string());
  auto write = [&](const std::string &text) {
    std::ofstream(sweep.checkpoint_path(), std::ios::binary | std::ios::trunc) << text;
  };

  std::string tampered = ckpt;
  tampered[tampered.find("|") + 3] ^= 1;
  write(tampered);
  EXPECT_THROW(Sweep(s).run(true), SweepError);

  write(ckpt.substr(0, ckpt.find("#end")));
  EXPECT_THROW(Sweep(s).run(true), SweepError);

  write("garbage\n");
  EXPECT_THROW(Sweep(s).run(true), SweepError);

  write(ckpt);
  s.max_runs.reset();
  EXPECT_TRUE(Sweep(s).run(true).finished);
}

TEST(Sweep, RejectsBadSpecs) {
  auto s = small_spec("unused.csv");
  s.cap = 0;
  EXPECT_THROW(Sweep{s}, std::invalid_argument);
  s = small_spec("unused.csv");
  s.slopes = parse_slope_list("quad:1,1,2,1");
  EXPECT_THROW(Sweep{s}, std::invalid_argument);
  s = small_spec("/nonexistent-dir/out.csv");
  EXPECT_THROW(Sweep(s).run(), SweepError);
}

// The cap falls before the detector's first scheduled check.
TEST(Sweep, TunnelSeenAtShortCap) {
  TempDir tmp;
  SweepSpec s;
  s.slopes = parse_slope_list("3");
  s.regions = RegionSelector::parse("0");
  s.bombs = {bomb_choice("single")};
  s.cap = 100;
  s.out = tmp.file("short.csv");
  Sweep(s).run();
  auto rows = lines(slurp(s.out));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].rfind("3,0,single,tunnel,6,1,1,", 0), 0u) << rows[1];
}
