#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "pbmf/dataset.hpp"
#include "pbmf/error.hpp"
#include "support/synthetic.hpp"

using namespace pbmf;
using pbmf::testing::temp_path;
using pbmf::testing::write_text;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected pbmf::Error");
  return ErrorCode::kInvalidArgument;
}

std::string error_text(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

RatingsDataset toy10() {
  std::vector<Rating> r;
  for (Index k = 0; k < 10; ++k) r.push_back({k % 4, k % 5, 1.0 + k % 5});
  return RatingsDataset::from_triples(r, 4, 5);
}

}  // namespace

TEST_CASE("movielens: single line") {
  const auto path = temp_path("one.dat");
  write_text(path, "1::10::5::978300760\n");
  const auto d = load_movielens(path);
  CHECK(d.num_users() == 1);
  CHECK(d.num_items() == 1);
  CHECK(d.r_max() == 5.0);
  CHECK(d.size() == 1);
}

TEST_CASE("movielens: 20 lines over 4 users x 5 items") {
  std::ostringstream text;
  std::set<int> users, items;
  int max_rating = 0;
  for (int k = 0; k < 20; ++k) {
    const int u = 1 + k % 4;
    const int i = 100 + k % 5;
    const int r = 1 + (k * 3) % 4;
    text << u << "::" << i << "::" << r << "::" << 1000 + k << "\n";
    users.insert(u);
    items.insert(i);
    max_rating = std::max(max_rating, r);
  }
  // hand enumeration of the generated lines
  REQUIRE(users.size() == 4);
  REQUIRE(items.size() == 5);
  REQUIRE(max_rating == 4);

  const auto path = temp_path("twenty.dat");
  write_text(path, text.str());
  const auto d = load_movielens(path);
  CHECK(d.num_users() == 4);
  CHECK(d.num_items() == 5);
  CHECK(d.r_max() == 4.0);
  CHECK(d.r_min() == 1.0);
  CHECK(d.size() == 20);
}

TEST_CASE("movielens: dense ids follow first appearance") {
  const auto path = temp_path("order.dat");
  write_text(path, "7::3::4::1\n2::9::3::1\n7::9::2::1\n");
  const auto d = load_movielens(path);
  CHECK(d.users().id(0) == "7");
  CHECK(d.users().id(1) == "2");
  CHECK(d.items().id(0) == "3");
  CHECK(d.items().id(1) == "9");
  CHECK(d.ratings()[2] == Rating{0, 1, 2.0});
  CHECK(load_movielens(path) == d);
}

TEST_CASE("movielens: malformed lines are skipped and counted") {
  const auto path = temp_path("malformed.dat");
  write_text(path, "1::10::5::1\ngarbage\n\n2::11\n2::11::3::1\n");
  const auto d = load_movielens(path);
  CHECK(d.size() == 2);
  CHECK(d.stats().malformed_lines == 2);
}

TEST_CASE("movielens: error paths") {
  CHECK(code_of([] { load_movielens(temp_path("does_not_exist.dat")); }) == ErrorCode::kIo);

  const auto empty = temp_path("empty.dat");
  write_text(empty, "\n\nnot a rating line\n");
  CHECK(code_of([&] { load_movielens(empty); }) == ErrorCode::kEmptyDataset);

  const auto bad = temp_path("bad_rating.dat");
  write_text(bad, "1::10::5::1\n1::11::4::1\n2::10::five::1\n");
  CHECK(code_of([&] { load_movielens(bad); }) == ErrorCode::kParse);
  CHECK(error_text([&] { load_movielens(bad); }).find("line 3") != std::string::npos);

  const auto zero = temp_path("zero_rating.dat");
  write_text(zero, "1::10::0::1\n");
  CHECK(code_of([&] { load_movielens(zero); }) == ErrorCode::kParse);
}

TEST_CASE("movielens: bundled fixture has the full dataset's dimensions") {
  const auto d = load_movielens(PBMF_TEST_DATA_DIR "/ml1m_fixture.dat");
  CHECK(d.num_users() == 6040);
  CHECK(d.num_items() == 3706);
  CHECK(d.r_max() == 5.0);
}

TEST_CASE("csv: single row") {
  const auto path = temp_path("one.csv");
  write_text(path, "u1,i1,3\n");
  const auto d = load_csv(path, {});
  CHECK(d.num_users() == 1);
  CHECK(d.num_items() == 1);
  CHECK(d.r_max() == 3.0);
}

TEST_CASE("csv: duplicate pair keeps the last occurrence") {
  const auto path = temp_path("dup.csv");
  write_text(path, "u1,i1,3\nu2,i1,4\nu1,i1,5\nu2,i2,1\n");
  const auto d = load_csv(path, {});
  CHECK(d.size() == 3);
  CHECK(d.stats().duplicates == 1);
  bool found = false;
  for (const Rating& r : d.ratings()) {
    if (r.user == 0 && r.item == 0) {
      CHECK(r.value == 5.0);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("csv: custom columns, delimiter and header") {
  const auto path = temp_path("cols.tsv");
  write_text(path, "ctx\trating\titem\tuser\nx\t4\ta\tbob\ny\t2\tb\tann\n");
  const auto d = load_csv(path, {3, 2, 1, '\t', true});
  CHECK(d.size() == 2);
  CHECK(d.users().id(0) == "bob");
  CHECK(d.items().id(1) == "b");
  CHECK(d.r_max() == 4.0);
}

TEST_CASE("csv: missing column is a schema error") {
  const auto path = temp_path("short.csv");
  write_text(path, "u1,i1,3\nu2,i2\n");
  CHECK(code_of([&] { load_csv(path, {}); }) == ErrorCode::kSchema);
  CHECK(error_text([&] { load_csv(path, {}); }).find("line 2") != std::string::npos);
}

TEST_CASE("csv: bundled LDOS-CoMoDa fixture") {
  CsvOptions opts;
  opts.has_header = true;
  const auto d = load_csv(PBMF_TEST_DATA_DIR "/ldos_fixture.csv", opts);
  CHECK(d.num_users() == 121);
  CHECK(d.num_items() == 1232);
  CHECK(d.size() == 2296);
}

TEST_CASE("split: fraction is respected on large data") {
  const auto d = pbmf::testing::zipf_ratings({.users = 100, .items = 60, .ratings_per_user = 20});
  REQUIRE(d.size() >= 1000);
  const auto s = split(d, {0.2, 11, false});
  const double fraction = static_cast<double>(s.test.size()) / static_cast<double>(d.size());
  CHECK(fraction == doctest::Approx(0.2).epsilon(0.1));
  CHECK(s.train.size() + s.test.size() == d.size());
}

TEST_CASE("split: deterministic per seed") {
  const auto d = pbmf::testing::zipf_ratings({.users = 50, .items = 30, .ratings_per_user = 10});
  const auto a = split(d, {0.25, 3, true});
  const auto b = split(d, {0.25, 3, true});
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.dropped == b.dropped);
  const auto c = split(d, {0.25, 4, true});
  CHECK_FALSE(c.test == a.test);
}

TEST_CASE("split: golden membership for the 10-interaction toy set") {
  const auto d = toy10();
  const auto s = split(d, {0.3, 7, false});

  std::ifstream golden(PBMF_TEST_DATA_DIR "/split_golden.txt");
  REQUIRE(golden);
  std::vector<Rating> train, test;
  std::string line;
  while (std::getline(golden, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::size_t pos;
    Index u, i;
    double r;
    std::string side;
    row >> pos >> u >> i >> r >> side;
    (side == "test" ? test : train).push_back({u, i, r});
  }
  CHECK(std::vector<Rating>(s.test.ratings().begin(), s.test.ratings().end()) == test);
  CHECK(std::vector<Rating>(s.train.ratings().begin(), s.train.ratings().end()) == train);
}

TEST_CASE("split: counts, scale and index space are inherited") {
  // user 3 and item 4 only appear once each
  std::vector<Rating> r = {{0, 0, 2}, {0, 1, 3}, {1, 0, 4}, {1, 1, 2}, {2, 2, 3},
                           {2, 0, 1}, {0, 2, 2}, {1, 2, 3}, {3, 3, 5}, {2, 4, 2}};
  const auto d = RatingsDataset::from_triples(r, 4, 5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Split s;
    try {
      s = split(d, {0.4, seed, true});
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kSplit);
      continue;
    }
    CHECK(s.train.size() + s.test.size() + s.dropped == d.size());
    CHECK(s.train.r_max() == 5.0);
    CHECK(s.test.r_max() == 5.0);
    CHECK(s.train.num_users() == 4);
    CHECK(s.test.num_items() == 5);
    std::set<Index> train_users, train_items;
    for (const Rating& x : s.train.ratings()) {
      train_users.insert(x.user);
      train_items.insert(x.item);
    }
    for (const Rating& x : s.test.ratings()) {
      CHECK(train_users.count(x.user) == 1);
      CHECK(train_items.count(x.item) == 1);
    }
  }
}

TEST_CASE("split: r_max stays global when the held-out max is smaller") {
  std::vector<Rating> r = {{0, 0, 5}, {0, 1, 1}, {1, 0, 2}, {1, 1, 2}};
  const auto d = RatingsDataset::from_triples(r, 2, 2);
  const auto s = split(d, {0.5, 1, false});
  CHECK(s.train.r_max() == 5.0);
  CHECK(s.test.r_max() == 5.0);
}

TEST_CASE("split: error paths") {
  const auto d = toy10();
  CHECK(code_of([&] { split(d, {0.0, 1, false}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { split(d, {1.0, 1, false}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { split(d, {0.01, 1, false}); }) == ErrorCode::kSplit);
  CHECK(code_of([&] { split(d, {0.99, 1, false}); }) == ErrorCode::kSplit);
  CHECK(code_of([&] { split(RatingsDataset{}, {0.2, 1, false}); }) == ErrorCode::kEmptyDataset);
}
