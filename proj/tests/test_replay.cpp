#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <deque>
#include <filesystem>

#include "replay.hpp"
#include "rng.hpp"

using namespace erc;

static Transition make_t(double tag) {
  Transition t;
  t.s = {tag, tag};
  t.a = {tag};
  t.s_next = {tag + 0.5, tag + 0.5};
  t.r = tag;
  t.done = false;
  t.log_b = -tag;
  return t;
}

TEST_CASE("fifo eviction basics") {
  ReplayBuffer buf(3, 2, 1);
  for (int i = 1; i <= 4; ++i) buf.push(make_t(i));
  CHECK(buf.size() == 3);
  CHECK(buf.transition(0).r == 2.0);
  CHECK(buf.transition(1).r == 3.0);
  CHECK(buf.transition(2).r == 4.0);

  ReplayBuffer buf2(10, 2, 1);
  for (int i = 0; i < 7; ++i) buf2.push(make_t(i));
  CHECK(buf2.size() == 7);
}

TEST_CASE("eviction order matches a reference deque over random pushes") {
  ReplayBuffer buf(37, 2, 1);
  std::deque<double> ref;
  Rng r(99, 1);
  for (int i = 0; i < 10000; ++i) {
    const double tag = r.uniform(-5, 5);
    buf.push(make_t(tag));
    ref.push_back(tag);
    if (ref.size() > 37) ref.pop_front();
    if (i % 577 == 0) {
      REQUIRE(buf.size() == ref.size());
      for (std::size_t k = 0; k < ref.size(); ++k)
        REQUIRE(buf.transition(k).r == ref[k]);
    }
  }
  for (std::size_t k = 0; k < ref.size(); ++k)
    CHECK(buf.transition(k).r == ref[k]);
}

TEST_CASE("push rejects bad transitions") {
  ReplayBuffer buf(4, 2, 1);
  Transition t = make_t(1);
  t.r = std::nan("");
  CHECK_THROWS_AS(buf.push(t), std::invalid_argument);
  t = make_t(1);
  t.a = {1.0, 2.0};
  CHECK_THROWS_AS(buf.push(t), std::invalid_argument);
}

TEST_CASE("uniform sampling: singleton, determinism, chi-square") {
  ReplayBuffer buf(8, 2, 1);
  buf.push(make_t(7));
  Rng r(1, RngStream::buffer);
  Batch b;
  buf.sample_uniform(5, r, b);
  for (std::size_t i = 0; i < 5; ++i) CHECK(b.r[i] == 7.0);

  ReplayBuffer empty(8, 2, 1);
  Rng r2(1, 3);
  Batch tmp;
  CHECK_THROWS_AS(empty.sample_uniform(1, r2, tmp), std::invalid_argument);

  ReplayBuffer big(100, 2, 1);
  for (int i = 0; i < 100; ++i) big.push(make_t(i));
  Rng ra(4, 3), rb(4, 3);
  Batch ba, bb;
  big.sample_uniform(64, ra, ba);
  big.sample_uniform(64, rb, bb);
  CHECK(ba.r == bb.r);

  // chi-square goodness of fit over 1e6 draws on 100 cells,
  // reject only beyond the 99.9th percentile (147.4... ~= 148.3)
  std::vector<long> counts(100, 0);
  Rng rc(12345, 3);
  const long n = 1000000;
  Batch bc;
  for (int rep = 0; rep < 1000; ++rep) {
    big.sample_uniform(1000, rc, bc);
    for (std::size_t i = 0; i < 1000; ++i)
      counts[static_cast<std::size_t>(bc.r[i])]++;
  }
  const double expected = static_cast<double>(n) / 100.0;
  double chi2 = 0.0;
  for (long c : counts) {
    const double d = c - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < 148.3);  // chi2_{0.999, df=99}
}

TEST_CASE("replay schedule") {
  CHECK(replay_schedule(102400) == 200);
  CHECK(replay_schedule(100) == 0);
  CHECK(replay_schedule(512) == 1);
  CHECK(replay_schedule(255) == 0);
  CHECK(replay_schedule(256) == 1);  // warmup passed, floor of one batch

  for (std::size_t count = 512; count < 40000; count += 777) {
    const std::size_t nb = replay_schedule(count);
    CHECK(nb * 256 <= count / 2 + 256);  // one batch of slack
    CHECK(nb >= 1);
  }
}

TEST_CASE("buffer dump writes a parseable file") {
  ReplayBuffer buf(5, 2, 1);
  for (int i = 0; i < 3; ++i) buf.push(make_t(i));
  const auto path = std::filesystem::temp_directory_path() / "erc_buf.bin";
  buf.dump(path.string());
  CHECK(std::filesystem::file_size(path) ==
        8 + 8 * 4 + 3 * (2 + 1 + 2 + 1 + 1 + 1) * 8);
  std::filesystem::remove(path);
}
