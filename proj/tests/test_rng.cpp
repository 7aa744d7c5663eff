#include <doctest.h>

#include <array>
#include <vector>

#include "gcsl/rng.hpp"

using gcsl::Rng;

TEST_CASE("same seed reproduces the same stream") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds differ") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
  CHECK(same == 0);
}

TEST_CASE("uniform01 in [0,1) and roughly uniform") {
  Rng r(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("uniform_int covers [0,n) evenly") {
  Rng r(42);
  std::array<int, 9> hist{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) hist[r.uniform_int(9)]++;
  for (int c : hist) CHECK(std::abs(c / static_cast<double>(n) - 1.0 / 9) < 0.005);
  CHECK_THROWS(r.uniform_int(0));
}

TEST_CASE("categorical respects the distribution") {
  Rng r(5);
  const std::vector<double> degenerate = {1.0, 0.0, 0.0};
  for (int i = 0; i < 100; ++i) CHECK(r.categorical(degenerate) == 0);

  const std::vector<double> p = {0.2, 0.5, 0.3};
  std::array<int, 3> hist{};
  for (int i = 0; i < 100000; ++i) hist[r.categorical(p)]++;
  for (int k = 0; k < 3; ++k) CHECK(hist[k] / 100000.0 == doctest::Approx(p[k]).epsilon(0.05));
}

TEST_CASE("child streams depend on label and index, not on parent consumption") {
  Rng parent(99);
  Rng c1 = parent.child("collect");
  // consume some of the parent...
  for (int i = 0; i < 17; ++i) parent.next_u64();
  Rng c2 = parent.child("collect");
  // ...children are still identical
  for (int i = 0; i < 32; ++i) CHECK(c1.next_u64() == c2.next_u64());

  CHECK(parent.child("collect").next_u64() != parent.child("train").next_u64());
  CHECK(parent.child("eval", 0).next_u64() != parent.child("eval", 1).next_u64());
}
