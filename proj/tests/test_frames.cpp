#include <doctest.h>

#include <numbers>

#include "grassdict/errors.hpp"
#include "grassdict/frames.hpp"
#include "support.hpp"

using namespace grassdict;

namespace {

Frame mercedes_benz() {
  Mat u(2, 3);
  for (int k = 0; k < 3; ++k) {
    const double a = std::numbers::pi / 2 + 2 * std::numbers::pi * k / 3;
    u(0, k) = std::cos(a);
    u(1, k) = std::sin(a);
  }
  return Frame(u, true);
}

Frame random_unit_frame(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng) {
  return Frame::unit(testing::gaussian(n, m, rng));
}

}  // namespace

TEST_CASE("analysis and synthesis examples") {
  const Frame basis(Mat::Identity(3, 3), true);
  Vec w(3);
  w << 1, -2, 3;
  CHECK(analysis(basis, w).isApprox(w));
  CHECK(analysis(basis, Vec::Zero(3)).isZero());
  Mat dup(2, 2);
  dup << 1, 1, 0, 0;
  Vec u(2);
  u << 1, 0;
  CHECK(analysis(Frame(dup, true), u).isApprox(Vec::Ones(2)));

  std::mt19937_64 rng(61);
  const Frame f = random_unit_frame(4, 6, rng);
  CHECK(synthesis(f, Vec::Unit(6, 2)).isApprox(f.elements().col(2)));
  CHECK(synthesis(f, Vec::Zero(6)).isZero());
  CHECK(synthesis(basis, analysis(basis, w)).isApprox(w));
  CHECK_THROWS_AS((void)analysis(f, Vec::Zero(3)), ShapeError);
  CHECK_THROWS_AS((void)synthesis(f, Vec::Zero(3)), ShapeError);
}

TEST_CASE("analysis and synthesis are adjoint") {
  std::mt19937_64 rng(62);
  for (int t = 0; t < 20; ++t) {
    const Frame f(testing::gaussian(5, 9, rng));
    const Vec w = testing::gaussian(5, 1, rng);
    const Vec c = testing::gaussian(9, 1, rng);
    CHECK(std::abs(analysis(f, w).dot(c) - w.dot(synthesis(f, c))) <= 1e-10);
  }
}

TEST_CASE("frame bounds examples") {
  const FrameBounds ortho = frame_operator_bounds(Frame(Mat::Identity(3, 3), true));
  CHECK(ortho.lower == doctest::Approx(1.0));
  CHECK(ortho.upper == doctest::Approx(1.0));
  CHECK(ortho.parseval());

  Mat twice(3, 6);
  twice << Mat::Identity(3, 3), Mat::Identity(3, 3);
  const FrameBounds b2 = frame_operator_bounds(Frame(twice, true));
  CHECK(b2.lower == doctest::Approx(2.0));
  CHECK(b2.upper == doctest::Approx(2.0));
  CHECK(b2.tight());
  CHECK_FALSE(b2.parseval());

  Mat e(2, 3);
  e << 1, 1, 0, 0, 0, 1;
  const FrameBounds b = frame_operator_bounds(Frame(e, true));
  CHECK(b.lower == doctest::Approx(1.0));
  CHECK(b.upper == doctest::Approx(2.0));
  CHECK_FALSE(b.tight());

  Mat flat(2, 2);
  flat << 1, 1, 0, 0;
  CHECK_THROWS_AS((void)frame_operator_bounds(Frame(flat, true)), ContractError);
}

TEST_CASE("rows of an orthogonal matrix form a Parseval frame") {
  std::mt19937_64 rng(63);
  const Mat q = testing::rotation(7, rng);
  const FrameBounds b = frame_operator_bounds(Frame(q.topRows(3)));
  CHECK(std::abs(b.lower - 1.0) <= 1e-9);
  CHECK(std::abs(b.upper - 1.0) <= 1e-9);
}

TEST_CASE("coherence examples") {
  CHECK(coherence(Frame(Mat::Identity(4, 4), true)) == doctest::Approx(0.0));
  Mat dup(2, 2);
  dup << 0.6, 0.6, 0.8, 0.8;
  CHECK(coherence(Frame(dup, true)) == doctest::Approx(1.0));
  CHECK(coherence(mercedes_benz()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(coherence(Frame(Mat::Identity(3, 3) * 2.0)) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)coherence(Frame(Mat::Identity(3, 1), true)), ContractError);
}

TEST_CASE("Welch bound examples") {
  CHECK(std::abs(welch_bound(5, 3) - 1.0 / std::sqrt(6.0)) <= 1e-12);
  CHECK(welch_bound(4, 4) == 0.0);
  CHECK(welch_bound(3, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS((void)welch_bound(2, 3), ContractError);
}

TEST_CASE("Welch inequality holds for random unit frames") {
  std::mt19937_64 rng(64);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 2 + t % 5;
    const Eigen::Index m = n + 1 + t % 7;
    const Frame f = random_unit_frame(n, m, rng);
    CHECK(coherence(f) >= welch_bound(m, n) - 1e-12);
  }
}

TEST_CASE("equiangular tight frame detection") {
  const EtfReport ortho = is_equiangular_tight(Frame(Mat::Identity(3, 3), true));
  CHECK(ortho.equiangular_tight);
  CHECK(ortho.coherence == doctest::Approx(0.0));

  const EtfReport mb = is_equiangular_tight(mercedes_benz());
  CHECK(mb.equiangular_tight);
  CHECK(mb.coherence == doctest::Approx(0.5));
  CHECK(mb.welch == doctest::Approx(0.5));
  CHECK(std::abs(mb.gap) <= 1e-12);
  CHECK(mb.size_admissible);

  std::mt19937_64 rng(65);
  const EtfReport rnd = is_equiangular_tight(random_unit_frame(3, 5, rng));
  CHECK_FALSE(rnd.equiangular_tight);
  CHECK(rnd.gap > 1e-9);
  CHECK_THROWS_AS((void)is_equiangular_tight(Frame(Mat::Identity(3, 3) * 2.0)), ContractError);
}

TEST_CASE("exact RIP constant examples") {
  for (Eigen::Index k = 1; k <= 3; ++k) CHECK(rip_constant_exact(Frame(Mat::Identity(4, 4), true), k) <= 1e-14);
  Mat dup(2, 3);
  dup << 1, 1, 0, 0, 0, 1;
  CHECK(rip_constant_exact(Frame(dup, true), 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)rip_constant_exact(Frame::unit(Mat::Ones(2, 60)), 30), ContractError);
}

TEST_CASE("RIP constant of order two equals the coherence") {
  std::mt19937_64 rng(66);
  for (int t = 0; t < 20; ++t) {
    const Frame f = random_unit_frame(8, 12, rng);
    CHECK(std::abs(rip_constant_exact(f, 2) - coherence(f)) <= 1e-10);
  }
}

TEST_CASE("Gershgorin bound dominates the exact RIP constant") {
  CHECK(rip_gershgorin_bound(mercedes_benz(), 1) == 0.0);
  CHECK(rip_gershgorin_bound(Frame(Mat::Identity(3, 3), true), 3) == 0.0);
  CHECK(rip_gershgorin_bound(mercedes_benz(), 2) == doctest::Approx(0.5));
  std::mt19937_64 rng(67);
  for (int t = 0; t < 20; ++t) {
    const Frame f = random_unit_frame(6, 10, rng);
    for (Eigen::Index k = 1; k <= 4; ++k) CHECK(rip_constant_exact(f, k) <= rip_gershgorin_bound(f, k) + 1e-12);
  }
}

TEST_CASE("ETF penalty examples") {
  CHECK(etf_penalty(Frame(Mat::Identity(3, 3), true)) == 0.0);
  Mat dup(2, 2);
  dup << 1, 1, 0, 0;
  CHECK(etf_penalty(Frame(dup, true), 0.5) == doctest::Approx(0.5));
  CHECK(etf_penalty(mercedes_benz()) <= 1e-24);
  CHECK_THROWS_AS((void)etf_penalty(mercedes_benz(), 1.5), ContractError);
}
