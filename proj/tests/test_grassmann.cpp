#include <doctest.h>

#include <numbers>

#include "grassdict/errors.hpp"
#include "grassdict/grassmann.hpp"
#include "support.hpp"

using namespace grassdict;
using std::numbers::pi;

namespace {

// cos^2 of the principal angles as eigenvalues of (A^T B)(A^T B)^T, an
// oracle independent of the SVD path.
Vec oracle_cosines(const Subspace& u, const Subspace& w) {
  const Mat c = u.basis().transpose() * w.basis();
  Eigen::SelfAdjointEigenSolver<Mat> eig(c * c.transpose());
  Vec v = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
  return v.head(std::min(u.dim(), w.dim()));
}

using Distance = double (*)(const Subspace&, const Subspace&);

}  // namespace

TEST_CASE("principal angles on hand-built subspaces") {
  std::mt19937_64 rng(1);
  const Subspace s = testing::random_subspace(6, 3, rng);
  CHECK(principal_angles(s, s).angles.cwiseAbs().maxCoeff() <= 1e-12);

  const PrincipalAngles lines = principal_angles(testing::line(0.0), testing::line(0.3));
  REQUIRE(lines.angles.size() == 1);
  CHECK(lines.angles(0) == doctest::Approx(0.3).epsilon(1e-14));

  const PrincipalAngles mixed = principal_angles(testing::span_e(4, {0, 1}), testing::span_e(4, {0, 2}));
  REQUIRE(mixed.angles.size() == 2);
  CHECK(mixed.angles(0) == doctest::Approx(0.0));
  CHECK(mixed.angles(1) == doctest::Approx(pi / 2));
}

TEST_CASE("principal angles resolve tiny angles") {
  for (const double phi : {1e-12, 1e-9, 1e-6}) {
    const PrincipalAngles a = principal_angles(testing::line(0.0), testing::line(phi));
    CHECK(a.angles(0) == doctest::Approx(phi).epsilon(1e-6));
  }
}

TEST_CASE("principal angles agree with the eigenvalue oracle and stay sorted in range") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const Subspace u = testing::random_subspace(8, 1 + t % 4, rng);
    const Subspace w = testing::random_subspace(8, 1 + (t / 4) % 4, rng);
    const PrincipalAngles a = principal_angles(u, w);
    const Vec ref = oracle_cosines(u, w);
    REQUIRE(a.angles.size() == ref.size());
    for (Eigen::Index k = 0; k < a.angles.size(); ++k) {
      CHECK(std::cos(a.angles(k)) == doctest::Approx(ref(k)).epsilon(1e-9));
      CHECK(a.angles(k) >= 0.0);
      CHECK(a.angles(k) <= pi / 2);
      if (k > 0) CHECK(a.angles(k - 1) <= a.angles(k));
      CHECK(a.cosines(k) >= 0.0);
      CHECK(a.cosines(k) <= 1.0);
    }
  }
}

TEST_CASE("principal angles reject ambient dimension mismatch") {
  CHECK_THROWS_AS((void)principal_angles(testing::span_e(3, {0}), testing::span_e(4, {0})), ShapeError);
}

TEST_CASE("Subspace construction checks orthonormality") {
  Mat b(2, 1);
  b << 1, 1;
  CHECK_THROWS_AS((void)Subspace::from_orthonormal(b), ContractError);
  CHECK(Subspace::span_of(b).dim() == 1);
}

TEST_CASE("geodesic examples") {
  CHECK(geodesic(testing::span_e(3, {0, 1}), testing::span_e(3, {0, 1})) == doctest::Approx(0.0));
  CHECK(geodesic(testing::span_e(2, {0}), testing::span_e(2, {1})) == doctest::Approx(pi / 2));
  CHECK(geodesic(testing::span_e(4, {0, 1}), testing::span_e(4, {2, 3})) == doctest::Approx(pi * std::sqrt(2.0) / 2));
}

TEST_CASE("chordal examples") {
  CHECK(chordal(testing::span_e(3, {0, 1}), testing::span_e(3, {0, 1})) <= 1e-15);
  CHECK(chordal(testing::span_e(4, {0, 1}), testing::span_e(4, {0, 2})) == doctest::Approx(1.0));
  CHECK(chordal(testing::span_e(6, {0, 1, 2}), testing::span_e(6, {3, 4, 5})) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("chordal 2-norm examples") {
  CHECK(chordal_2norm(testing::span_e(3, {0, 1}), testing::span_e(3, {0, 1})) == doctest::Approx(0.0));
  CHECK(chordal_2norm(testing::span_e(3, {0, 1}), testing::span_e(3, {0, 2})) == doctest::Approx(1.0));
  CHECK(chordal_2norm(testing::line(0.0), testing::line(0.4)) == doctest::Approx(std::sin(0.4)));
}

TEST_CASE("projection distances examples") {
  const auto e1 = testing::span_e(2, {0});
  const auto e2 = testing::span_e(2, {1});
  CHECK(projection(e1, e1) == doctest::Approx(0.0));
  CHECK(projection(e1, e2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(projection(testing::line(0.0), testing::line(0.7)) == doctest::Approx(2 * std::sin(0.35)));
  CHECK(projection_2norm(e1, e1) == doctest::Approx(0.0));
  CHECK(projection_2norm(e1, e2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(projection_2norm(testing::line(0.0), testing::line(0.7)) == doctest::Approx(2 * std::sin(0.35)));
}

TEST_CASE("Fubini-Study examples") {
  const auto e1 = testing::span_e(2, {0});
  CHECK(fubini_study(e1, e1) == doctest::Approx(0.0));
  CHECK(fubini_study(e1, testing::span_e(2, {1})) == doctest::Approx(pi / 2));
  CHECK(fubini_study(testing::line(0.0), testing::line(0.5)) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK_THROWS_AS((void)fubini_study(testing::span_e(3, {0}), testing::span_e(3, {0, 1})), ContractError);
}

TEST_CASE("Fubini-Study equals arccos of the absolute determinant") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const Subspace u = testing::random_subspace(7, 3, rng);
    const Subspace w = testing::random_subspace(7, 3, rng);
    const double det = std::abs((u.basis().transpose() * w.basis()).determinant());
    CHECK(fubini_study(u, w) == doctest::Approx(std::acos(std::min(1.0, det))).epsilon(1e-9));
  }
}

TEST_CASE("spectral and Binet-Cauchy examples") {
  const auto e1 = testing::span_e(2, {0});
  const auto e2 = testing::span_e(2, {1});
  CHECK(spectral(e1, e1) == doctest::Approx(0.0));
  CHECK(spectral(e1, e2) == doctest::Approx(1.0));
  CHECK(spectral(testing::span_e(4, {0, 1}), testing::span_e(4, {0, 2})) == doctest::Approx(0.0));
  CHECK(binet_cauchy(e1, e1) == doctest::Approx(0.0));
  CHECK(binet_cauchy(testing::span_e(4, {0, 1}), testing::span_e(4, {0, 2})) == doctest::Approx(1.0));
  CHECK(binet_cauchy(testing::line(0.0), testing::line(0.6)) == doctest::Approx(std::sin(0.6)));
}

TEST_CASE("atom Frobenius distance examples") {
  std::mt19937_64 rng(4);
  const Mat a = testing::gaussian(5, 2, rng).normalized();
  CHECK(atom_frobenius_distance(a, a) == doctest::Approx(0.0));
  CHECK(atom_frobenius_distance(a, -a) == doctest::Approx(2.0));
  Mat x = Mat::Zero(2, 2);
  Mat y = Mat::Zero(2, 2);
  x(0, 0) = 1;
  y(1, 1) = 1;
  CHECK(atom_frobenius_distance(x, y) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS((void)atom_frobenius_distance(x, Mat::Identity(3, 3) / std::sqrt(3.0)), ShapeError);
}

TEST_CASE("subspace_of examples") {
  Mat q = Mat::Zero(4, 2);
  q(0, 0) = 1;
  q(1, 1) = 1;
  CHECK(chordal(subspace_of(q), Subspace::from_orthonormal(q)) <= 1e-14);

  std::mt19937_64 rng(6);
  Mat dup = testing::gaussian(6, 3, rng);
  dup.col(2) = dup.col(0);
  CHECK(subspace_of(dup).dim() == 2);

  const Mat r1 = testing::gaussian(6, 1, rng) * testing::gaussian(1, 3, rng);
  CHECK(subspace_of(r1).dim() == 1);
  CHECK_THROWS_AS((void)subspace_of(Mat::Zero(3, 2)), EmptySpanError);
}

TEST_CASE("metric axioms hold for the true metrics on Gr(3, 8)") {
  std::mt19937_64 rng(21);
  const std::vector<std::pair<const char*, Distance>> metrics = {
      {"geodesic", geodesic}, {"chordal", chordal}, {"fubini", fubini_study}, {"binet", binet_cauchy}};
  for (int t = 0; t < 200; ++t) {
    const Subspace a = testing::random_subspace(8, 3, rng);
    const Subspace b = testing::random_subspace(8, 3, rng);
    const Subspace c = testing::random_subspace(8, 3, rng);
    for (const auto& [name, d] : metrics) {
      CAPTURE(name);
      CHECK(d(a, a) <= 1e-9);
      CHECK(std::abs(d(a, b) - d(b, a)) <= 1e-9);
      CHECK(d(a, c) <= d(a, b) + d(b, c) + 1e-9);
    }
  }
}

TEST_CASE("chordal formula equivalence") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index k = 1 + t % 5;
    const Subspace u = testing::random_subspace(9, k, rng);
    const Subspace w = testing::random_subspace(9, k, rng);
    const double angle_form = principal_angles(u, w).sines.norm();
    CHECK(std::abs(chordal(u, w) - angle_form) <= 1e-8);
    CHECK(std::abs(chordal_gram(u, w) - angle_form) <= 1e-8);
    CHECK(std::abs(chordal_projector(u, w) - angle_form) <= 1e-8);
  }
}

TEST_CASE("every ground distance is invariant to right multiplication by an invertible matrix") {
  std::mt19937_64 rng(23);
  const std::vector<Distance> all = {geodesic, chordal,   chordal_2norm, projection,  projection_2norm,
                                     fubini_study, spectral, binet_cauchy};
  for (int t = 0; t < 20; ++t) {
    const Mat atom = testing::gaussian(10, 4, rng);
    Mat mix = testing::gaussian(4, 4, rng);
    mix.diagonal().array() += 3.0;
    const Subspace a = subspace_of(atom);
    const Subspace b = subspace_of(atom * mix);
    for (const Distance d : all) CHECK(d(a, b) <= 1e-9);
  }
}

TEST_CASE("distance bounds and chordal below geodesic") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index k = 1 + t % 4;
    const Subspace u = testing::random_subspace(8, k, rng);
    const Subspace w = testing::random_subspace(8, k, rng);
    const double rk = static_cast<double>(k);
    CHECK(chordal(u, w) <= std::sqrt(rk) + 1e-12);
    CHECK(geodesic(u, w) <= pi * std::sqrt(rk) / 2 + 1e-12);
    CHECK(binet_cauchy(u, w) <= 1.0);
    CHECK(spectral(u, w) <= 1.0);
    CHECK(fubini_study(u, w) <= pi / 2 + 1e-12);
    CHECK(chordal(u, w) <= geodesic(u, w) + 1e-12);
  }
}

TEST_CASE("unequal dimensions use the smaller number of angles") {
  const Subspace a = testing::span_e(5, {0});
  const Subspace b = testing::span_e(5, {0, 1, 2});
  CHECK(principal_angles(a, b).angles.size() == 1);
  CHECK(chordal(a, b) == doctest::Approx(0.0));
  CHECK(geodesic(testing::span_e(5, {3}), b) == doctest::Approx(pi / 2));
}
