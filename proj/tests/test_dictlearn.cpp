#include <doctest.h>

#include <cstdlib>
#include <set>

#include "grassdict/dictlearn.hpp"
#include "grassdict/errors.hpp"
#include "support.hpp"

using namespace grassdict;

namespace {

Dictionary orthogonal_dictionary(std::size_t m, Eigen::Index n, Eigen::Index rho, std::mt19937_64& rng) {
  const Mat q = testing::orthonormal(n * rho, static_cast<Eigen::Index>(m), rng);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < m; ++i) atoms.push_back(Eigen::Map<const Mat>(q.col(static_cast<Eigen::Index>(i)).data(), n, rho));
  return Dictionary(std::move(atoms));
}

// Orthogonal-Procrustes objective at (alpha, R).
double objective(const Mat& u, const Mat& z, double alpha, const Mat& r) { return (z - alpha * u * r).squaredNorm(); }

}  // namespace

TEST_CASE("m_omp examples") {
  std::mt19937_64 rng(71);
  const Dictionary d = testing::random_dictionary(6, 5, 3, rng);

  const CodingResult zero = m_omp(Mat::Zero(5, 3), d, 3);
  CHECK(zero.code.empty());
  CHECK(zero.residual.norm() == 0.0);

  const CodingResult single = m_omp(0.7 * d[3], d, 1);
  REQUIRE(single.code.size() == 1);
  CHECK(single.code[0].index == 3);
  CHECK(single.code[0].coeff == doctest::Approx(0.7));
  CHECK(single.residual.norm() <= 1e-10);

  const Dictionary ortho = orthogonal_dictionary(5, 4, 3, rng);
  const std::vector<double> c = {1.5, -0.3, 0.0, 2.0, 0.8};
  Mat y = Mat::Zero(4, 3);
  for (std::size_t m = 0; m < c.size(); ++m) y += c[m] * ortho[m];
  const CodingResult r = m_omp(y, ortho, 4);
  REQUIRE(r.code.size() == 4);
  for (const CodeEntry& e : r.code) CHECK(std::abs(e.coeff - c[e.index]) <= 1e-10);

  CHECK_THROWS_AS((void)m_omp(Mat::Zero(4, 4), d, 1), ShapeError);
  CHECK_THROWS_AS((void)m_omp(Mat::Zero(5, 3), d, 0), ContractError);
  CHECK_THROWS_AS((void)m_omp(Mat::Zero(5, 3), d, 7), ContractError);
}

TEST_CASE("m_omp residual is nonincreasing and vanishes at full rank") {
  std::mt19937_64 rng(72);
  const Dictionary d = testing::random_dictionary(8, 4, 3, rng);
  for (int t = 0; t < 10; ++t) {
    const Mat y = testing::gaussian(4, 3, rng);
    double previous = y.norm();
    for (std::size_t k = 1; k <= d.size(); ++k) {
      const double now = m_omp(y, d, k).residual.norm();
      CHECK(now <= previous + 1e-12);
      previous = now;
    }
  }
  const Dictionary full = testing::random_dictionary(12, 4, 3, rng);
  const Mat y = testing::gaussian(4, 3, rng);
  const CodingResult r = m_omp(y, full, 12);
  CHECK(r.residual.norm() <= 1e-8);
  CHECK((reconstruct(full, r.code) + r.residual - y).norm() <= 1e-10);
}

TEST_CASE("m_omp falls back to the pseudo-inverse on dependent atoms") {
  std::mt19937_64 rng(73);
  const Mat a = testing::gaussian(3, 2, rng).normalized();
  const Mat b = testing::gaussian(3, 2, rng).normalized();
  const Mat c = (a + b).normalized();
  const Dictionary d({a, b, c});
  const CodingResult r = m_omp(2.0 * a + b, d, 3);
  CHECK(r.residual.norm() <= 1e-9);
}

TEST_CASE("nd_registration examples") {
  std::mt19937_64 rng(74);
  const Mat u = testing::gaussian(6, 3, rng);
  const Registration self = nd_registration(u, u);
  CHECK(self.alpha == doctest::Approx(1.0));
  CHECK(objective(u, u, self.alpha, self.rotation) <= 1e-20 * u.squaredNorm() + 1e-24);

  const Mat r0 = testing::rotation(3, rng);
  const Mat z = 2.0 * u * r0;
  const Registration reg = nd_registration(u, z);
  CHECK(std::abs(reg.alpha - 2.0) <= 1e-9);
  CHECK((z - reg.alpha * u * reg.rotation).norm() <= 1e-9);
  CHECK((reg.rotation * reg.rotation.transpose() - Mat::Identity(3, 3)).norm() <= 1e-9);

  CHECK_THROWS_AS((void)nd_registration(Mat::Zero(6, 3), z), ContractError);
  CHECK_THROWS_AS((void)nd_registration(u, Mat::Zero(5, 3)), ShapeError);
}

TEST_CASE("nd_registration beats a grid search over O(2)") {
  std::mt19937_64 rng(75);
  for (int t = 0; t < 100; ++t) {
    const Mat u = testing::gaussian(5, 2, rng);
    const Mat z = testing::gaussian(5, 2, rng);
    const Registration reg = nd_registration(u, z);
    CHECK((reg.rotation * reg.rotation.transpose() - Mat::Identity(2, 2)).norm() <= 1e-9);
    const double ours = objective(u, z, reg.alpha, reg.rotation);
    double grid = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1800; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 1800.0;
      Mat rot(2, 2);
      rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      Mat ref(2, 2);
      ref << std::cos(th), std::sin(th), std::sin(th), -std::cos(th);
      for (const Mat& r : {rot, ref}) {
        const Mat ur = u * r;
        const double alpha = linops::frob_inner(ur, z) / ur.squaredNorm();
        grid = std::min(grid, objective(u, z, alpha, r));
      }
    }
    CHECK(ours <= grid + 1e-6);
  }
}

TEST_CASE("ndri_omp examples") {
  std::mt19937_64 rng(76);
  const Dictionary d = testing::random_dictionary(5, 6, 3, rng);
  const Mat r0 = testing::rotation(3, rng);
  const CodingResult one = ndri_omp(1.3 * d[3] * r0, d, 1);
  REQUIRE(one.code.size() == 1);
  CHECK(one.code[0].index == 3);
  CHECK(one.residual.norm() <= 1e-9);
  REQUIRE(one.code[0].rotation.has_value());
  CHECK((*one.code[0].rotation * one.code[0].rotation->transpose() - Mat::Identity(3, 3)).norm() <= 1e-9);

  CHECK(ndri_omp(Mat::Zero(6, 3), d, 2).code.empty());

  // Two atoms whose column spans are orthogonal in R^6.
  const Mat q = testing::orthonormal(6, 6, rng);
  const Mat a = q.leftCols(3) * testing::gaussian(3, 3, rng);
  const Mat b = q.rightCols(3) * testing::gaussian(3, 3, rng);
  const Dictionary sep = Dictionary::normalized({a, b});
  const Mat y = 0.8 * sep[0] * testing::rotation(3, rng) - 1.1 * sep[1] * testing::rotation(3, rng);
  const CodingResult two = ndri_omp(y, sep, 2);
  CHECK(two.code.size() == 2);
  CHECK(two.residual.norm() <= 1e-8);
}

TEST_CASE("ndri_omp residual is nonincreasing") {
  std::mt19937_64 rng(77);
  const Dictionary d = testing::random_dictionary(10, 6, 3, rng);
  for (int t = 0; t < 10; ++t) {
    const Mat y = testing::gaussian(6, 3, rng);
    double previous = y.norm();
    for (std::size_t k = 1; k <= 5; ++k) {
      const double now = ndri_omp(y, d, k).residual.norm();
      CHECK(now <= previous + 1e-12);
      previous = now;
    }
  }
}

TEST_CASE("m_dla keeps an exact dictionary fixed") {
  std::mt19937_64 rng(78);
  const Dictionary d = testing::random_dictionary(5, 6, 3, rng);
  LearningOptions o;
  o.atoms = 5;
  o.sparsity = 1;
  o.iterations = 3;
  o.initial = d;
  const LearningResult r = m_dla(d.atoms(), o);
  for (std::size_t m = 0; m < d.size(); ++m) CHECK((r.dictionary[m] - d[m]).norm() <= 1e-8);
  CHECK(r.trace.size() == 3);
  CHECK(r.trace.back().squared_error <= 1e-16);
}

TEST_CASE("ndri_dla keeps an exact dictionary fixed") {
  std::mt19937_64 rng(79);
  const Dictionary d = testing::random_dictionary(4, 6, 2, rng);
  LearningOptions o;
  o.atoms = 4;
  o.sparsity = 1;
  o.iterations = 2;
  o.initial = d;
  const LearningResult r = ndri_dla(d.atoms(), o);
  CHECK(detection_rate(d, r.dictionary, 0.99, true) == 100.0);
  CHECK(r.trace.back().squared_error <= 1e-16);
}

TEST_CASE("one signal, one atom converges to the normalised signal") {
  std::mt19937_64 rng(80);
  const Mat y = testing::gaussian(4, 2, rng) * 3.0;
  LearningOptions o;
  o.atoms = 1;
  o.sparsity = 1;
  o.iterations = 1;
  const LearningResult r = m_dla({y}, o);
  CHECK(std::abs(std::abs(linops::frob_inner(r.dictionary[0], y.normalized())) - 1.0) <= 1e-12);
}

TEST_CASE("m_dla error trace is nonincreasing away from replacement events") {
  std::mt19937_64 rng(81);
  const Dictionary truth = testing::random_dictionary(12, 6, 3, rng);
  std::vector<Mat> data;
  std::uniform_int_distribution<std::size_t> pick(0, truth.size() - 1);
  for (int q = 0; q < 150; ++q) {
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    data.push_back(truth[a] - 0.8 * truth[b]);
  }
  LearningOptions o;
  o.atoms = 12;
  o.sparsity = 2;
  o.iterations = 15;
  o.seed = 3;
  const LearningResult r = m_dla(data, o);
  REQUIRE(r.trace.size() == 15);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    if (r.trace[i].replaced_atoms.empty() && r.trace[i - 1].replaced_atoms.empty()) {
      CHECK(r.trace[i].squared_error <= r.trace[i - 1].squared_error * (1 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("learning results do not depend on the thread count") {
  std::mt19937_64 rng(82);
  std::vector<Mat> data;
  for (int q = 0; q < 40; ++q) data.push_back(testing::gaussian(5, 2, rng));
  LearningOptions o;
  o.atoms = 6;
  o.sparsity = 2;
  o.iterations = 4;
  o.seed = 9;
  setenv("GRASSDICT_THREADS", "1", 1);
  const LearningResult serial = ndri_dla(data, o);
  setenv("GRASSDICT_THREADS", "4", 1);
  const LearningResult threaded = ndri_dla(data, o);
  unsetenv("GRASSDICT_THREADS");
  for (std::size_t m = 0; m < 6; ++m) CHECK(serial.dictionary[m] == threaded.dictionary[m]);
}

TEST_CASE("learning rejects bad configurations") {
  LearningOptions o;
  o.atoms = 3;
  o.sparsity = 1;
  CHECK_THROWS_AS((void)m_dla({}, o), ContractError);
  CHECK_THROWS_AS((void)m_dla({Mat::Ones(2, 2), Mat::Ones(3, 2)}, o), ShapeError);
  CHECK_THROWS_AS((void)m_dla({Mat::Ones(2, 2), Mat::Ones(2, 2)}, o), ContractError);
  o.sparsity = 4;
  CHECK_THROWS_AS((void)m_dla({Mat::Ones(2, 2)}, o), ContractError);
}

TEST_CASE("detection rate examples and invariances") {
  std::mt19937_64 rng(83);
  const Dictionary d = testing::random_dictionary(10, 8, 3, rng);
  CHECK(detection_rate(d, d, 0.99, false) == 100.0);
  CHECK(detection_rate(d, d, 0.99, true) == 100.0);

  std::vector<Atom> negated = d.atoms();
  for (Atom& a : negated) a = -a;
  CHECK(detection_rate(d, Dictionary(negated), 0.99, false) == 100.0);

  std::vector<Atom> rotated;
  for (const Atom& a : d.atoms()) rotated.push_back(a * testing::rotation(3, rng));
  CHECK(detection_rate(d, Dictionary(rotated), 0.99, true) == 100.0);

  std::vector<Atom> shuffled(d.atoms().rbegin(), d.atoms().rend());
  CHECK(detection_rate(d, Dictionary(shuffled), 0.97, false) == 100.0);

  const Dictionary random = testing::random_dictionary(10, 8, 3, rng);
  CHECK(detection_rate(d, random, 0.99, false) == 0.0);

  CHECK_THROWS_AS((void)detection_rate(d, testing::random_dictionary(3, 8, 2, rng), 0.9, false), ShapeError);
  CHECK_THROWS_AS((void)detection_rate(d, d, 0.0, false), ContractError);
}
