#include "grassdict/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace grassdict {

namespace {

void require_same_ambient(const Subspace& u, const Subspace& w) {
  if (u.ambient_dim() != w.ambient_dim()) {
    throw ShapeError("subspaces live in ambient spaces of different dimension");
  }
}

void require_same_dim(const Subspace& u, const Subspace& w, const char* what) {
  require_same_ambient(u, w);
  if (u.dim() != w.dim()) throw ShapeError(std::string(what) + ": subspace dimensions differ");
}

// Sum of log cos(theta_k), accurate for angles near zero.
double sum_log_cos(const PrincipalAngles& pa) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < pa.angles.size(); ++k) {
    const double c = pa.cosines(k);
    if (c <= 0.0) return -std::numeric_limits<double>::infinity();
    const double s = pa.sines(k);
    acc += (c * c >= 0.5) ? 0.5 * std::log1p(-s * s) : std::log(c);
  }
  return acc;
}

}  // namespace

Subspace Subspace::from_orthonormal(Mat basis) {
  linops::require_finite(basis, "Subspace");
  if (basis.cols() > basis.rows()) throw ContractError("Subspace: more basis vectors than ambient dimension");
  const Mat gram = basis.transpose() * basis;
  const Mat eye = Mat::Identity(basis.cols(), basis.cols());
  if ((gram - eye).cwiseAbs().maxCoeff() > 1e-10) {
    throw ContractError("Subspace: basis columns are not orthonormal");
  }
  return Subspace(std::move(basis));
}

Subspace Subspace::span_of(const Mat& m, double rank_tol) {
  return Subspace(linops::orthonormal_basis(m, rank_tol));
}

PrincipalAngles principal_angles(const Subspace& u, const Subspace& w) {
  require_same_ambient(u, w);
  // The angle set is symmetric; keep the smaller subspace on the right so the
  // complement residual has exactly min(dim) singular values.
  const Mat& a = u.dim() >= w.dim() ? u.basis() : w.basis();
  const Mat& b = u.dim() >= w.dim() ? w.basis() : u.basis();
  const Eigen::Index q = b.cols();

  const Mat cross = a.transpose() * b;
  const Vec cos_desc = linops::singular_values(cross);
  const Mat residual = b - a * cross;
  Vec sin_asc = linops::singular_values(residual);
  std::sort(sin_asc.begin(), sin_asc.end());

  PrincipalAngles out{Vec(q), Vec(q), Vec(q)};
  for (Eigen::Index k = 0; k < q; ++k) {
    const double c = std::clamp(cos_desc(k), 0.0, 1.0);
    const double s = std::clamp(sin_asc(k), 0.0, 1.0);
    if (c * c >= 0.5) {
      out.angles(k) = std::asin(s);
      out.sines(k) = s;
      out.cosines(k) = std::sqrt(std::max(0.0, 1.0 - s * s));
    } else {
      out.angles(k) = std::acos(c);
      out.cosines(k) = c;
      out.sines(k) = std::sqrt(std::max(0.0, 1.0 - c * c));
    }
  }
  // Rounding can break ties in the wrong order when both regimes meet.
  std::vector<Eigen::Index> order(q);
  for (Eigen::Index k = 0; k < q; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto i, auto j) { return out.angles(i) < out.angles(j); });
  PrincipalAngles sorted{Vec(q), Vec(q), Vec(q)};
  for (Eigen::Index k = 0; k < q; ++k) {
    sorted.angles(k) = out.angles(order[k]);
    sorted.cosines(k) = out.cosines(order[k]);
    sorted.sines(k) = out.sines(order[k]);
  }
  return sorted;
}

double geodesic(const Subspace& u, const Subspace& w) {
  return principal_angles(u, w).angles.norm();
}

double chordal(const Subspace& u, const Subspace& w) {
  require_same_ambient(u, w);
  // ||(I - A A^T) B||_F^2 = sum_k sin^2(theta_k) when dim B <= dim A.
  const Mat& a = u.dim() >= w.dim() ? u.basis() : w.basis();
  const Mat& b = u.dim() >= w.dim() ? w.basis() : u.basis();
  return (b - a * (a.transpose() * b)).norm();
}

double chordal_2norm(const Subspace& u, const Subspace& w) {
  const PrincipalAngles pa = principal_angles(u, w);
  return pa.sines.maxCoeff();
}

double projection(const Subspace& u, const Subspace& w) {
  const PrincipalAngles pa = principal_angles(u, w);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < pa.angles.size(); ++k) {
    const double h = std::sin(0.5 * pa.angles(k));
    acc += h * h;
  }
  return 2.0 * std::sqrt(acc);
}

double projection_2norm(const Subspace& u, const Subspace& w) {
  const PrincipalAngles pa = principal_angles(u, w);
  return 2.0 * std::sin(0.5 * pa.angles.maxCoeff());
}

double fubini_study(const Subspace& u, const Subspace& w) {
  require_same_dim(u, w, "fubini_study");
  const double log_prod = sum_log_cos(principal_angles(u, w));
  if (std::isinf(log_prod)) return std::numbers::pi / 2.0;
  // arccos(x) = 2 asin(sqrt((1 - x) / 2)), with 1 - x from expm1.
  const double one_minus = std::clamp(-std::expm1(log_prod), 0.0, 1.0);
  return 2.0 * std::asin(std::sqrt(0.5 * one_minus));
}

double spectral(const Subspace& u, const Subspace& w) {
  const PrincipalAngles pa = principal_angles(u, w);
  return pa.sines.minCoeff();
}

double binet_cauchy(const Subspace& u, const Subspace& w) {
  const double log_prod = sum_log_cos(principal_angles(u, w));
  if (std::isinf(log_prod)) return 1.0;
  return std::sqrt(std::clamp(-std::expm1(2.0 * log_prod), 0.0, 1.0));
}

double chordal_gram(const Subspace& u, const Subspace& w) {
  require_same_dim(u, w, "chordal_gram");
  const double cross = (u.basis().transpose() * w.basis()).squaredNorm();
  return std::sqrt(std::max(0.0, static_cast<double>(u.dim()) - cross));
}

double chordal_projector(const Subspace& u, const Subspace& w) {
  require_same_dim(u, w, "chordal_projector");
  const Mat pu = u.basis() * u.basis().transpose();
  const Mat pw = w.basis() * w.basis().transpose();
  return (pu - pw).norm() / std::numbers::sqrt2;
}

double atom_frobenius_distance(const Atom& a, const Atom& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("atom_frobenius_distance: shapes differ");
  linops::require_finite(a, "atom_frobenius_distance");
  linops::require_finite(b, "atom_frobenius_distance");
  if (std::abs(a.norm() - 1.0) > 1e-8 || std::abs(b.norm() - 1.0) > 1e-8) {
    throw ContractError("atom_frobenius_distance: atoms must have unit Frobenius norm");
  }
  return std::min(2.0, (a - b).norm());
}

Subspace subspace_of(const Atom& atom, double rank_tol) { return Subspace::span_of(atom, rank_tol); }

}  // namespace grassdict
