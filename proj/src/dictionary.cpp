#include "grassdict/dictionary.hpp"

#include <cmath>

namespace grassdict {

Dictionary::Dictionary(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ContractError("Dictionary: no atoms");
  for (const Atom& a : atoms_) {
    if (a.rows() != atoms_.front().rows() || a.cols() != atoms_.front().cols()) {
      throw ShapeError("Dictionary: atoms have different shapes");
    }
    linops::require_finite(a, "Dictionary");
    if (std::abs(a.norm() - 1.0) > 1e-10) throw ContractError("Dictionary: atom is not unit norm");
  }
}

Dictionary Dictionary::normalized(std::vector<Atom> atoms) {
  for (Atom& a : atoms) {
    const double norm = a.norm();
    if (!(norm > 0.0)) throw ContractError("Dictionary: zero atom");
    a /= norm;
  }
  return Dictionary(std::move(atoms));
}

Mat Dictionary::flattened() const {
  const Eigen::Index len = signal_length() * channels();
  Mat out(len, static_cast<Eigen::Index>(atoms_.size()));
  for (std::size_t m = 0; m < atoms_.size(); ++m) {
    out.col(static_cast<Eigen::Index>(m)) = atoms_[m].reshaped();
  }
  return out;
}

std::vector<Subspace> Dictionary::subspaces(double rank_tol) const {
  std::vector<Subspace> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) out.push_back(subspace_of(a, rank_tol));
  return out;
}

Mat reconstruct(const Dictionary& dict, const SparseCode& code) {
  Mat out = Mat::Zero(dict.signal_length(), dict.channels());
  for (const CodeEntry& e : code) {
    if (e.index >= dict.size()) throw ContractError("reconstruct: atom index out of range");
    if (e.rotation) {
      out += e.coeff * dict[e.index] * *e.rotation;
    } else {
      out += e.coeff * dict[e.index];
    }
  }
  return out;
}

}  // namespace grassdict
