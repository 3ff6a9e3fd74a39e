#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "grassdict/cluster.hpp"
#include "grassdict/dictlearn.hpp"
#include "grassdict/errors.hpp"
#include "grassdict/frames.hpp"
#include "grassdict/setmetric.hpp"
#include "grassdict/synthetic.hpp"

namespace py = pybind11;
using namespace grassdict;

namespace {

GroundDistance ground_of(const std::string& name) {
  const auto g = parse_ground(name);
  if (!g) throw ContractError("unknown ground distance '" + name + "'");
  return *g;
}

SetMetric set_of(const std::string& name) {
  if (name == "hausdorff") return SetMetric::hausdorff;
  if (name == "wasserstein") return SetMetric::wasserstein;
  throw ContractError("unknown set metric '" + name + "'");
}

Algorithm algorithm_of(const std::string& name) {
  if (name == "mdla") return Algorithm::mdla;
  if (name == "ndri") return Algorithm::ndri;
  throw ContractError("unknown algorithm '" + name + "'");
}

Linkage linkage_of(const std::string& name) {
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  if (name == "hausdorff") return Linkage::hausdorff;
  throw ContractError("unknown linkage '" + name + "'");
}

py::list code_list(const SparseCode& code) {
  py::list out;
  for (const CodeEntry& e : code) {
    if (e.rotation) {
      out.append(py::make_tuple(e.index, e.coeff, *e.rotation));
    } else {
      out.append(py::make_tuple(e.index, e.coeff));
    }
  }
  return out;
}

py::dict trace_dict(const TraceRow& r) {
  py::dict d;
  d["iter"] = r.iteration;
  d["t99"] = r.t99;
  d["t97"] = r.t97;
  d["wass_chordal"] = r.wass_chordal;
  d["wass_frob"] = r.wass_frob;
  d["haus_chordal"] = r.haus_chordal;
  d["haus_frob"] = r.haus_frob;
  return d;
}

py::dict partition_dict(const Partition& p) {
  py::dict d;
  d["labels"] = p.labels;
  d["exemplars"] = p.exemplars;
  return d;
}

SynthConfig make_config(std::size_t atoms, Eigen::Index length, Eigen::Index channels, std::size_t signals,
                        std::size_t per_signal, bool rotate, std::optional<double> snr_db, std::uint64_t seed,
                        std::size_t iterations, std::size_t sparsity) {
  SynthConfig cfg;
  cfg.atoms = atoms;
  cfg.length = length;
  cfg.channels = channels;
  cfg.signals = signals;
  cfg.atoms_per_signal = per_signal;
  cfg.rotate = rotate;
  cfg.snr_db = snr_db;
  cfg.seed = seed;
  cfg.iterations = iterations;
  cfg.sparsity = sparsity;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grassmannian distances, multivariate dictionary learning and clustering";
#ifdef GRASSDICT_VERSION
  m.attr("__version__") = GRASSDICT_VERSION;
#else
  m.attr("__version__") = "0.0.0";
#endif

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto contract = py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", contract.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  const auto spans = [](double (*f)(const Subspace&, const Subspace&)) {
    return [f](const Mat& a, const Mat& b) { return f(Subspace::span_of(a), Subspace::span_of(b)); };
  };
  m.def("geodesic", spans(geodesic), py::arg("a"), py::arg("b"));
  m.def("chordal", spans(chordal), py::arg("a"), py::arg("b"));
  m.def("chordal_2norm", spans(chordal_2norm), py::arg("a"), py::arg("b"));
  m.def("projection", spans(projection), py::arg("a"), py::arg("b"));
  m.def("projection_2norm", spans(projection_2norm), py::arg("a"), py::arg("b"));
  m.def("fubini_study", spans(fubini_study), py::arg("a"), py::arg("b"));
  m.def("spectral", spans(spectral), py::arg("a"), py::arg("b"));
  m.def("binet_cauchy", spans(binet_cauchy), py::arg("a"), py::arg("b"));
  m.def(
      "principal_angles",
      [](const Mat& a, const Mat& b) { return principal_angles(Subspace::span_of(a), Subspace::span_of(b)).angles; },
      py::arg("a"), py::arg("b"), "Principal angles between the column spans of a and b, nondecreasing.");
  m.def(
      "ground_distance",
      [](const std::string& ground, const Mat& a, const Mat& b) {
        const GroundDistance g = ground_of(ground);
        if (g == GroundDistance::frobenius) return atom_frobenius_distance(a, b);
        return ground_distance(g, Subspace::span_of(a), Subspace::span_of(b));
      },
      py::arg("ground"), py::arg("a"), py::arg("b"));

  m.def(
      "dictionary_distance",
      [](const std::vector<Mat>& a, const std::vector<Mat>& b, const std::string& ground, const std::string& set,
         double p) {
        return dictionary_distance(Dictionary::normalized(a), Dictionary::normalized(b), ground_of(ground), set_of(set),
                                   p);
      },
      py::arg("a"), py::arg("b"), py::arg("ground") = "chordal", py::arg("set") = "wasserstein", py::arg("p") = 1.0,
      "Set distance between two lists of atoms (each rescaled to unit norm).");
  m.def(
      "wasserstein_cost",
      [](const Mat& ground, const Vec& wa, const Vec& wb, double p) { return wasserstein(ground, wa, wb, p).value; },
      py::arg("ground"), py::arg("wa"), py::arg("wb"), py::arg("p") = 1.0);
  m.def("hausdorff_cost", py::overload_cast<const Mat&>(&hausdorff), py::arg("ground"));
  m.def(
      "normalized_score", [](double d, const std::string& ground, Eigen::Index dim) {
        return normalized_score(d, ground_of(ground), dim);
      },
      py::arg("d"), py::arg("ground"), py::arg("dim"));

  m.def("welch_bound", &welch_bound, py::arg("m"), py::arg("n"));
  m.def(
      "coherence", [](const Mat& e) { return coherence(Frame::unit(e)); }, py::arg("elements"));
  m.def(
      "frame_bounds",
      [](const Mat& e) {
        const FrameBounds b = frame_operator_bounds(Frame(e));
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("elements"));
  m.def(
      "is_equiangular_tight", [](const Mat& e, double tol) { return is_equiangular_tight(Frame::unit(e), tol).equiangular_tight; },
      py::arg("elements"), py::arg("tol") = 1e-9);
  m.def(
      "rip_constant", [](const Mat& e, Eigen::Index k) { return rip_constant_exact(Frame::unit(e), k); },
      py::arg("elements"), py::arg("k"));

  m.def(
      "m_omp",
      [](const Mat& signal, const std::vector<Mat>& atoms, std::size_t k) {
        const CodingResult r = m_omp(signal, Dictionary(atoms), k);
        return py::make_tuple(code_list(r.code), r.residual);
      },
      py::arg("signal"), py::arg("atoms"), py::arg("k"));
  m.def(
      "ndri_omp",
      [](const Mat& signal, const std::vector<Mat>& atoms, std::size_t k) {
        const CodingResult r = ndri_omp(signal, Dictionary(atoms), k);
        return py::make_tuple(code_list(r.code), r.residual);
      },
      py::arg("signal"), py::arg("atoms"), py::arg("k"));
  m.def(
      "nd_registration",
      [](const Mat& u, const Mat& z) {
        const Registration r = nd_registration(u, z);
        return py::make_tuple(r.alpha, r.rotation);
      },
      py::arg("u"), py::arg("z"));
  m.def(
      "learn",
      [](const std::vector<Mat>& data, const std::string& algo, std::size_t atoms, std::size_t sparsity,
         std::size_t iterations, std::uint64_t seed) {
        LearningOptions o;
        o.atoms = atoms;
        o.sparsity = sparsity;
        o.iterations = iterations;
        o.seed = seed;
        const LearningResult r = algorithm_of(algo) == Algorithm::mdla ? m_dla(data, o) : ndri_dla(data, o);
        std::vector<double> errors;
        for (const IterationRecord& rec : r.trace) errors.push_back(rec.squared_error);
        return py::make_tuple(r.dictionary.atoms(), errors);
      },
      py::arg("data"), py::arg("algo") = "mdla", py::arg("atoms") = 135, py::arg("sparsity") = 3,
      py::arg("iterations") = 80, py::arg("seed") = 0, "Returns (atoms, squared error per iteration).");
  m.def(
      "detection_rate",
      [](const std::vector<Mat>& original, const std::vector<Mat>& learned, double threshold, bool rotation_invariant) {
        return detection_rate(Dictionary(original), Dictionary(learned), threshold, rotation_invariant);
      },
      py::arg("original"), py::arg("learned"), py::arg("threshold") = 0.99, py::arg("rotation_invariant") = false);

  m.def(
      "generate",
      [](std::size_t atoms, Eigen::Index length, Eigen::Index channels, std::size_t signals, std::size_t per_signal,
         bool rotate, std::optional<double> snr_db, std::uint64_t seed) {
        const SynthConfig cfg = make_config(atoms, length, channels, signals, per_signal, rotate, snr_db, seed, 1, 1);
        const Dictionary d = gen_original_dictionary(cfg);
        Dataset ds = gen_dataset(d, cfg);
        if (snr_db) ds.signals = add_noise(ds.signals, *snr_db, derive_seed(seed, SeedStream::noise)).signals;
        return py::make_tuple(d.atoms(), ds.signals);
      },
      py::arg("atoms") = 135, py::arg("length") = 20, py::arg("channels") = 10, py::arg("signals") = 2000,
      py::arg("per_signal") = 3, py::arg("rotate") = false, py::arg("snr_db") = py::none(), py::arg("seed") = 0,
      "Returns (original atoms, training signals).");
  m.def(
      "recovery_experiment",
      [](const std::string& algo, std::size_t atoms, Eigen::Index length, Eigen::Index channels, std::size_t signals,
         std::size_t per_signal, bool rotate, std::optional<double> snr_db, std::uint64_t seed, std::size_t iterations,
         std::size_t sparsity) {
        const SynthConfig cfg =
            make_config(atoms, length, channels, signals, per_signal, rotate, snr_db, seed, iterations, sparsity);
        const ExperimentTrace t = run_recovery_experiment(cfg, algorithm_of(algo));
        py::list rows;
        for (const TraceRow& r : t.rows) rows.append(trace_dict(r));
        return rows;
      },
      py::arg("algo") = "mdla", py::arg("atoms") = 135, py::arg("length") = 20, py::arg("channels") = 10,
      py::arg("signals") = 2000, py::arg("per_signal") = 3, py::arg("rotate") = false, py::arg("snr_db") = py::none(),
      py::arg("seed") = 0, py::arg("iterations") = 80, py::arg("sparsity") = 3,
      "Per-iteration detection rates and normalised set distances.");

  m.def("to_similarity", &to_similarity, py::arg("d"), py::arg("sigma") = 1.0);
  m.def(
      "affinity_propagation",
      [](const Mat& s, double damping, std::size_t window, std::size_t max_iterations) {
        const ApResult r = affinity_propagation(s, {damping, window, max_iterations});
        py::dict d = partition_dict(r.partition);
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("s"), py::arg("damping") = 0.5, py::arg("convergence_window") = 50, py::arg("max_iterations") = 500);
  m.def(
      "normalized_mutual_information",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        return normalized_mutual_information(Partition{a, {}}, Partition{b, {}});
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "agglomerate",
      [](const Mat& d, const std::string& linkage) {
        py::list out;
        for (const Merge& mg : agglomerate(d, linkage_of(linkage))) out.append(py::make_tuple(mg.a, mg.b, mg.height, mg.size));
        return out;
      },
      py::arg("d"), py::arg("linkage") = "hausdorff", "Merge list of (a, b, height, size) with scipy-style ids.");
  m.def(
      "cut",
      [](const Mat& d, const std::string& linkage, std::size_t clusters) {
        const auto n = static_cast<std::size_t>(d.rows());
        return cut_dendrogram(agglomerate(d, linkage_of(linkage)), n, clusters).labels;
      },
      py::arg("d"), py::arg("linkage"), py::arg("clusters"));
  m.def(
      "consensus",
      [](const std::vector<std::vector<int>>& partitions, std::size_t clusters) {
        std::vector<Partition> parts;
        for (const auto& p : partitions) parts.push_back(Partition{p, {}});
        const ConsensusResult r = consensus_ensemble(parts, clusters);
        return py::make_tuple(r.partition.labels, r.mean_nmi);
      },
      py::arg("partitions"), py::arg("clusters"));
  m.def(
      "laplacian_eigenmaps",
      [](const Mat& d, std::size_t neighbors, std::size_t out_dim) {
        const Embedding e = laplacian_eigenmaps(d, neighbors, out_dim);
        return py::make_tuple(e.coordinates, e.eigenvalues, e.disconnected);
      },
      py::arg("d"), py::arg("neighbors") = 10, py::arg("out_dim") = 2);
  m.def(
      "session_purity",
      [](const std::vector<int>& labels, const std::vector<int>& sessions) {
        return session_purity(Partition{labels, {}}, sessions);
      },
      py::arg("labels"), py::arg("sessions"));
}
