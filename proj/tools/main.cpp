#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grassdict/cluster.hpp"
#include "grassdict/dictlearn.hpp"
#include "grassdict/errors.hpp"
#include "grassdict/frames.hpp"
#include "grassdict/io.hpp"
#include "grassdict/setmetric.hpp"
#include "grassdict/synthetic.hpp"

#ifndef GRASSDICT_VERSION
#define GRASSDICT_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace grassdict;

namespace {

constexpr int kUsageExit = 2;
constexpr int kRuntimeExit = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Provenance record for every file a run writes; one JSON line per output.
class Manifest {
 public:
  Manifest(std::string command, int argc, char** argv) : command_(std::move(command)) {
    for (int i = 0; i < argc; ++i) argv_.emplace_back(argv[i]);
    start_ = std::chrono::steady_clock::now();
  }

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_input(const fs::path& p) { inputs_.push_back(p.string()); }
  void add_flag(const std::string& name, nlohmann::json value) { flags_[name] = std::move(value); }

  void write_output(const fs::path& path, const std::string& content) {
    io::write_atomic(path, content);
    outputs_.push_back(path.string());
  }

  void finish(const fs::path& manifest_path) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::string lines;
    for (const std::string& out : outputs_) {
      nlohmann::json j;
      j["command"] = command_;
      j["argv"] = argv_;
      j["flags"] = flags_;
      if (seed_) j["seed"] = *seed_;
      j["inputs"] = inputs_;
      j["output"] = out;
      j["version"] = GRASSDICT_VERSION;
      j["duration_s"] = seconds;
      lines += j.dump() + "\n";
    }
    io::write_atomic(manifest_path, lines);
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  nlohmann::json flags_ = nlohmann::json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

fs::path with_suffix(const std::string& prefix, const char* suffix) { return fs::path(prefix + suffix); }

double parse_order(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfiniteOrder;
  try {
    std::size_t used = 0;
    const double p = std::stod(text, &used);
    if (used != text.size() || !(p > 0.0)) throw UsageError("--p must be a positive real or 'inf'");
    return p;
  } catch (const std::logic_error&) {
    throw UsageError("--p must be a positive real or 'inf'");
  }
}

// ---------------------------------------------------------------- gen
struct GenArgs {
  SynthConfig cfg;
  std::optional<double> snr;
  std::string out;
};

int run_gen(const GenArgs& a, Manifest& manifest) {
  SynthConfig cfg = a.cfg;
  cfg.snr_db = a.snr;
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  }
  if (a.snr && std::isnan(*a.snr)) throw UsageError("--snr must be a number");
  manifest.set_seed(cfg.seed);

  const Dictionary dict = gen_original_dictionary(cfg);
  Dataset data = gen_dataset(dict, cfg);
  if (a.snr) {
    const NoiseResult noisy = add_noise(data.signals, *a.snr, derive_seed(cfg.seed, SeedStream::noise));
    for (const std::size_t q : noisy.skipped) std::cerr << "warning: signal " << q << " is zero; noise skipped\n";
    data.signals = noisy.signals;
  }
  manifest.write_output(with_suffix(a.out, ".mdl"), io::format_dictionary(dict));
  manifest.write_output(with_suffix(a.out, ".mds"), io::format_dataset(data.signals));
  manifest.write_output(with_suffix(a.out, ".codes.csv"), io::format_codes(data.truth));
  manifest.finish(with_suffix(a.out, ".manifest.jsonl"));
  return 0;
}

// ---------------------------------------------------------------- learn
struct LearnArgs {
  std::string algo = "mdla";
  std::size_t atoms = 135;
  std::size_t sparsity = 3;
  std::size_t iters = 80;
  std::uint64_t seed = 0;
  std::string data;
  std::string original;
  std::string out;
};

int run_learn(const LearnArgs& a, Manifest& manifest) {
  manifest.set_seed(a.seed);
  manifest.add_input(a.data);
  const std::vector<Mat> signals = io::parse_dataset(io::read_file(a.data));
  if (signals.empty()) throw UsageError("--data holds no signals");

  std::optional<RecoveryEvaluator> evaluator;
  if (!a.original.empty()) {
    manifest.add_input(a.original);
    const Dictionary original = io::parse_dictionary(io::read_file(a.original));
    if (original.signal_length() != signals.front().rows() || original.channels() != signals.front().cols()) {
      throw UsageError("--original atoms and --data signals have different shapes");
    }
    evaluator.emplace(original, a.algo == "ndri");
  }

  LearningOptions opts;
  opts.atoms = a.atoms;
  opts.sparsity = a.sparsity;
  opts.iterations = a.iters;
  opts.seed = derive_seed(a.seed, SeedStream::learning);
  std::vector<TraceRow> rows;
  if (evaluator) {
    opts.on_iteration = [&](std::size_t it, const Dictionary& d) {
      if (it > 0) rows.push_back(evaluator->evaluate(d, it));
    };
  }
  LearningResult result;
  try {
    result = a.algo == "mdla" ? m_dla(signals, opts) : ndri_dla(signals, opts);
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  }

  manifest.write_output(with_suffix(a.out, ".mdl"), io::format_dictionary(result.dictionary));
  std::string errors = "iter,squared_error,replaced_atoms\n";
  for (const IterationRecord& r : result.trace) {
    errors += std::to_string(r.iteration) + "," + io::format_real(r.squared_error) + "," +
              std::to_string(r.replaced_atoms.size()) + "\n";
  }
  manifest.write_output(with_suffix(a.out, ".error.csv"), errors);
  if (evaluator) manifest.write_output(with_suffix(a.out, ".trace.csv"), io::format_trace(rows));
  manifest.finish(with_suffix(a.out, ".manifest.jsonl"));
  return 0;
}

// ---------------------------------------------------------------- sweep
struct SweepArgs {
  SynthConfig cfg;
  std::string algo = "mdla";
  std::vector<double> levels;
  std::string out;
};

int run_sweep(const SweepArgs& a, Manifest& manifest) {
  try {
    a.cfg.validate();
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  }
  if (a.cfg.repeats == 0) throw UsageError("--repeats must be positive");
  manifest.set_seed(a.cfg.seed);
  const Algorithm algo = a.algo == "mdla" ? Algorithm::mdla : Algorithm::ndri;
  const std::vector<SweepRow> rows = run_noise_sweep(a.cfg, algo, a.levels);
  manifest.write_output(a.out, io::format_sweep(rows));
  manifest.finish(a.out + ".manifest.jsonl");
  return 0;
}

// ---------------------------------------------------------------- dist
struct DistArgs {
  std::string ground = "chordal";
  std::string set = "wasserstein";
  std::string p = "1";
  bool require_metric = false;
  bool normalized = false;
  std::vector<std::string> files;
  std::string out;
};

int run_dist(const DistArgs& a, Manifest& manifest) {
  const std::optional<GroundDistance> g = parse_ground(a.ground);
  if (!g) throw UsageError("unknown --ground '" + a.ground + "'");
  if (a.require_metric && !is_true_metric(*g)) {
    throw UsageError("ground '" + a.ground + "' is not a metric on the Grassmannian; refused by --require-metric");
  }
  const SetMetric s = a.set == "hausdorff" ? SetMetric::hausdorff : SetMetric::wasserstein;
  const double p = parse_order(a.p);
  if (a.files.size() < 2) throw UsageError("dist needs at least two dictionary files");

  std::vector<Dictionary> dicts;
  for (const std::string& f : a.files) {
    manifest.add_input(f);
    dicts.push_back(io::parse_dictionary(io::read_file(f)));
  }
  const Eigen::Index dim = dicts.front().channels();
  auto value = [&](std::size_t i, std::size_t j) {
    const double d = dictionary_distance(dicts[i], dicts[j], *g, s, p);
    return a.normalized ? normalized_score(d, *g, dim) : d;
  };

  std::string text;
  if (dicts.size() == 2) {
    text = io::format_real(value(0, 1)) + "\n";
  } else {
    io::LabeledMatrix m;
    const auto n = static_cast<Eigen::Index>(dicts.size());
    m.values = Mat::Zero(n, n);
    if (a.normalized) m.values.diagonal().setConstant(100.0);
    for (std::size_t i = 0; i < dicts.size(); ++i) {
      m.labels.push_back(fs::path(a.files[i]).stem().string());
      for (std::size_t j = i + 1; j < dicts.size(); ++j) {
        const double v = value(i, j);
        m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        m.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    }
    text = io::format_matrix(m);
  }
  if (a.out.empty()) {
    std::cout << text;
  } else {
    manifest.write_output(a.out, text);
    manifest.finish(a.out + ".manifest.jsonl");
  }
  return 0;
}

// ---------------------------------------------------------------- cluster
struct ClusterArgs {
  std::string method;
  std::string input;
  std::vector<std::string> partitions;
  double sigma = 1.0;
  std::size_t neighbors = 10;
  std::size_t clusters = 0;
  std::string out;
};

int run_cluster(const ClusterArgs& a, Manifest& manifest) {
  if (a.method == "consensus") {
    if (a.partitions.empty()) throw UsageError("consensus needs --partitions");
    if (a.clusters == 0) throw UsageError("consensus needs --clusters");
    std::vector<Partition> parts;
    for (const std::string& f : a.partitions) {
      manifest.add_input(f);
      parts.push_back(io::parse_partition(io::read_file(f)));
    }
    if (a.clusters > parts.front().size()) throw UsageError("--clusters exceeds the number of points");
    const ConsensusResult r = consensus_ensemble(parts, a.clusters);
    std::cout << "mean_nmi " << io::format_real(r.mean_nmi) << "\n";
    manifest.write_output(with_suffix(a.out, ".partition.csv"), io::format_partition(r.partition));
    manifest.finish(with_suffix(a.out, ".manifest.jsonl"));
    return 0;
  }

  if (a.input.empty()) throw UsageError("--input distance matrix required for method " + a.method);
  manifest.add_input(a.input);
  const io::LabeledMatrix m = io::parse_matrix(io::read_file(a.input));
  validate_distance_matrix(m.values);
  const std::size_t n = m.labels.size();

  if (a.method == "ap") {
    const ApResult r = affinity_propagation(to_similarity(m.values, a.sigma));
    if (!r.converged) std::cerr << "warning: affinity propagation did not converge in " << r.iterations << " iterations\n";
    std::cout << "clusters " << r.partition.num_clusters() << "\n";
    manifest.write_output(with_suffix(a.out, ".partition.csv"), io::format_partition(r.partition));
  } else if (a.method == "hier") {
    const Dendrogram tree = hierarchical_hausdorff(m.values);
    manifest.write_output(with_suffix(a.out, ".merges.csv"), io::format_merges(tree));
    if (a.clusters > 0) {
      if (a.clusters > n) throw UsageError("--clusters exceeds the number of points");
      manifest.write_output(with_suffix(a.out, ".partition.csv"), io::format_partition(cut_dendrogram(tree, n, a.clusters)));
    }
  } else {
    if (a.neighbors >= n) throw UsageError("--neighbors must be smaller than the number of points");
    const Embedding e = laplacian_eigenmaps(m.values, a.neighbors, 2);
    if (e.disconnected) std::cerr << "warning: neighbour graph has " << e.components << " components\n";
    manifest.write_output(with_suffix(a.out, ".embedding.csv"), io::format_embedding(e));
  }
  manifest.finish(with_suffix(a.out, ".manifest.jsonl"));
  return 0;
}

// ---------------------------------------------------------------- plot
struct PlotArgs {
  std::string trace;
  std::vector<std::string> columns;
  std::string out;
};

int run_plot(const PlotArgs& a, Manifest& manifest) {
  manifest.add_input(a.trace);
  const std::vector<TraceRow> rows = io::parse_trace(io::read_file(a.trace));
  if (rows.empty()) throw Error("trace " + a.trace + " has no rows");
  std::vector<std::size_t> cols;
  for (const std::string& name : a.columns) {
    bool found = false;
    for (std::size_t c = 0; c < io::kTraceColumns; ++c) {
      if (io::trace_column_name(c) == name) {
        cols.push_back(c);
        found = true;
      }
    }
    if (!found) throw UsageError("unknown trace column '" + name + "'");
  }
  if (cols.empty()) {
    for (std::size_t c = 0; c < io::kTraceColumns; ++c) cols.push_back(c);
  }
  manifest.write_output(a.out, io::render_trace_svg(rows, cols));
  manifest.finish(a.out + ".manifest.jsonl");
  return 0;
}

// ---------------------------------------------------------------- frames
struct FramesArgs {
  std::string dict;
  std::size_t rip_order = 2;
  bool exact = false;
};

int run_frames_report(const FramesArgs& a) {
  const Dictionary dict = io::parse_dictionary(io::read_file(a.dict));
  const Frame frame = Frame::from_dictionary(dict);
  if (frame.size() < 2) throw UsageError("frame report needs at least two atoms");
  const auto k = static_cast<Eigen::Index>(a.rip_order);
  if (k < 1 || k > frame.size()) throw UsageError("--rip-order must lie in [1, atoms]");
  nlohmann::json report;
  report["elements"] = frame.size();
  report["dimension"] = frame.dimension();
  const EtfReport etf = is_equiangular_tight(frame);
  report["coherence"] = etf.coherence;
  if (frame.size() >= frame.dimension()) report["welch_bound"] = etf.welch;
  if (frame.size() >= frame.dimension()) report["welch_gap"] = etf.gap;
  try {
    const FrameBounds b = frame_operator_bounds(frame);
    report["frame_lower"] = b.lower;
    report["frame_upper"] = b.upper;
    report["tight"] = b.tight();
  } catch (const ContractError&) {
    const Vec sv = linops::singular_values(frame.elements());
    report["frame_lower"] = 0.0;
    report["frame_upper"] = sv.size() > 0 ? sv.maxCoeff() * sv.maxCoeff() : 0.0;
    report["tight"] = false;
  }
  report["equiangular_tight"] = etf.equiangular_tight;
  report["rip_order"] = k;
  report["rip_gershgorin"] = rip_gershgorin_bound(frame, k);
  if (a.exact) report["rip_exact"] = rip_constant_exact(frame, k);
  if (frame.size() >= frame.dimension()) report["etf_penalty"] = etf_penalty(frame);
  std::cout << report.dump() << "\n";
  return 0;
}

void add_synth_options(CLI::App* cmd, SynthConfig& cfg) {
  cmd->add_option("--atoms", cfg.atoms, "number of atoms M")->capture_default_str();
  cmd->add_option("--len", cfg.length, "samples per atom N")->capture_default_str();
  cmd->add_option("--channels", cfg.channels, "components per atom rho")->capture_default_str();
  cmd->add_option("--signals", cfg.signals, "training signals Q")->capture_default_str();
  cmd->add_option("--per-signal", cfg.atoms_per_signal, "atoms per training signal")->capture_default_str();
  cmd->add_flag("--rotate", cfg.rotate, "rotate every atom occurrence");
  cmd->add_option("--seed", cfg.seed, "base seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grassmannian distances between multivariate dictionaries"};
  app.set_version_flag("--version", GRASSDICT_VERSION);
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate an original dictionary and a training set");
  add_synth_options(gen_cmd, gen.cfg);
  gen_cmd->add_option("--snr", gen.snr, "per-signal SNR in dB (noiseless when omitted)");
  gen_cmd->add_option("--out", gen.out, "output prefix")->required();

  LearnArgs learn;
  CLI::App* learn_cmd = app.add_subcommand("learn", "learn a dictionary from a dataset");
  learn_cmd->add_option("--algo", learn.algo, "learning algorithm")->check(CLI::IsMember({"mdla", "ndri"}))->capture_default_str();
  learn_cmd->add_option("--atoms", learn.atoms, "atoms to learn")->capture_default_str();
  learn_cmd->add_option("--sparsity", learn.sparsity, "atoms per signal in the coding step")->capture_default_str();
  learn_cmd->add_option("--iters", learn.iters, "learning iterations")->capture_default_str();
  learn_cmd->add_option("--seed", learn.seed, "initialisation seed")->capture_default_str();
  learn_cmd->add_option("--data", learn.data, "mds-v1 dataset")->required()->check(CLI::ExistingFile);
  learn_cmd->add_option("--original", learn.original, "mdl-v1 reference dictionary for the trace")
      ->check(CLI::ExistingFile);
  learn_cmd->add_option("--out", learn.out, "output prefix")->required();

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "final-iteration averages over noise levels");
  add_synth_options(sweep_cmd, sweep.cfg);
  sweep_cmd->add_option("--algo", sweep.algo, "learning algorithm")->check(CLI::IsMember({"mdla", "ndri"}))->capture_default_str();
  sweep_cmd->add_option("--iters", sweep.cfg.iterations, "learning iterations")->capture_default_str();
  sweep_cmd->add_option("--repeats", sweep.cfg.repeats, "runs per noise level")->capture_default_str();
  sweep_cmd->add_option("--sparsity", sweep.cfg.sparsity, "atoms per signal in the coding step")->capture_default_str();
  sweep_cmd->add_option("--levels", sweep.levels, "SNR levels in dB; inf for noiseless")->delimiter(',');
  sweep_cmd->add_option("--out", sweep.out, "sweep CSV")->required();

  DistArgs dist;
  CLI::App* dist_cmd = app.add_subcommand("dist", "distances between dictionaries");
  dist_cmd->add_option("--ground", dist.ground, "ground distance between atoms")->capture_default_str();
  dist_cmd->add_option("--set", dist.set, "set metric")->check(CLI::IsMember({"hausdorff", "wasserstein"}))->capture_default_str();
  dist_cmd->add_option("--p", dist.p, "Wasserstein order, real > 0 or inf")->capture_default_str();
  dist_cmd->add_flag("--require-metric", dist.require_metric, "refuse grounds that are not metrics");
  dist_cmd->add_flag("--normalized", dist.normalized, "report scores in [0, 100]");
  dist_cmd->add_option("--out", dist.out, "output file (stdout when omitted)");
  dist_cmd->add_option("files", dist.files, "mdl-v1 dictionaries")->required()->check(CLI::ExistingFile);

  ClusterArgs cluster;
  CLI::App* cluster_cmd = app.add_subcommand("cluster", "cluster a distance matrix");
  cluster_cmd->add_option("--method", cluster.method, "clustering method")
      ->required()
      ->check(CLI::IsMember({"ap", "hier", "consensus", "eigenmaps"}));
  cluster_cmd->add_option("--input", cluster.input, "labeled distance-matrix CSV")->check(CLI::ExistingFile);
  cluster_cmd->add_option("--partitions", cluster.partitions, "partition CSVs for consensus")
      ->check(CLI::ExistingFile);
  cluster_cmd->add_option("--sigma", cluster.sigma, "Gaussian similarity width")->capture_default_str();
  cluster_cmd->add_option("--neighbors", cluster.neighbors, "nearest neighbours in the eigenmaps graph")->capture_default_str();
  cluster_cmd->add_option("--clusters", cluster.clusters, "cluster count for hier and consensus");
  cluster_cmd->add_option("--out", cluster.out, "output prefix")->required();

  PlotArgs plot;
  CLI::App* plot_cmd = app.add_subcommand("plot", "SVG line chart of a trace CSV");
  plot_cmd->add_option("trace", plot.trace, "trace CSV")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--columns", plot.columns, "subset of metric columns")->delimiter(',');
  plot_cmd->add_option("--out", plot.out, "SVG path")->required();

  FramesArgs frames;
  CLI::App* frames_cmd = app.add_subcommand("frames", "frame diagnostics");
  frames_cmd->require_subcommand(1);
  CLI::App* report_cmd = frames_cmd->add_subcommand("report", "coherence, Welch bound, frame bounds, RIP bound");
  report_cmd->add_option("--dict", frames.dict, "dictionary file")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--rip-order", frames.rip_order, "sparsity K of the RIP constants")->capture_default_str();
  report_cmd->add_flag("--exact", frames.exact, "also enumerate all subsets for the exact RIP constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    Manifest manifest(cmd->get_name(), argc, argv);
    for (const CLI::Option* opt : cmd->get_options()) {
      if (opt->count() > 0 && !opt->get_lnames().empty()) manifest.add_flag(opt->get_lnames().front(), opt->results());
    }
    if (cmd == gen_cmd) return run_gen(gen, manifest);
    if (cmd == learn_cmd) return run_learn(learn, manifest);
    if (cmd == sweep_cmd) return run_sweep(sweep, manifest);
    if (cmd == dist_cmd) return run_dist(dist, manifest);
    if (cmd == cluster_cmd) return run_cluster(cluster, manifest);
    if (cmd == plot_cmd) return run_plot(plot, manifest);
    return run_frames_report(frames);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
}
