#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "atomcover/descriptor.hpp"
#include "atomcover/descriptor_cache.hpp"
#include "atomcover/digest.hpp"
#include "atomcover/error.hpp"
#include "atomcover/evaluation.hpp"
#include "atomcover/extxyz.hpp"
#include "atomcover/info_theory.hpp"
#include "atomcover/report.hpp"
#include "atomcover/samplers.hpp"

namespace atomcover::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::size_t k = 32;
  double cutoff = 5.0;
  double bandwidth = 0.015;
  std::string format = "json";
  std::string cache_dir;
  int threads = 0;
  std::string report_path;
};

struct CompressOptions {
  std::string input;
  std::string output;
  std::string method = "msc";
  std::optional<double> fraction;
  std::optional<std::size_t> count;
  std::uint64_t seed = 0;
};

struct AnalyzeOptions {
  std::string input;
};

struct OverlapOptions {
  std::string query;
  std::string reference;
};

struct ForceCdfOptions {
  std::string input;
  std::string reference;
  std::vector<double> thresholds;
  std::size_t points = 256;
};

struct CompareOptions {
  std::string input;
  std::vector<double> fractions{0.1, 0.25, 0.5, 0.75};
  std::vector<std::string> methods{"all"};
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool descriptors) {
  if (descriptors) {
    cmd->add_option("--k", o.k, "Neighbors per environment")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    cmd->add_option("--cutoff", o.cutoff, "Cutoff radius in Angstrom")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bandwidth", o.bandwidth, "Kernel bandwidth in 1/Angstrom")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cache", o.cache_dir, "Directory for cached descriptors");
  }
  cmd->add_option("--format", o.format, "Report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-r,--report", o.report_path,
                  "Report file (standard output when omitted)");
  cmd->add_option("--threads", o.threads,
                  "Worker threads (results do not depend on it)")
      ->envname("ATOMCOVER_THREADS")
      ->check(CLI::NonNegativeNumber);
}

DescriptorParams descriptor_params(const CommonOptions& o) {
  return {o.k, o.cutoff};
}

KernelParams kernel_params(const CommonOptions& o) { return {o.bandwidth}; }

ReportParameters report_parameters(const CommonOptions& o) {
  ReportParameters p;
  p.k = o.k;
  p.cutoff = o.cutoff;
  p.bandwidth = o.bandwidth;
  return p;
}

DescriptorSet load_descriptors(const Dataset& dataset, const std::string& digest,
                               const CommonOptions& o) {
  const auto params = descriptor_params(o);
  if (o.cache_dir.empty()) return build_descriptor_set(dataset, params);

  const fs::path path = descriptor_cache_path(o.cache_dir, digest, params);
  if (std::ifstream in{path, std::ios::binary}) {
    if (auto cached = read_descriptor_cache(in, digest, params);
        cached && cached->structure_count() == dataset.size())
      return std::move(*cached);
  }
  auto descs = build_descriptor_set(dataset, params);
  fs::create_directories(o.cache_dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write descriptor cache " + path.string());
  write_descriptor_cache(descs, digest, out);
  return descs;
}

void emit(const ReportDocument& doc, const CommonOptions& o, std::ostream& out) {
  const auto format = parse_report_format(o.format);
  if (o.report_path.empty())
    write_report(doc, format, out);
  else
    write_report(doc, format, fs::path(o.report_path));
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

bool has_all_forces(const Dataset& d) {
  for (const auto& s : d.structures)
    if (!s.forces) return false;
  return !d.structures.empty();
}

MetricBlock msc_steps_block(const CompressionResult& result,
                            const ReportParameters& params) {
  MetricBlock block;
  block.name = "msc_steps";
  block.parameters = params;
  Table t;
  t.columns = {"step", "structure", "score", "max_delta_entropy",
               "structure_entropy"};
  for (std::size_t i = 0; i < result.msc_steps.size(); ++i) {
    const auto& s = result.msc_steps[i];
    t.rows.push_back({static_cast<std::int64_t>(i),
                      static_cast<std::int64_t>(s.structure), s.score,
                      std::isnan(s.max_delta_entropy) ? TableCell(std::string())
                                                      : TableCell(s.max_delta_entropy),
                      s.structure_entropy});
  }
  block.table = std::move(t);
  return block;
}

void cmd_compress(const CompressOptions& c, const CommonOptions& o,
                  std::ostream& out) {
  if (c.fraction.has_value() == c.count.has_value())
    throw InputError("exactly one of --fraction or --count is required");
  const auto method = parse_sampler_method(c.method);
  const std::string digest = file_sha256_hex(c.input);
  const Dataset dataset = read_extxyz(fs::path(c.input));
  if (dataset.size() == 0) throw InputError("input has no frames");

  SamplerConfig config;
  config.method = method;
  config.seed = c.seed;
  config.kernel = kernel_params(o);
  config.descriptor = descriptor_params(o);
  config.target_count = c.fraction ? fraction_to_count(*c.fraction, dataset.size())
                                   : *c.count;

  // Random sampling needs no descriptors, but the report does.
  const DescriptorSet descs = load_descriptors(dataset, digest, o);
  const CompressionResult result = run_sampler(descs, config);
  write_extxyz(dataset, result.selected, fs::path(c.output));

  ReportDocument doc;
  doc.input_digest = digest;
  doc.parameters = report_parameters(o);
  doc.parameters.seed = c.seed;
  doc.parameters.method = c.method;
  doc.parameters.fraction = c.fraction;
  doc.parameters.count = config.target_count;
  auto block = to_metric_block(compression_report(descs, result.selected, config.kernel),
                               doc.parameters);
  block.values["selected"] = result.selected;
  doc.blocks.push_back(std::move(block));
  if (method == SamplerMethod::kMsc)
    doc.blocks.push_back(msc_steps_block(result, doc.parameters));
  if (has_all_forces(dataset)) {
    const auto thresholds = default_force_thresholds(dataset);
    auto full_cdf = to_metric_block(
        force_cdf(dataset, all_indices(dataset.size()), thresholds), doc.parameters);
    full_cdf.name = "force_cdf_full";
    auto compressed_cdf =
        to_metric_block(force_cdf(dataset, result.selected, thresholds), doc.parameters);
    compressed_cdf.name = "force_cdf_compressed";
    doc.blocks.push_back(std::move(full_cdf));
    doc.blocks.push_back(std::move(compressed_cdf));
  }
  emit(doc, o, out);
}

void cmd_analyze(const AnalyzeOptions& a, const CommonOptions& o,
                 std::ostream& out) {
  const std::string digest = file_sha256_hex(a.input);
  const Dataset dataset = read_extxyz(fs::path(a.input));
  if (dataset.size() == 0) throw InputError("input has no frames");
  const DescriptorSet descs = load_descriptors(dataset, digest, o);
  const KernelParams kernel = kernel_params(o);

  const auto h = entropy(descs.values, kernel);
  const double log_n = std::log(static_cast<double>(h.n_env));
  ReportDocument doc;
  doc.input_digest = digest;
  doc.parameters = report_parameters(o);
  MetricBlock block;
  block.name = "analysis";
  block.parameters = doc.parameters;
  block.values["structures"] = descs.structure_count();
  block.values["environments"] = h.n_env;
  block.values["entropy_nats"] = h.entropy_nats;
  block.values["max_entropy_nats"] = log_n;
  block.values["diversity_nats"] = diversity_from_self_dh(h.per_point_dh);
  block.values["efficiency"] =
      h.n_env >= 2 ? nlohmann::ordered_json(h.entropy_nats / log_n)
                   : nlohmann::ordered_json(nullptr);
  block.values["per_structure_entropy_nats"] = per_structure_entropy(descs, kernel);
  doc.blocks.push_back(std::move(block));
  emit(doc, o, out);
}

void cmd_overlap(const OverlapOptions& v, const CommonOptions& o,
                 std::ostream& out) {
  const std::string query_digest = file_sha256_hex(v.query);
  const std::string ref_digest = file_sha256_hex(v.reference);
  const Dataset query = read_extxyz(fs::path(v.query));
  const Dataset ref = read_extxyz(fs::path(v.reference));
  if (query.size() == 0 || ref.size() == 0) throw InputError("input has no frames");
  const auto q = load_descriptors(query, query_digest, o);
  const auto r = load_descriptors(ref, ref_digest, o);

  const auto dh = delta_entropy(q.values, r.values, kernel_params(o));
  std::size_t contained = 0, above_10 = 0;
  for (double x : dh) {
    contained += x <= 0.0;
    above_10 += x > 10.0;
  }
  const auto hist = histogram_delta_entropy(dh);

  ReportDocument doc;
  doc.input_digest = query_digest + ":" + ref_digest;
  doc.parameters = report_parameters(o);
  MetricBlock block;
  block.name = "overlap";
  block.parameters = doc.parameters;
  block.values["query_environments"] = q.environment_count();
  block.values["reference_environments"] = r.environment_count();
  block.values["overlap"] =
      static_cast<double>(contained) / static_cast<double>(dh.size());
  block.values["uncovered_environments"] = dh.size() - contained;
  block.values["environments_dh_above_10"] = above_10;
  block.values["delta_entropy_histogram"] = {{"edges", hist.edges},
                                             {"counts", hist.counts},
                                             {"below", hist.below},
                                             {"above", hist.above}};
  doc.blocks.push_back(std::move(block));
  emit(doc, o, out);
}

void cmd_force_cdf(const ForceCdfOptions& f, const CommonOptions& o,
                   std::ostream& out) {
  const Dataset dataset = read_extxyz(fs::path(f.input));
  if (dataset.size() == 0) throw InputError("input has no frames");
  std::vector<double> thresholds = f.thresholds;
  if (thresholds.empty()) {
    const Dataset grid_source =
        f.reference.empty() ? dataset : read_extxyz(fs::path(f.reference));
    thresholds = default_force_thresholds(grid_source, f.points);
  }
  ReportDocument doc;
  doc.input_digest = file_sha256_hex(f.input);
  doc.parameters = report_parameters(o);
  doc.blocks.push_back(to_metric_block(
      force_cdf(dataset, all_indices(dataset.size()), thresholds), doc.parameters));
  emit(doc, o, out);
}

void cmd_compare(const CompareOptions& c, const CommonOptions& o,
                 std::ostream& out) {
  std::vector<SamplerMethod> methods;
  for (const auto& m : c.methods) {
    if (m == "all") {
      methods = {SamplerMethod::kRandom, SamplerMethod::kKMeans,
                 SamplerMethod::kFps, SamplerMethod::kMsc};
      break;
    }
    methods.push_back(parse_sampler_method(m));
  }
  for (double f : c.fractions)
    if (!(f > 0.0 && f <= 1.0)) throw InputError("fractions must lie in (0, 1]");

  const std::string digest = file_sha256_hex(c.input);
  const Dataset dataset = read_extxyz(fs::path(c.input));
  if (dataset.size() == 0) throw InputError("input has no frames");
  const auto descs = load_descriptors(dataset, digest, o);
  const auto sweep = compare_methods(descs, c.fractions, methods, c.seed,
                                     kernel_params(o));
  ReportDocument doc;
  doc.input_digest = digest;
  doc.parameters = report_parameters(o);
  doc.parameters.seed = c.seed;
  doc.parameters.method = "sweep";
  doc.blocks.push_back(to_metric_block(sweep, doc.parameters));
  emit(doc, o, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compress atomistic datasets by greedy set cover over "
               "atom-centered environments, and measure what was kept."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonOptions common;
  CompressOptions compress;
  AnalyzeOptions analyze;
  OverlapOptions overlap_opts;
  ForceCdfOptions cdf;
  CompareOptions compare;

  auto* c = app.add_subcommand("compress", "Select a subset of structures");
  c->add_option("input", compress.input, "Extended-XYZ dataset")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("-o,--output", compress.output, "Compressed extended-XYZ file")
      ->required();
  c->add_option("--method", compress.method, "random, kmeans, fps or msc")
      ->capture_default_str()
      ->check(CLI::IsMember({"random", "kmeans", "fps", "msc"}));
  auto* frac = c->add_option("--fraction", compress.fraction,
                             "Fraction of structures to keep, in (0, 1]");
  auto* count = c->add_option("--count", compress.count, "Structures to keep");
  frac->excludes(count);
  c->add_option("--seed", compress.seed, "Random seed")->capture_default_str();
  add_common(c, common, true);

  auto* a = app.add_subcommand("analyze", "Entropy, diversity and efficiency");
  a->add_option("input", analyze.input)->required()->check(CLI::ExistingFile);
  add_common(a, common, true);

  auto* v = app.add_subcommand("overlap", "Overlap of a query set with a reference");
  v->add_option("query", overlap_opts.query)->required()->check(CLI::ExistingFile);
  v->add_option("reference", overlap_opts.reference)
      ->required()
      ->check(CLI::ExistingFile);
  add_common(v, common, true);

  auto* f = app.add_subcommand("force-cdf", "CDF of per-atom force magnitudes");
  f->add_option("input", cdf.input)->required()->check(CLI::ExistingFile);
  f->add_option("--thresholds", cdf.thresholds, "Comma-separated thresholds in eV/A")
      ->delimiter(',');
  f->add_option("--reference", cdf.reference,
                "Dataset whose force distribution sets the default grid")
      ->check(CLI::ExistingFile);
  f->add_option("--points", cdf.points, "Default grid size")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  add_common(f, common, false);

  auto* s = app.add_subcommand("compare", "Sweep methods over fractions");
  s->add_option("input", compare.input)->required()->check(CLI::ExistingFile);
  s->add_option("--fractions", compare.fractions)->delimiter(',')->capture_default_str();
  s->add_option("--methods", compare.methods, "Comma-separated methods or 'all'")
      ->delimiter(',')
      ->capture_default_str();
  s->add_option("--seed", compare.seed)->capture_default_str();
  add_common(s, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidFlags;
  }

  if (common.threads > 0) omp_set_num_threads(common.threads);

  try {
    if (c->parsed()) cmd_compress(compress, common, out);
    if (a->parsed()) cmd_analyze(analyze, common, out);
    if (v->parsed()) cmd_overlap(overlap_opts, common, out);
    if (f->parsed()) cmd_force_cdf(cdf, common, out);
    if (s->parsed()) cmd_compare(compare, common, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const GeometryError& e) {
    err << "degenerate geometry: " << e.what() << '\n';
    return kDegenerateGeometry;
  } catch (const CellError& e) {
    err << "degenerate geometry: " << e.what() << '\n';
    return kDegenerateGeometry;
  } catch (const InputError& e) {
    err << "invalid arguments: " << e.what() << '\n';
    return kInvalidFlags;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace atomcover::cli
