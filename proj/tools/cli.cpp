#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "meshpress/codec.hpp"
#include "meshpress/mesh_io.hpp"
#include "meshpress/metrics.hpp"
#include "meshpress/wavelet.hpp"

namespace meshpress::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string input;
  std::string output;
  std::string other;
  int q_max = kDefaultQMax;
  std::uint64_t threshold = kDefaultThreshold;
  double gamma = 0.25;
  bool no_wgc = false;
  bool no_lifting = false;
  bool no_adaptive = false;
  int levels = kDefaultMaxLevels;
  int level = -1;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  bool csv = false;
  std::string csv_path;
  std::string dump_levels;
  std::string dump_coeffs;
};

CodecConfig codec_config(const Options& o) {
  CodecConfig c;
  c.q_max = o.q_max;
  c.threshold = o.threshold;
  c.wgc.enabled = !o.no_wgc;
  c.wgc.gamma = o.gamma;
  c.lifting = !o.no_lifting;
  c.adaptive = !o.no_adaptive;
  c.max_levels = o.levels;
  return c;
}

// An explicit --seed wins over MESHPRESS_SEED, which wins over the default.
SamplingOptions sampling(const Options& o, const TriMesh& reference) {
  SamplingOptions s;
  if (o.seed) {
    s.seed = *o.seed;
  } else if (const char* env = std::getenv("MESHPRESS_SEED"); env && *env) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw CLI::ValidationError("MESHPRESS_SEED", std::string("not an integer: ") + env);
    s.seed = v;
  }
  if (o.samples > 0) s.samples_per_unit_area = density_for(reference, o.samples);
  return s;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void dump_levels(const std::vector<LevelRecord>& records, const TriMesh& mesh, const fs::path& dir) {
  fs::create_directories(dir);
  const auto count = records.size();
  // level_0.off is the base mesh, level_<count>.off the input.
  for (std::size_t j = 0; j <= count; ++j) {
    const TriMesh& m = j == count ? mesh : records[count - 1 - j].coarse;
    save_mesh(dir / ("level_" + std::to_string(j) + ".off"), m, MeshFormat::Off);
  }
}

void dump_coeffs(const std::vector<LevelRecord>& records, const TriMesh& mesh, bool lifting, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "level,vertex,dx,dy,dz,norm\n" << std::setprecision(9);
  const auto count = records.size();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& record = records[i];
    const TriMesh& fine = i == 0 ? mesh : records[i - 1].coarse;
    const auto c = analyze(record, fine.vertices(), lifting);
    for (std::size_t k = 0; k < c.details.size(); ++k) {
      const Vec3& d = c.details[k];
      out << count - i << ',' << c.odd_vertices[k] << ',' << d.x() << ',' << d.y() << ',' << d.z() << ','
          << d.norm() << '\n';
    }
  }
}

int cmd_encode(const Options& o, std::ostream& out) {
  const TriMesh mesh = load_mesh(o.input);
  const CodecConfig config = codec_config(o);
  const auto result = encode(mesh, config);
  write_bytes(o.output, result.bytes);

  if (!o.dump_levels.empty() || !o.dump_coeffs.empty()) {
    const auto records = build_hierarchy(mesh, config.wgc, config.max_levels);
    if (!o.dump_levels.empty()) dump_levels(records, mesh, o.dump_levels);
    if (!o.dump_coeffs.empty()) dump_coeffs(records, mesh, config.lifting, o.dump_coeffs);
  }

  const auto& r = result.report;
  const auto n = mesh.vertex_count();
  out << std::fixed << std::setprecision(4);
  out << "total_bpv=" << bpv(r.total_bits(), n) << '\n';
  out << "geometry_bpv=" << bpv(r.geometry_bits(), n) << '\n';
  out << "connectivity_bpv=" << bpv(r.connectivity_bits(), n) << '\n';
  out << "overhead_bpv=" << bpv(r.overhead_bits(), n) << '\n';
  out << "levels=" << r.chunks.size() - 1 << '\n';
  out << "bytes=" << result.bytes.size() << '\n';
  out << "base_vertices=" << r.chunks.front().vertices << '\n';
  out << "vertices=" << n << '\n';
  return kExitOk;
}

int cmd_decode(const Options& o, std::ostream& out, std::ostream& err) {
  const auto bytes = read_bytes(o.input);
  const auto result = decode(bytes, o.level < 0 ? kAllLevels : o.level);
  save_mesh(o.output, result.mesh);
  out << "level=" << result.level << " vertices=" << result.mesh.vertex_count()
      << " faces=" << result.mesh.face_count() << '\n';
  if (result.truncated) {
    err << "meshpress: " << result.message << '\n';
    return kExitTruncated;
  }
  return kExitOk;
}

int cmd_metric(const Options& o, std::ostream& out) {
  const TriMesh a = load_mesh(o.input);
  const TriMesh b = load_mesh(o.other);
  const auto d = sampled_distance(a, b, sampling(o, a));
  out << std::setprecision(9);
  if (o.csv) {
    out << "rms_norm,max_norm,samples\n" << d.rms << ',' << d.max_dist << ',' << d.sample_count << '\n';
  } else {
    out << "rms=" << d.rms << " max=" << d.max_dist << " samples=" << d.sample_count << '\n';
  }
  return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
  const TriMesh mesh = load_mesh(o.input);
  const auto curve = rd_curve(mesh, codec_config(o), sampling(o, mesh));
  std::ostringstream csv;
  csv << "level,bytes,bpv,rms_norm,max_norm\n" << std::setprecision(9);
  for (const auto& p : curve) {
    csv << p.level << ',' << p.bytes << ',' << p.bpv << ',' << p.distortion.rms << ',' << p.distortion.max_dist
        << '\n';
  }
  if (o.csv_path.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(o.csv_path);
    if (!file) throw std::runtime_error("cannot write " + o.csv_path);
    file << csv.str();
  }
  return kExitOk;
}

int cmd_info(const Options& o, std::ostream& out) {
  const auto bytes = read_bytes(o.input);
  const auto info = read_info(bytes);
  const auto& h = info.header;
  out << std::setprecision(17);
  out << "version=" << h.version << '\n';
  out << "q_max=" << int{h.q_max} << '\n';
  out << "threshold=" << h.threshold << '\n';
  out << "lifting=" << (h.lifting() ? "on" : "off") << '\n';
  out << "wgc=" << (h.wgc() ? "on" : "off") << '\n';
  out << "gamma=" << h.gamma << '\n';
  out << "adaptive=" << (h.adaptive() ? "on" : "off") << '\n';
  out << "origin=" << h.origin.x() << ',' << h.origin.y() << ',' << h.origin.z() << '\n';
  out << "scale=" << h.scale.x() << ',' << h.scale.y() << ',' << h.scale.z() << '\n';
  out << "base_vertices=" << h.base_vertices << '\n';
  out << "base_faces=" << h.base_faces << '\n';
  out << "levels=" << h.level_count << '\n';
  out << "final_vertices=" << h.final_vertices << '\n';
  out << "final_faces=" << h.final_faces << '\n';
  out << "chunk_bytes=";
  for (std::size_t i = 0; i < info.chunk_bytes.size(); ++i) out << (i ? "," : "") << info.chunk_bytes[i];
  out << '\n';
  out << "total_bytes=" << info.total_bytes << '\n';
  out << "encode_flags=--qmax " << int{h.q_max} << " --threshold " << h.threshold << " --gamma " << h.gamma
      << " --levels " << h.level_count << (h.wgc() ? "" : " --no-wgc") << (h.lifting() ? "" : " --no-lifting")
      << (h.adaptive() ? "" : " --no-adaptive") << '\n';
  return kExitOk;
}

void add_codec_flags(CLI::App* app, Options& o) {
  app->add_option("--qmax", o.q_max, "Grid bits")->check(CLI::Range(kMinPrecision, kMaxGridBits));
  app->add_option("--threshold", o.threshold, "Squared grid distance that makes a precision sufficient");
  app->add_option("--gamma", o.gamma, "WGC bound as a fraction of the parent edge")
      ->check(CLI::PositiveNumber);
  app->add_flag("--no-wgc", o.no_wgc, "Disable the wavelet geometric criterion");
  app->add_flag("--no-lifting", o.no_lifting, "Plain midpoint prediction without the update step");
  app->add_flag("--no-adaptive", o.no_adaptive, "Pin every vertex to q_max bits");
  app->add_option("--levels", o.levels, "Maximum hierarchy depth")->check(CLI::Range(0, 64));
}

void add_sampling_flags(CLI::App* app, Options& o) {
  app->add_option("--samples", o.samples, "Approximate sample count (default: 10 per face)");
  app->add_option("--seed", o.seed, "Sampling seed (default: MESHPRESS_SEED or 1)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Progressive wavelet compression for irregular triangle meshes", "meshpress"};
  app.require_subcommand(1);

  auto* enc = app.add_subcommand("encode", "Compress a mesh to a .pmc stream");
  enc->add_option("input", o.input, "Mesh (.obj, .off, .ply)")->required();
  enc->add_option("output", o.output, "Stream file")->required();
  add_codec_flags(enc, o);
  enc->add_option("--dump-levels", o.dump_levels, "Write every hierarchy level as OFF into this directory");
  enc->add_option("--dump-coeffs", o.dump_coeffs, "Write detail vectors per level as CSV");

  auto* dec = app.add_subcommand("decode", "Reconstruct a mesh from a stream or a prefix of it");
  dec->add_option("input", o.input, "Stream file")->required();
  dec->add_option("output", o.output, "Mesh (.obj, .off, .ply)")->required();
  dec->add_option("--level", o.level, "Stop after this many refinement levels")->check(CLI::NonNegativeNumber);

  auto* met = app.add_subcommand("metric", "Sampled surface distance of a mesh against a reference");
  met->add_option("reference", o.input, "Reference mesh")->required();
  met->add_option("mesh", o.other, "Compared mesh")->required();
  add_sampling_flags(met, o);
  met->add_flag("--csv", o.csv, "Machine-readable output");

  auto* bench = app.add_subcommand("bench", "Rate-distortion curve, one CSV row per level");
  bench->add_option("input", o.input, "Mesh")->required();
  add_codec_flags(bench, o);
  add_sampling_flags(bench, o);
  bench->add_option("--csv", o.csv_path, "Write the CSV here instead of stdout");

  auto* info = app.add_subcommand("info", "Print a stream's header and chunk table");
  info->add_option("input", o.input, "Stream file")->required();

  std::vector<std::string> argv_storage{"meshpress"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "meshpress: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (enc->parsed()) return cmd_encode(o, out);
    if (dec->parsed()) return cmd_decode(o, out, err);
    if (met->parsed()) return cmd_metric(o, out);
    if (bench->parsed()) return cmd_bench(o, out);
    return cmd_info(o, out);
  } catch (const StreamError& e) {
    err << "meshpress: " << e.what() << '\n';
    return e.kind() == StreamErrorKind::Truncated ? kExitTruncated : kExitInvalid;
  } catch (const std::exception& e) {
    err << "meshpress: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace meshpress::cli
