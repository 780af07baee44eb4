#include "wiener/development.hpp"

#include <chrono>
#include <cstdio>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wiener/errors.hpp"

namespace wiener {

double energy_flat(const FlatPiecewisePath& path) {
  double e = 0.0;
  for (int i = 1; i <= path.partition->segments(); ++i) {
    const Vec d = path.increment(i);
    e += dot(d, d) / path.partition->step(i);
  }
  return e;
}

double energy_curved(const Manifold& manifold, const CurvedPiecewisePath& path) {
  double e = 0.0;
  for (int i = 1; i <= path.partition->segments(); ++i) {
    const TangentVector& v = path.velocities[static_cast<std::size_t>(i - 1)];
    e += manifold.inner(v, v) * path.partition->step(i);
  }
  return e;
}

namespace {

void check_flat(const Manifold& manifold, const FlatPiecewisePath& path) {
  if (!path.partition) throw DomainError("flat path has no partition");
  if (static_cast<int>(path.vertices.size()) != path.partition->segments() + 1) {
    throw DomainError("flat path vertex count differs from partition");
  }
  for (const Vec& v : path.vertices) {
    if (v.size() != manifold.dimension()) throw DomainError("flat path dimension differs from manifold dimension");
  }
}

Vec frame_combination(const std::vector<TangentVector>& frame, const Vec& coefficients, int size) {
  Vec out(size, 0.0);
  for (std::size_t k = 0; k < frame.size(); ++k) out += frame[k].components * coefficients[static_cast<int>(k)];
  return out;
}

}  // namespace

CurvedPiecewisePath develop(const Manifold& manifold, const FlatPiecewisePath& path, const ManifoldPoint& x0) {
  manifold.require_point(x0);
  check_flat(manifold, path);
  const int n = path.partition->segments();
  CurvedPiecewisePath out;
  out.partition = path.partition;
  out.vertices.reserve(static_cast<std::size_t>(n) + 1);
  out.velocities.reserve(static_cast<std::size_t>(n));
  out.frames.reserve(static_cast<std::size_t>(n) + 1);
  out.vertices.push_back(x0);
  out.frames.push_back(manifold.standard_frame(x0));
  for (int i = 1; i <= n; ++i) {
    const ManifoldPoint& x = out.vertices.back();
    const std::vector<TangentVector>& frame = out.frames.back();
    const TangentVector step{x, frame_combination(frame, path.increment(i), manifold.tangent_size())};
    std::vector<TangentVector> next;
    next.reserve(frame.size());
    for (const TangentVector& e : frame) next.push_back(manifold.parallel_transport(x, step, e));
    TangentVector v = step;
    v.components *= 1.0 / path.partition->step(i);
    out.vertices.push_back(manifold.exp_map(x, step));
    out.velocities.push_back(std::move(v));
    out.frames.push_back(std::move(next));
  }
  return out;
}

FlatPiecewisePath antidevelop(const Manifold& manifold, const CurvedPiecewisePath& path) {
  const int n = path.partition->segments();
  if (static_cast<int>(path.velocities.size()) != n || static_cast<int>(path.vertices.size()) != n + 1) {
    throw DomainError("curved path sizes differ from partition");
  }
  FlatPiecewisePath out{path.partition, {}};
  out.vertices.reserve(static_cast<std::size_t>(n) + 1);
  out.vertices.emplace_back(manifold.dimension(), 0.0);
  std::vector<TangentVector> frame = manifold.standard_frame(path.start());
  for (int i = 1; i <= n; ++i) {
    const ManifoldPoint& x = path.vertices[static_cast<std::size_t>(i - 1)];
    TangentVector step = path.velocities[static_cast<std::size_t>(i - 1)];
    step.components *= path.partition->step(i);
    Vec inc(manifold.dimension(), 0.0);
    for (int k = 0; k < manifold.dimension(); ++k) inc[k] = manifold.inner(step, frame[static_cast<std::size_t>(k)]);
    out.vertices.push_back(out.vertices.back() + inc);
    for (TangentVector& e : frame) e = manifold.parallel_transport(x, step, e);
  }
  return out;
}

double frame_orthonormality_residual(const Manifold& manifold, const CurvedPiecewisePath& path) {
  double worst = 0.0;
  for (const auto& frame : path.frames) {
    for (std::size_t a = 0; a < frame.size(); ++a) {
      for (std::size_t b = 0; b < frame.size(); ++b) {
        const double g = manifold.inner(frame[a], frame[b]) - (a == b ? 1.0 : 0.0);
        worst = std::max(worst, std::abs(g));
      }
    }
  }
  return worst;
}

double flat_gaussian_log_density(const FlatPiecewisePath& path) {
  const int m = path.dimension();
  double log_norm = 0.0;
  for (int i = 1; i <= path.partition->segments(); ++i) log_norm += std::log(2.0 * std::numbers::pi * path.partition->step(i));
  return -0.5 * energy_flat(path) - 0.5 * m * log_norm;
}

double flat_gaussian_density(const FlatPiecewisePath& path) { return std::exp(flat_gaussian_log_density(path)); }

FlatPiecewisePath sample_flat_gaussian(const PartitionPtr& partition, int dimension, Rng& rng) {
  if (dimension < 1 || dimension > kMaxDim) throw DomainError("sample_flat_gaussian: bad dimension");
  FlatPiecewisePath out{partition, {}};
  out.vertices.reserve(static_cast<std::size_t>(partition->segments()) + 1);
  out.vertices.emplace_back(dimension, 0.0);
  for (int i = 1; i <= partition->segments(); ++i) {
    const double sd = std::sqrt(partition->step(i));
    Vec next = out.vertices.back();
    for (int k = 0; k < dimension; ++k) next[k] += sd * standard_normal(rng);
    out.vertices.push_back(next);
  }
  return out;
}

GeometricMeasureSampler::GeometricMeasureSampler(Manifold manifold, ManifoldPoint base, PartitionPtr partition)
    : manifold_(std::move(manifold)), base_(std::move(base)), partition_(std::move(partition)) {
  manifold_.require_point(base_);
  if (!partition_) throw DomainError("geometric sampler needs a partition");
}

CurvedPiecewisePath GeometricMeasureSampler::sample(Rng& rng) const {
  return develop(manifold_, sample_flat_gaussian(partition_, manifold_.dimension(), rng), base_);
}

PathFunctional transfer(const Manifold& manifold, FlatFunctional f) {
  std::string name = "transfer:" + f.name;
  return {std::move(name), [manifold, f = std::move(f)](const CurvedPiecewisePath& p) { return f(antidevelop(manifold, p)); }, nullptr};
}

FlatFunctional inverse_transfer(const Manifold& manifold, const ManifoldPoint& x0, PathFunctional f) {
  std::string name = "inverse_transfer:" + f.name;
  return {std::move(name), [manifold, x0, f = std::move(f)](const FlatPiecewisePath& a) { return f(develop(manifold, a, x0)); }};
}

FlatFunctional flat_energy_functional() {
  return {"energy", [](const FlatPiecewisePath& a) { return energy_flat(a); }};
}

EstimateReport geometric_expectation_mc(const GeometricMeasureSampler& sampler, const PathFunctional& f,
                                        const McSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> values = draw_samples(settings.samples, settings.seed, settings.workers, [&]() -> SampleFn {
    return [&sampler, &f](Rng& rng) { return f(sampler.sample(rng)); };
  });
  const SampleSummary sum = summarize(values);
  EstimateReport r;
  r.estimate = sum.mean;
  r.std_error = sum.std_error;
  r.samples = sum.count;
  r.rejected = sum.rejected;
  r.segments = sampler.partition()->segments();
  r.mesh = sampler.partition()->mesh();
  r.manifold = sampler.manifold().name();
  r.scheme = "geometric";
  r.functional = f.name;
  r.method = "mc";
  r.seed = settings.seed;
  r.workers = settings.workers;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

GeometricLimitTable geometric_limit_estimate(const PathFunctional& f, const HeatKernel& kernel, const ManifoldPoint& x0,
                                             const RefinementChain& chain, const std::vector<std::size_t>& samples,
                                             std::uint64_t seed, int workers, bool cross_check) {
  if (chain.size() < 3) throw DomainError("geometric_limit_estimate needs at least three levels");
  if (samples.empty() || (samples.size() != 1 && samples.size() != chain.size())) {
    throw DomainError("geometric_limit_estimate: budget list must have one entry or one per level");
  }
  const Manifold& mf = kernel.manifold();
  // The geometric scheme draws from its own seed family so the cross-check
  // column is statistically independent of it.
  const std::uint64_t geo_seed = splitmix64(seed ^ 0x6a09e667f3bcc909ull);
  GeometricLimitTable table;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const McSettings s{samples.size() == 1 ? samples[0] : samples[k], level_seed(geo_seed, k), workers};
    EstimateReport r = geometric_expectation_mc(GeometricMeasureSampler(mf, x0, chain[k]), f, s);
    r.seed = seed;
    table.geometric.push_back(std::move(r));
  }
  if (cross_check) {
    const CylinderMeasure measure(kernel, x0, chain[0]);
    table.cylinder = limit_estimate(discretize_family(f, mf, chain), measure, samples, seed, workers).levels;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const double se = std::hypot(table.geometric[k].std_error, table.cylinder[k].std_error);
      const double diff = table.geometric[k].estimate - table.cylinder[k].estimate;
      table.joint_z.push_back(se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff)));
    }
  }
  return table;
}

std::string manifold_spec(const Manifold& manifold) {
  std::ostringstream os;
  os.precision(17);
  switch (manifold.kind()) {
    case ManifoldKind::Circle: os << "circle " << manifold.radius(); break;
    case ManifoldKind::Sphere2: os << "sphere " << manifold.radius(); break;
    case ManifoldKind::Euclidean: os << "euclidean " << manifold.dimension(); break;
    case ManifoldKind::FlatTorus:
      os << "torus";
      for (double r : manifold.radii()) os << ' ' << r;
      break;
  }
  return os.str();
}

Manifold parse_manifold_spec(const std::string& spec) {
  std::istringstream is(spec);
  std::string kind;
  is >> kind;
  std::vector<double> params;
  double x = 0.0;
  while (is >> x) params.push_back(x);
  if (!is.eof()) throw ConfigError("manifold spec has a non-numeric parameter: " + spec);
  try {
    if (kind == "circle" && params.size() == 1) return Manifold::circle(params[0]);
    if (kind == "sphere" && params.size() == 1) return Manifold::sphere(params[0]);
    if (kind == "torus" && !params.empty()) return Manifold::flat_torus(params);
    if (kind == "euclidean" && params.size() == 1 && params[0] == std::floor(params[0])) {
      return Manifold::euclidean(static_cast<int>(params[0]));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid manifold: ") + e.what());
  }
  throw ConfigError("unrecognized manifold spec: " + spec);
}

namespace {

void write_vec(std::ostream& out, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out << (i ? " " : "") << buf;
  }
  out << '\n';
}

void write_header(std::ostream& out, const Manifold& manifold, const ManifoldPoint& base, const char* kind,
                  const Partition& partition) {
  out << "manifold " << manifold_spec(manifold) << '\n';
  out << "kind " << kind << '\n';
  out << "base ";
  write_vec(out, base.coords);
  out << "times ";
  for (std::size_t i = 0; i < partition.times().size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", partition.times()[i]);
    out << (i ? " " : "") << buf;
  }
  out << "\nvertices\n";
}

std::vector<double> parse_numbers(const std::string& line, int line_no) {
  std::istringstream is(line);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError("path file line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    v.push_back(x);
  }
  return v;
}

Vec to_vec(const std::vector<double>& v, int line_no) {
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) {
    throw ConfigError("path file line " + std::to_string(line_no) + ": bad vector length");
  }
  Vec out(static_cast<int>(v.size()), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

std::string after_key(const std::string& line, const std::string& key, int line_no) {
  if (line.rfind(key + " ", 0) != 0 && line != key) {
    throw ConfigError("path file line " + std::to_string(line_no) + ": expected '" + key + "'");
  }
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

}  // namespace

void write_flat_path(std::ostream& out, const Manifold& manifold, const ManifoldPoint& base, const FlatPiecewisePath& path) {
  check_flat(manifold, path);
  write_header(out, manifold, base, "flat", *path.partition);
  for (const Vec& v : path.vertices) write_vec(out, v);
  if (!out) throw IoError("failed to write path file");
}

void write_curved_path(std::ostream& out, const Manifold& manifold, const CurvedPiecewisePath& path) {
  // Readers rebuild each segment as the minimizing geodesic between vertices.
  for (int i = 1; i <= path.partition->segments(); ++i) {
    const double length = manifold.norm(path.velocities[static_cast<std::size_t>(i - 1)]) * path.partition->step(i);
    if (length >= manifold.injectivity_radius()) {
      throw DomainError("segment " + std::to_string(i) + " is not minimizing and cannot be stored by its vertices");
    }
  }
  write_header(out, manifold, path.start(), "curved", *path.partition);
  for (const ManifoldPoint& x : path.vertices) write_vec(out, x.coords);
  if (!out) throw IoError("failed to write path file");
}

PathFile read_path_file(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.size() < 6) throw ConfigError("path file is truncated");
  const Manifold mf = parse_manifold_spec(after_key(lines[0], "manifold", 1));
  const std::string kind = after_key(lines[1], "kind", 2);
  if (kind != "flat" && kind != "curved") throw ConfigError("path file kind must be flat or curved");
  ManifoldPoint base;
  try {
    base = mf.point(to_vec(parse_numbers(after_key(lines[2], "base", 3), 3), 3));
    PartitionPtr part = make_partition(Partition(parse_numbers(after_key(lines[3], "times", 4), 4)));
    after_key(lines[4], "vertices", 5);
    const std::size_t count = lines.size() - 5;
    if (static_cast<int>(count) != part->segments() + 1) throw ConfigError("path file vertex count differs from times");
    PathFile file{mf, base, kind == "curved", {}, {}};
    if (!file.curved) {
      file.flat.partition = part;
      for (std::size_t i = 0; i < count; ++i) file.flat.vertices.push_back(to_vec(parse_numbers(lines[5 + i], 6 + static_cast<int>(i)), 6));
      check_flat(mf, file.flat);
      for (double x : file.flat.vertices.front().span()) {
        if (x != 0.0) throw ConfigError("flat path must start at the origin");
      }
      return file;
    }
    std::vector<ManifoldPoint> pts;
    for (std::size_t i = 0; i < count; ++i) {
      pts.push_back(mf.point(to_vec(parse_numbers(lines[5 + i], 6 + static_cast<int>(i)), 6 + static_cast<int>(i))));
    }
    PathSkeleton sk{part, pts.front(), std::vector<ManifoldPoint>(pts.begin() + 1, pts.end())};
    file.curve = interpolate(mf, sk);
    return file;
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid path file: ") + e.what());
  }
}

}  // namespace wiener
