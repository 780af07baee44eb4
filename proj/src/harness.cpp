#include "wiener/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "wiener/errors.hpp"

namespace wiener::harness {

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + " must be finite");
  return x;
}

double get_positive(const json& v, const std::string& where) {
  const double x = get_number(v, where);
  if (!(x > 0.0)) throw ConfigError(where + " must be positive");
  return x;
}

std::uint64_t get_unsigned(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(where + " must be a non-negative integer");
}

int get_int(const json& v, const std::string& where, int lo, int hi) {
  if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > hi) throw ConfigError(where + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::string get_string(const json& v, const std::string& where, const std::set<std::string>& choices) {
  if (!v.is_string()) throw ConfigError(where + " must be a string");
  std::string s = v.get<std::string>();
  if (!choices.empty() && !choices.count(s)) {
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : "|") + c;
    throw ConfigError(where + " must be one of " + list);
  }
  return s;
}

std::vector<double> get_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Vec to_vec(const std::vector<double>& v, const std::string& where) {
  if (v.size() > static_cast<std::size_t>(kMaxDim)) throw ConfigError(where + " is too long");
  return Vec(std::span<const double>(v));
}

Manifold parse_manifold(const json& m) {
  check_keys(m, {"kind", "radius", "radii", "dimension"}, "manifold");
  if (!m.contains("kind")) throw ConfigError("manifold.kind is required");
  const std::string kind = get_string(m["kind"], "manifold.kind", {"circle", "torus", "sphere", "euclidean"});
  auto require_only = [&](const std::set<std::string>& keys) {
    for (const auto& [key, value] : m.items()) {
      if (key != "kind" && !keys.count(key)) throw ConfigError("manifold." + key + " does not apply to kind " + kind);
    }
  };
  try {
    if (kind == "circle" || kind == "sphere") {
      require_only({"radius"});
      const double r = m.contains("radius") ? get_positive(m["radius"], "manifold.radius") : 1.0;
      return kind == "circle" ? Manifold::circle(r) : Manifold::sphere(r);
    }
    if (kind == "torus") {
      require_only({"radii"});
      if (!m.contains("radii")) throw ConfigError("manifold.radii is required for a torus");
      std::vector<double> radii = get_vector(m["radii"], "manifold.radii");
      return Manifold::flat_torus(std::move(radii));
    }
    require_only({"dimension"});
    return Manifold::euclidean(m.contains("dimension") ? get_int(m["dimension"], "manifold.dimension", 1, kMaxDim) : 1);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("manifold: ") + e.what());
  }
}

PartitionSpec parse_partition(const json& p) {
  check_keys(p, {"uniform", "times", "dyadic", "levels"}, "partition");
  if (p.size() != 1) throw ConfigError("partition must have exactly one of uniform, times, dyadic, levels");
  PartitionSpec spec;
  if (p.contains("uniform")) {
    spec.kind = PartitionSpec::Kind::Uniform;
    spec.segments = get_int(p["uniform"], "partition.uniform", 1, 1 << 20);
  } else if (p.contains("times")) {
    spec.kind = PartitionSpec::Kind::Times;
    spec.times = get_vector(p["times"], "partition.times");
  } else if (p.contains("dyadic")) {
    spec.kind = PartitionSpec::Kind::Dyadic;
    spec.levels = get_int(p["dyadic"], "partition.dyadic", 1, 20);
  } else {
    spec.kind = PartitionSpec::Kind::Levels;
    const json& l = p["levels"];
    if (!l.is_array() || l.empty()) throw ConfigError("partition.levels must be a non-empty array");
    for (std::size_t i = 0; i < l.size(); ++i) spec.level_segments.push_back(get_int(l[i], "partition.levels[" + std::to_string(i) + "]", 1, 1 << 20));
  }
  try {
    spec.chain();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("partition: ") + e.what());
  }
  return spec;
}

FunctionalSpec parse_functional(const json& f) {
  check_keys(f, {"name", "value", "index", "center"}, "functional");
  FunctionalSpec spec;
  if (!f.contains("name")) throw ConfigError("functional.name is required");
  spec.name = get_string(f["name"], "functional.name",
                         {"constant", "zonal", "coordinate", "distance", "sup_distance", "energy", "winding"});
  if (f.contains("value")) spec.value = get_number(f["value"], "functional.value");
  if (f.contains("index")) spec.index = get_int(f["index"], "functional.index", 0, kMaxDim - 1);
  if (f.contains("center")) spec.center = get_vector(f["center"], "functional.center");
  return spec;
}

FieldSpec parse_field(const json& f) {
  check_keys(f, {"name", "coefficients"}, "field");
  FieldSpec spec;
  if (!f.contains("name")) throw ConfigError("field.name is required");
  spec.name = get_string(f["name"], "field.name", {"rotation", "gradient", "constant", "zero"});
  if (f.contains("coefficients")) spec.coefficients = get_vector(f["coefficients"], "field.coefficients");
  if ((spec.name == "gradient" || spec.name == "constant") && spec.coefficients.empty()) {
    throw ConfigError("field." + spec.name + " needs coefficients");
  }
  return spec;
}

KernelSpec parse_kernel(const json& k) {
  check_keys(k, {"tolerance", "t", "x", "y", "nodes"}, "kernel");
  KernelSpec spec;
  if (k.contains("tolerance")) spec.tolerance = get_positive(k["tolerance"], "kernel.tolerance");
  if (k.contains("t")) spec.t = get_positive(k["t"], "kernel.t");
  if (k.contains("x")) spec.x = get_vector(k["x"], "kernel.x");
  if (k.contains("y")) spec.y = get_vector(k["y"], "kernel.y");
  if (k.contains("nodes")) spec.nodes = get_int(k["nodes"], "kernel.nodes", 16, 1 << 16);
  return spec;
}

OutputSpec parse_output(const json& o) {
  check_keys(o, {"dir", "format", "plot"}, "output");
  OutputSpec spec;
  if (o.contains("dir")) spec.dir = get_string(o["dir"], "output.dir", {});
  if (o.contains("format")) spec.format = get_string(o["format"], "output.format", {"csv", "json", "both"});
  if (o.contains("plot")) {
    if (!o["plot"].is_boolean()) throw ConfigError("output.plot must be a boolean");
    spec.plot = o["plot"].get<bool>();
  }
  return spec;
}

PathSpec parse_path(const json& p) {
  check_keys(p, {"input", "output", "inverse"}, "path");
  PathSpec spec;
  if (p.contains("input")) spec.input = get_string(p["input"], "path.input", {});
  if (p.contains("output")) spec.output = get_string(p["output"], "path.output", {});
  if (p.contains("inverse")) {
    if (!p["inverse"].is_boolean()) throw ConfigError("path.inverse must be a boolean");
    spec.inverse = p["inverse"].get<bool>();
  }
  return spec;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

HeatKernel make_kernel(const ExperimentConfig& c) { return HeatKernel(c.manifold, c.kernel.tolerance); }

ManifoldPoint point_from(const ExperimentConfig& c, const std::optional<std::vector<double>>& coords, const std::string& where) {
  if (!coords) return base_point(c);
  try {
    return c.manifold.point(to_vec(*coords, where));
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::size_t budget(const ExperimentConfig& c, std::size_t level) {
  return c.samples.size() == 1 ? c.samples[0] : c.samples.at(level);
}

void check_budget_levels(const ExperimentConfig& c, std::size_t levels) {
  if (c.samples.size() != 1 && c.samples.size() != levels) {
    throw ConfigError("samples must be a single count or one per chain level");
  }
}

json reports_json(const std::vector<EstimateReport>& reports) {
  json a = json::array();
  for (const auto& r : reports) a.push_back(report_to_json(r));
  return a;
}

PlotSeries series_of(const std::string& label, const std::vector<EstimateReport>& reports) {
  PlotSeries s{label, {}, {}, {}};
  for (const auto& r : reports) {
    s.mesh.push_back(r.mesh);
    s.estimate.push_back(r.estimate);
    s.half_width.push_back(r.ci95());
  }
  return s;
}

/// Exact value of E[F] under Brownian motion for the zonal endpoint
/// functional about the base point, when one is known in closed form.
std::optional<double> zonal_reference(const ExperimentConfig& c) {
  if (c.functional.name != "zonal" || c.functional.center) return std::nullopt;
  switch (c.manifold.kind()) {
    case ManifoldKind::Sphere2: return std::exp(-1.0 / (c.manifold.radius() * c.manifold.radius()));
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus: {
      double v = 1.0;
      for (double r : c.manifold.radii()) v *= std::exp(-0.5 / (r * r));
      return v;
    }
    case ManifoldKind::Euclidean: break;
  }
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("failed to read " + path);
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed to write " + path.string());
}

void strip_wall_time(json& j) {
  if (j.is_object()) {
    j.erase("wall_time");
    for (auto& [key, value] : j.items()) strip_wall_time(value);
  } else if (j.is_array()) {
    for (auto& v : j) strip_wall_time(v);
  }
}

}  // namespace

PartitionPtr PartitionSpec::single() const {
  switch (kind) {
    case Kind::Uniform: return make_partition(Partition::uniform(segments));
    case Kind::Times: return make_partition(Partition(times));
    case Kind::Dyadic:
    case Kind::Levels: return chain().partitions().back();
  }
  return nullptr;
}

RefinementChain PartitionSpec::chain() const {
  switch (kind) {
    case Kind::Uniform: return RefinementChain({make_partition(Partition::uniform(segments))});
    case Kind::Times: return RefinementChain({make_partition(Partition(times))});
    case Kind::Dyadic: return RefinementChain::dyadic(levels);
    case Kind::Levels: return RefinementChain::uniform(level_segments);
  }
  throw ConfigError("bad partition kind");
}

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc, {"manifold", "base_point", "partition", "functional", "field", "scheme", "method", "samples", "seed",
                   "workers", "p", "grid", "kernel", "output", "path"},
             "config");
  ExperimentConfig c;
  if (doc.contains("manifold")) c.manifold = parse_manifold(doc["manifold"]);
  if (doc.contains("base_point")) {
    c.base_point = get_vector(doc["base_point"], "base_point");
    base_point(c);
  }
  if (doc.contains("partition")) c.partition = parse_partition(doc["partition"]);
  if (doc.contains("functional")) c.functional = parse_functional(doc["functional"]);
  if (doc.contains("field")) c.field = parse_field(doc["field"]);
  if (doc.contains("scheme")) c.scheme = get_string(doc["scheme"], "scheme", {"geometric", "cylinder", "both"});
  if (doc.contains("method")) c.method = get_string(doc["method"], "method", {"mc", "quadrature"});
  if (doc.contains("samples")) {
    const json& s = doc["samples"];
    c.samples.clear();
    if (s.is_array()) {
      if (s.empty()) throw ConfigError("samples must not be empty");
      for (std::size_t i = 0; i < s.size(); ++i) c.samples.push_back(get_unsigned(s[i], "samples[" + std::to_string(i) + "]"));
    } else {
      c.samples.push_back(get_unsigned(s, "samples"));
    }
    for (std::size_t n : c.samples) {
      if (n == 0) throw ConfigError("samples must be positive");
    }
  }
  if (doc.contains("seed")) c.seed = get_unsigned(doc["seed"], "seed");
  if (doc.contains("workers")) c.workers = get_int(doc["workers"], "workers", 1, 256);
  if (doc.contains("p")) {
    c.p = get_number(doc["p"], "p");
    if (c.p != 1.0 && c.p != 2.0) throw ConfigError("p must be 1 or 2");
  }
  if (doc.contains("grid")) c.grid = get_int(doc["grid"], "grid", 0, 4096);
  if (doc.contains("kernel")) c.kernel = parse_kernel(doc["kernel"]);
  if (doc.contains("output")) c.output = parse_output(doc["output"]);
  if (doc.contains("path")) c.path = parse_path(doc["path"]);
  return c;
}

ExperimentConfig load_config(const std::string& file) {
  const std::string text = read_file(file);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(file + ": " + e.what());
  }
  return parse_config(doc);
}

ManifoldPoint base_point(const ExperimentConfig& c) {
  if (!c.base_point) return c.manifold.base_point();
  try {
    return c.manifold.point(to_vec(*c.base_point, "base_point"));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("base_point: ") + e.what());
  }
}

PathFunctional make_path_functional(const ExperimentConfig& c) {
  const Manifold& m = c.manifold;
  const FunctionalSpec& f = c.functional;
  const ManifoldPoint center = point_from(c, f.center, "functional.center");
  try {
    if (f.name == "constant") return constant_path_functional(f.value);
    if (f.name == "zonal") return endpoint_path_functional(zonal_observable(m, center));
    if (f.name == "coordinate") return endpoint_path_functional(coordinate_observable(m, f.index));
    if (f.name == "distance") return endpoint_path_functional(distance_observable(m, center));
    if (f.name == "sup_distance") return sup_distance_functional(m, center);
    if (f.name == "energy") return energy_path_functional();
    if (f.name == "winding") return winding_functional(m, f.index);
  } catch (const DomainError& e) {
    throw ConfigError("functional " + f.name + ": " + e.what());
  }
  throw ConfigError("unknown functional " + f.name);
}

AmbientField make_field(const ExperimentConfig& c) {
  const Manifold& m = c.manifold;
  try {
    if (c.field.name == "rotation") return rotation_field(m);
    if (c.field.name == "zero") return zero_field(m);
    const Vec a = to_vec(c.field.coefficients, "field.coefficients");
    if (c.field.name == "gradient") return gradient_field(m, a);
    if (c.field.name == "constant") return constant_field(m, a);
  } catch (const DomainError& e) {
    throw ConfigError("field " + c.field.name + ": " + e.what());
  }
  throw ConfigError("unknown field " + c.field.name);
}

json report_to_json(const EstimateReport& r) {
  return json{{"estimate", r.estimate},   {"std_error", r.std_error},   {"samples", r.samples},
              {"segments", r.segments},   {"mesh", r.mesh},             {"manifold", r.manifold},
              {"scheme", r.scheme},       {"functional", r.functional}, {"method", r.method},
              {"seed", r.seed},           {"workers", r.workers},       {"wall_time", r.wall_time},
              {"rejected", r.rejected},   {"bias_bound", r.bias_bound}, {"error_bound", r.error_bound}};
}

EstimateReport report_from_json(const json& j) {
  try {
    check_keys(j, {"estimate", "std_error", "samples", "segments", "mesh", "manifold", "scheme", "functional", "method",
                   "seed", "workers", "wall_time", "rejected", "bias_bound", "error_bound"},
               "report");
    EstimateReport r;
    r.estimate = j.at("estimate").get<double>();
    r.std_error = j.at("std_error").get<double>();
    r.samples = j.at("samples").get<std::size_t>();
    r.segments = j.at("segments").get<int>();
    r.mesh = j.at("mesh").get<double>();
    r.manifold = j.at("manifold").get<std::string>();
    r.scheme = j.at("scheme").get<std::string>();
    r.functional = j.at("functional").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.workers = j.at("workers").get<int>();
    r.wall_time = j.at("wall_time").get<double>();
    r.rejected = j.at("rejected").get<std::size_t>();
    r.bias_bound = j.at("bias_bound").get<double>();
    r.error_bound = j.at("error_bound").get<double>();
    if (r.std_error < 0.0) throw ConfigError("report std_error is negative");
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

std::string partition_label(const Partition& p) {
  if (p == Partition::uniform(p.segments())) return "uniform:" + std::to_string(p.segments());
  std::string s;
  for (double t : p.times()) s += (s.empty() ? "" : ";") + fmt(t);
  return s;
}

std::string csv_header() {
  return "scheme,level,segments,mesh,estimate,std_error,ci95,samples,rejected,seed,workers,method,manifold,functional,partition\n";
}

std::string csv_row(const EstimateReport& r, int level, const std::string& partition) {
  std::ostringstream os;
  os << r.scheme << ',' << level << ',' << r.segments << ',' << fmt(r.mesh) << ',' << fmt(r.estimate) << ','
     << fmt(r.std_error) << ',' << fmt(r.ci95()) << ',' << r.samples << ',' << r.rejected << ',' << r.seed << ','
     << r.workers << ',' << r.method << ",\"" << r.manifold << "\",\"" << r.functional << "\"," << partition << '\n';
  return os.str();
}

std::string render_svg(const std::string& title, const std::vector<PlotSeries>& series, std::optional<double> reference) {
  constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.mesh.size(); ++i) {
      xmin = std::min(xmin, std::log10(s.mesh[i]));
      xmax = std::max(xmax, std::log10(s.mesh[i]));
      ymin = std::min(ymin, s.estimate[i] - s.half_width[i]);
      ymax = std::max(ymax, s.estimate[i] + s.half_width[i]);
    }
  }
  if (reference) {
    ymin = std::min(ymin, *reference);
    ymax = std::max(ymax, *reference);
  }
  if (!std::isfinite(xmin)) xmin = -1, xmax = 0, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-9) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.08 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double mesh) { return kL + (std::log10(mesh) - xmin) / (xmax - xmin) * (kW - kL - kR); };
  auto py = [&](double y) { return kT + (ymax - y) / (ymax - ymin) * (kH - kT - kB); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  for (int k = static_cast<int>(std::ceil(xmin)); k <= static_cast<int>(std::floor(xmax)); ++k) {
    const double x = px(std::pow(10.0, k));
    os << "<line x1=\"" << x << "\" y1=\"" << kH - kB << "\" x2=\"" << x << "\" y2=\"" << kH - kB + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << kH - kB + 18 << "\" text-anchor=\"middle\">1e" << k << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = ymin + (ymax - ymin) * k / 4.0;
    os << "<text x=\"" << kL - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << fmt_short(y) << "</text>\n";
  }
  os << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">mesh (log scale)</text>\n";
  if (reference) {
    os << "<line x1=\"" << kL << "\" y1=\"" << py(*reference) << "\" x2=\"" << kW - kR << "\" y2=\"" << py(*reference)
       << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 4];
    const PlotSeries& ser = series[s];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < ser.mesh.size(); ++i) os << (i ? " " : "") << px(ser.mesh[i]) << ',' << py(ser.estimate[i]);
    os << "\"/>\n";
    for (std::size_t i = 0; i < ser.mesh.size(); ++i) {
      const double x = px(ser.mesh[i]);
      os << "<line x1=\"" << x << "\" y1=\"" << py(ser.estimate[i] - ser.half_width[i]) << "\" x2=\"" << x << "\" y2=\""
         << py(ser.estimate[i] + ser.half_width[i]) << "\" stroke=\"" << color << "\"/>\n";
      os << "<circle cx=\"" << x << "\" cy=\"" << py(ser.estimate[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    os << "<text x=\"" << kW - kR - 150 << "\" y=\"" << kT + 16 * (s + 1) << "\" fill=\"" << color << "\">" << ser.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

RunResult run_kernel(const ExperimentConfig& c) {
  const HeatKernel k = make_kernel(c);
  const ManifoldPoint x = point_from(c, c.kernel.x ? c.kernel.x : c.base_point, "kernel.x");
  const ManifoldPoint y = point_from(c, c.kernel.y ? c.kernel.y : c.base_point, "kernel.y");
  const double t = c.kernel.t;
  RunResult out;
  out.record = json{{"manifold", c.manifold.name()},
                    {"convention", kDiffusionConvention},
                    {"t", t},
                    {"x", std::vector<double>(x.coords.span().begin(), x.coords.span().end())},
                    {"y", std::vector<double>(y.coords.span().begin(), y.coords.span().end())},
                    {"method", to_string(k.method(t))},
                    {"value", k(t, x, y)},
                    {"normalization_residual", k.normalization_residual(t, x, c.kernel.nodes)},
                    {"semigroup_residual", k.semigroup_residual(t, t, x, y, c.kernel.nodes)},
                    {"clip_events", k.clip_events()}};
  out.csv = "manifold,t,value,normalization_residual,semigroup_residual\n\"" + c.manifold.name() + "\"," + fmt(t) + ',' +
            fmt(out.record["value"].get<double>()) + ',' + fmt(out.record["normalization_residual"].get<double>()) + ',' +
            fmt(out.record["semigroup_residual"].get<double>()) + '\n';
  return out;
}

RunResult run_sample(const ExperimentConfig& c) {
  const PartitionPtr part = c.partition.single();
  const ManifoldPoint x0 = base_point(c);
  const std::size_t count = c.samples.front();
  Rng rng = make_stream(c.seed, 0);
  const bool geometric = c.scheme == "geometric";
  const CylinderMeasure measure(make_kernel(c), x0, part);
  SkeletonSampler sampler = measure.sampler();
  const GeometricMeasureSampler nu(c.manifold, x0, part);
  std::ostringstream csv;
  csv << "sample,index,time";
  for (int j = 0; j < c.manifold.coordinate_size(); ++j) csv << ",x" << j;
  csv << '\n';
  Vec mean(c.manifold.embedding_dimension(), 0.0);
  for (std::size_t s = 0; s < count; ++s) {
    const PathSkeleton sk = geometric ? nu.sample(rng).skeleton() : sampler.sample(rng);
    for (int i = 0; i <= part->segments(); ++i) {
      csv << s << ',' << i << ',' << fmt(part->times()[static_cast<std::size_t>(i)]);
      for (double v : sk.at(i).coords.span()) csv << ',' << fmt(v);
      csv << '\n';
    }
    mean += c.manifold.embed(sk.endpoint()) * (1.0 / static_cast<double>(count));
  }
  RunResult out;
  out.csv = csv.str();
  out.record = json{{"manifold", c.manifold.name()},
                    {"scheme", geometric ? "geometric" : "cylinder"},
                    {"partition", partition_label(*part)},
                    {"samples", count},
                    {"seed", c.seed},
                    {"workers", 1},
                    {"embedded_endpoint_mean", std::vector<double>(mean.span().begin(), mean.span().end())}};
  return out;
}

RunResult run_estimate(const ExperimentConfig& c) {
  const PartitionPtr part = c.partition.single();
  const ManifoldPoint x0 = base_point(c);
  const PathFunctional f = make_path_functional(c);
  const McSettings s{c.samples.front(), c.seed, c.workers};
  EstimateReport r;
  if (c.scheme == "geometric") {
    if (c.method != "mc") throw ConfigError("the geometric scheme supports method mc only");
    r = geometric_expectation_mc(GeometricMeasureSampler(c.manifold, x0, part), f, s);
  } else {
    const CylinderMeasure measure(make_kernel(c), x0, part);
    const CylinderFunctional cf = discretize(f, c.manifold, part);
    r = c.method == "quadrature" ? expectation_quadrature(measure, cf, c.grid) : expectation_mc(measure, cf, s);
  }
  RunResult out;
  out.record = report_to_json(r);
  out.record["partition"] = partition_label(*part);
  out.csv = csv_header() + csv_row(r, 0, partition_label(*part));
  return out;
}

RunResult run_converge(const ExperimentConfig& c) {
  const RefinementChain chain = c.partition.chain();
  check_budget_levels(c, chain.size());
  const ManifoldPoint x0 = base_point(c);
  const PathFunctional f = make_path_functional(c);
  const CylinderMeasure measure(make_kernel(c), x0, chain[0]);
  const FunctionalFamily family = discretize_family(f, c.manifold, chain);
  const LimitTable table = limit_estimate(family, measure, c.samples, c.seed, c.workers);
  RunResult out;
  out.record = json{{"levels", reports_json(table.levels)}, {"differences", table.differences}, {"extrapolated", table.extrapolated}};
  std::vector<CoCauchyRow> rows;
  if (chain.size() >= 2) rows = co_cauchy_diagnostic(family, measure, c.p, {c.samples.front(), c.seed, c.workers});
  // Row k carries delta between levels k-1 and k; the first row has none.
  std::string header = csv_header();
  header.pop_back();
  out.csv = header + ",delta,delta_std_error\n";
  for (std::size_t k = 0; k < chain.size(); ++k) {
    std::string row = csv_row(table.levels[k], static_cast<int>(k), partition_label(*chain[k]));
    row.pop_back();
    out.csv += row + (k == 0 ? std::string(",,") : "," + fmt(rows[k - 1].delta) + "," + fmt(rows[k - 1].std_error)) + "\n";
  }
  if (!rows.empty()) {
    json diag = json::array();
    for (const auto& row : rows) {
      diag.push_back(json{{"level", row.level},
                          {"coarse_segments", row.coarse_segments},
                          {"fine_segments", row.fine_segments},
                          {"p", c.p},
                          {"delta", row.delta},
                          {"std_error", row.std_error},
                          {"exact_zero", row.exact_zero},
                          {"moment", report_to_json(row.moment)}});
    }
    out.record["co_cauchy"] = diag;
  }
  out.svg = render_svg("converge: " + f.name + " on " + c.manifold.name(), {series_of("cylinder", table.levels)}, zonal_reference(c));
  return out;
}

RunResult run_stratonovich(const ExperimentConfig& c) {
  const RefinementChain chain = c.partition.chain();
  check_budget_levels(c, chain.size());
  const ManifoldPoint x0 = base_point(c);
  const AmbientField field = make_field(c);
  const HeatKernel kernel = make_kernel(c);
  std::vector<EstimateReport> norms;
  std::vector<EstimateReport> residuals;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const CylinderMeasure m(kernel, x0, chain[k]);
    const McSettings s{budget(c, k), level_seed(c.seed, k), c.workers};
    EstimateReport r = stratonovich_l2(field, m, s);
    r.seed = c.seed;
    r.scheme = "stratonovich_l2";
    norms.push_back(r);
    if (c.field.name == "gradient") {
      EstimateReport e = exact_form_residual(to_vec(c.field.coefficients, "field.coefficients"), m, s);
      e.seed = c.seed;
      e.scheme = "exact_form_residual";
      residuals.push_back(e);
    }
  }
  RunResult out;
  out.record = json{{"field", field.name}, {"levels", reports_json(norms)}};
  out.csv = csv_header();
  for (std::size_t k = 0; k < norms.size(); ++k) out.csv += csv_row(norms[k], static_cast<int>(k), partition_label(*chain[k]));
  for (std::size_t k = 0; k < residuals.size(); ++k) out.csv += csv_row(residuals[k], static_cast<int>(k), partition_label(*chain[k]));
  std::vector<PlotSeries> plot{series_of("squared midpoint sum", norms)};
  if (!residuals.empty()) {
    json ratios = json::array();
    for (std::size_t k = 1; k < residuals.size(); ++k) {
      ratios.push_back(residuals[k].estimate > 0.0 ? residuals[k - 1].estimate / residuals[k].estimate : 0.0);
    }
    out.record["exact_form_residual"] = reports_json(residuals);
    out.record["residual_ratios"] = ratios;
    plot.push_back(series_of("exact-form residual", residuals));
  }
  out.svg = render_svg("stratonovich: " + field.name + " on " + c.manifold.name(), plot);
  return out;
}

RunResult run_develop(const ExperimentConfig& c) {
  if (c.path.input.empty()) throw ConfigError("develop needs path.input");
  std::istringstream in(read_file(c.path.input));
  const PathFile file = read_path_file(in);
  std::ostringstream text;
  RunResult out;
  if (c.path.inverse) {
    if (!file.curved) throw ConfigError("--inverse expects a curved path file");
    const FlatPiecewisePath a = antidevelop(file.manifold, file.curve);
    write_flat_path(text, file.manifold, file.curve.start(), a);
    out.record = json{{"direction", "antidevelop"}, {"energy_in", energy_curved(file.manifold, file.curve)}, {"energy_out", energy_flat(a)}};
  } else {
    if (file.curved) throw ConfigError("develop expects a flat path file (use --inverse for curved input)");
    const CurvedPiecewisePath g = develop(file.manifold, file.flat, file.base);
    write_curved_path(text, file.manifold, g);
    out.record = json{{"direction", "develop"}, {"energy_in", energy_flat(file.flat)}, {"energy_out", energy_curved(file.manifold, g)}};
  }
  out.record["manifold"] = file.manifold.name();
  out.record["segments"] = file.curved ? file.curve.partition->segments() : file.flat.partition->segments();
  out.text = text.str();
  return out;
}

RunResult run_geometric(const ExperimentConfig& c) {
  const RefinementChain chain = c.partition.chain();
  check_budget_levels(c, chain.size());
  const ManifoldPoint x0 = base_point(c);
  const PathFunctional f = make_path_functional(c);
  const HeatKernel kernel = make_kernel(c);
  RunResult out;
  std::vector<PlotSeries> plot;
  out.csv = csv_header();
  if (c.scheme == "cylinder") {
    const CylinderMeasure measure(kernel, x0, chain[0]);
    const LimitTable t = limit_estimate(discretize_family(f, c.manifold, chain), measure, c.samples, c.seed, c.workers);
    out.record = json{{"cylinder", reports_json(t.levels)}};
    for (std::size_t k = 0; k < chain.size(); ++k) out.csv += csv_row(t.levels[k], static_cast<int>(k), partition_label(*chain[k]));
    plot.push_back(series_of("cylinder", t.levels));
  } else {
    if (chain.size() < 3) throw ConfigError("geometric runs need a chain of at least three levels");
    const GeometricLimitTable t = geometric_limit_estimate(f, kernel, x0, chain, c.samples, c.seed, c.workers, c.scheme == "both");
    out.record = json{{"geometric", reports_json(t.geometric)}};
    for (std::size_t k = 0; k < chain.size(); ++k) out.csv += csv_row(t.geometric[k], static_cast<int>(k), partition_label(*chain[k]));
    plot.push_back(series_of("geometric", t.geometric));
    if (!t.cylinder.empty()) {
      out.record["cylinder"] = reports_json(t.cylinder);
      out.record["joint_z"] = t.joint_z;
      for (std::size_t k = 0; k < chain.size(); ++k) out.csv += csv_row(t.cylinder[k], static_cast<int>(k), partition_label(*chain[k]));
      plot.push_back(series_of("cylinder", t.cylinder));
    }
  }
  out.svg = render_svg("geometric: " + f.name + " on " + c.manifold.name(), plot, zonal_reference(c));
  return out;
}

RunResult run(const std::string& command, const ExperimentConfig& c) {
  if (command == "kernel") return run_kernel(c);
  if (command == "sample") return run_sample(c);
  if (command == "estimate") return run_estimate(c);
  if (command == "converge") return run_converge(c);
  if (command == "stratonovich") return run_stratonovich(c);
  if (command == "develop") return run_develop(c);
  if (command == "geometric") return run_geometric(c);
  throw ConfigError("unknown command " + command);
}

std::string resolve_output_dir(const std::string& flag, const OutputSpec& spec) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("WIENER_OUTPUT_DIR"); env && *env) return env;
  return spec.dir;
}

std::vector<std::string> write_outputs(const RunResult& result, const std::string& command, const ExperimentConfig& c) {
  std::vector<std::string> written;
  namespace fs = std::filesystem;
  const fs::path dir(c.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto emit = [&](const fs::path& p, const std::string& content) {
    write_file(p, content);
    written.push_back(p.string());
  };
  if (!result.text.empty()) {
    emit(c.path.output.empty() ? dir / (command + ".path") : fs::path(c.path.output), result.text);
  }
  if (c.output.format != "csv") emit(dir / (command + ".json"), result.record.dump(2) + "\n");
  if (c.output.format != "json" && !result.csv.empty()) emit(dir / (command + ".csv"), result.csv);
  if (c.output.plot && !result.svg.empty()) emit(dir / (command + ".svg"), result.svg);
  return written;
}

std::string numeric_fingerprint(const json& record) {
  json copy = record;
  strip_wall_time(copy);
  return copy.dump();
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 2;
  if (dynamic_cast<const NumericError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 1;
}

}  // namespace wiener::harness
