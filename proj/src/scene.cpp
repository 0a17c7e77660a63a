#include "gprforge/scene.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "gprforge/common.hpp"

namespace gprforge::scene {

namespace {

const Material kFreeSpace{"free_space", 1.0, 0.0, false};
const Material kPec{"pec", 1.0, 0.0, true};

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(const std::string& tok, const std::string& directive, int line) {
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    if (!std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error("BadArity", "directive '" + directive + "': '" + tok + "' is not a number", line);
  }
}

int parse_int(const std::string& tok, const std::string& directive, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw Error("BadArity", "directive '" + directive + "': '" + tok + "' is not an integer", line);
  return v;
}

void need_arity(const std::vector<std::string>& args, size_t n, const std::string& directive,
                int line) {
  if (args.size() != n)
    throw Error("BadArity",
                "directive '" + directive + "' expects " + std::to_string(n) + " arguments, got " +
                    std::to_string(args.size()),
                line);
}

}  // namespace

std::vector<double> Scene::trace_positions() const {
  std::vector<double> xs(static_cast<size_t>(scan.n_traces));
  if (scan.n_traces == 1) {
    xs[0] = scan.x_start;
    return xs;
  }
  double step = (scan.x_end - scan.x_start) / (scan.n_traces - 1);
  for (int i = 0; i < scan.n_traces; ++i) xs[static_cast<size_t>(i)] = scan.x_start + step * i;
  return xs;
}

double Scene::trace_spacing() const {
  if (scan.n_traces <= 1) return dx_m;
  return (scan.x_end - scan.x_start) / (scan.n_traces - 1);
}

const Material* Scene::find_material(const std::string& name) const {
  for (const auto& m : materials)
    if (m.name == name) return &m;
  if (name == "free_space") return &kFreeSpace;
  if (name == "pec") return &kPec;
  return nullptr;
}

Scene parse_scene(std::string_view text) {
  Scene s;
  bool has_domain = false, has_cell = false, has_time_window = false, has_waveform = false,
       has_source = false, has_rx_offset = false, has_scan = false;

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view raw =
        eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string line(raw);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line.compare(first, 2, "//") == 0) continue;
    if (line[first] != '#')
      throw Error("UnknownDirective", "expected '#directive: args', got '" + line + "'", line_no);

    size_t colon = line.find(':', first);
    if (colon == std::string::npos)
      throw Error("UnknownDirective", "missing ':' after directive name", line_no);
    std::string name = line.substr(first + 1, colon - first - 1);
    auto args = split_ws(std::string_view(line).substr(colon + 1));

    if (name == "domain") {
      need_arity(args, 2, name, line_no);
      s.width_m = parse_number(args[0], name, line_no);
      s.depth_m = parse_number(args[1], name, line_no);
      has_domain = true;
    } else if (name == "cell") {
      need_arity(args, 2, name, line_no);
      s.dx_m = parse_number(args[0], name, line_no);
      s.dz_m = parse_number(args[1], name, line_no);
      has_cell = true;
    } else if (name == "time_window") {
      need_arity(args, 1, name, line_no);
      s.time_window_s = parse_number(args[0], name, line_no);
      has_time_window = true;
    } else if (name == "material") {
      need_arity(args, 3, name, line_no);
      Material m;
      m.name = args[0];
      m.eps_r = parse_number(args[1], name, line_no);
      m.sigma = parse_number(args[2], name, line_no);
      if (m.name == "free_space" || m.name == "pec")
        throw Error("OutOfRangeValue", "material name '" + m.name + "' is reserved", line_no);
      for (const auto& prev : s.materials)
        if (prev.name == m.name)
          throw Error("OutOfRangeValue", "duplicate material '" + m.name + "'", line_no);
      s.materials.push_back(m);
    } else if (name == "box") {
      need_arity(args, 5, name, line_no);
      ObjectSpec o;
      o.shape = ObjectSpec::Shape::box;
      o.material = args[0];
      o.x1 = parse_number(args[1], name, line_no);
      o.z1 = parse_number(args[2], name, line_no);
      o.x2 = parse_number(args[3], name, line_no);
      o.z2 = parse_number(args[4], name, line_no);
      s.objects.push_back(o);
    } else if (name == "cylinder") {
      need_arity(args, 4, name, line_no);
      ObjectSpec o;
      o.shape = ObjectSpec::Shape::cylinder;
      o.material = args[0];
      o.xc = parse_number(args[1], name, line_no);
      o.zc = parse_number(args[2], name, line_no);
      o.r = parse_number(args[3], name, line_no);
      s.objects.push_back(o);
    } else if (name == "waveform") {
      need_arity(args, 3, name, line_no);
      s.waveform.type = args[0];
      s.waveform.amplitude = parse_number(args[1], name, line_no);
      s.waveform.center_freq_hz = parse_number(args[2], name, line_no);
      if (s.waveform.type != "ricker")
        throw Error("OutOfRangeValue", "unsupported waveform '" + s.waveform.type + "'", line_no);
      has_waveform = true;
    } else if (name == "source") {
      need_arity(args, 1, name, line_no);
      s.source_depth_m = parse_number(args[0], name, line_no);
      has_source = true;
    } else if (name == "rx_offset") {
      need_arity(args, 1, name, line_no);
      s.rx_offset_m = parse_number(args[0], name, line_no);
      has_rx_offset = true;
    } else if (name == "scan") {
      need_arity(args, 3, name, line_no);
      s.scan.x_start = parse_number(args[0], name, line_no);
      s.scan.x_end = parse_number(args[1], name, line_no);
      s.scan.n_traces = parse_int(args[2], name, line_no);
      has_scan = true;
    } else {
      throw Error("UnknownDirective", "unknown directive '#" + name + ":'", line_no);
    }
  }

  if (!has_domain) throw Error("MissingRequiredDirective", "domain");
  if (!has_cell) throw Error("MissingRequiredDirective", "cell");
  if (!has_time_window) throw Error("MissingRequiredDirective", "time_window");
  if (!has_waveform) throw Error("MissingRequiredDirective", "waveform");
  if (!has_source) throw Error("MissingRequiredDirective", "source");
  if (!has_rx_offset) throw Error("MissingRequiredDirective", "rx_offset");
  if (!has_scan) throw Error("MissingRequiredDirective", "scan");
  if (!s.find_material("halfspace")) throw Error("MissingRequiredDirective", "material halfspace");

  auto diags = validate_scene(s);
  if (!diags.empty()) {
    const auto& d = diags.front();
    std::string code = d.code == "DanglingMaterialRef" ? d.code : "OutOfRangeValue";
    throw Error(code, d.message);
  }
  return s;
}

std::string serialize_scene(const Scene& s) {
  std::ostringstream out;
  out << "#domain: " << format_double(s.width_m) << ' ' << format_double(s.depth_m) << '\n';
  out << "#cell: " << format_double(s.dx_m) << ' ' << format_double(s.dz_m) << '\n';
  out << "#time_window: " << format_double(s.time_window_s) << '\n';
  out << "#waveform: " << s.waveform.type << ' ' << format_double(s.waveform.amplitude) << ' '
      << format_double(s.waveform.center_freq_hz) << '\n';
  out << "#source: " << format_double(s.source_depth_m) << '\n';
  out << "#rx_offset: " << format_double(s.rx_offset_m) << '\n';
  out << "#scan: " << format_double(s.scan.x_start) << ' ' << format_double(s.scan.x_end) << ' '
      << s.scan.n_traces << '\n';
  for (const auto& m : s.materials)
    out << "#material: " << m.name << ' ' << format_double(m.eps_r) << ' '
        << format_double(m.sigma) << '\n';
  for (const auto& o : s.objects) {
    if (o.shape == ObjectSpec::Shape::box)
      out << "#box: " << o.material << ' ' << format_double(o.x1) << ' ' << format_double(o.z1)
          << ' ' << format_double(o.x2) << ' ' << format_double(o.z2) << '\n';
    else
      out << "#cylinder: " << o.material << ' ' << format_double(o.xc) << ' '
          << format_double(o.zc) << ' ' << format_double(o.r) << '\n';
  }
  return out.str();
}

std::vector<Diagnostic> validate_scene(const Scene& s) {
  std::vector<Diagnostic> diags;
  auto bad = [&diags](const std::string& code, const std::string& msg) {
    diags.push_back({code, msg});
  };

  if (!(s.width_m > 0) || !(s.depth_m > 0))
    bad("OutOfRangeValue", "domain dimensions must be positive");
  if (!(s.dx_m > 0) || !(s.dz_m > 0)) bad("OutOfRangeValue", "cell sizes must be positive");
  if (!(s.time_window_s > 0)) bad("OutOfRangeValue", "time_window must be positive");
  if (s.scan.n_traces < 1) bad("OutOfRangeValue", "scan needs n_traces >= 1");
  if (!(s.waveform.center_freq_hz > 0)) bad("OutOfRangeValue", "waveform center frequency");

  std::set<std::string> names;
  for (const auto& m : s.materials) {
    if (!(m.eps_r >= 1.0)) bad("OutOfRangeValue", "eps_r of '" + m.name + "' must be >= 1");
    if (!(m.sigma >= 0.0)) bad("OutOfRangeValue", "sigma of '" + m.name + "' must be >= 0");
    if (!names.insert(m.name).second) bad("OutOfRangeValue", "duplicate material '" + m.name + "'");
  }

  // The scan (plus rx offset) must stay inside the domain.
  double xs = std::min(s.scan.x_start, s.scan.x_end);
  double xe = std::max(s.scan.x_start, s.scan.x_end);
  if (xs < 0 || xe + s.rx_offset_m > s.width_m || s.rx_offset_m < 0)
    bad("OutOfRangeValue", "scan positions plus rx_offset must lie inside the domain");

  for (size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    std::string tag = "object " + std::to_string(i);
    if (!s.find_material(o.material))
      bad("DanglingMaterialRef", tag + " references unknown material '" + o.material + "'");
    if (o.shape == ObjectSpec::Shape::box) {
      if (!(o.x1 < o.x2) || !(o.z1 < o.z2))
        bad("OutOfRangeValue", tag + ": box corners must satisfy x1<x2, z1<z2");
      if (o.x1 < 0 || o.x2 > s.width_m || o.z1 < 0 || o.z2 > s.depth_m)
        bad("ObjectOutsideDomain", tag + ": box exceeds the domain");
    } else {
      if (!(o.r > 0)) bad("OutOfRangeValue", tag + ": cylinder radius must be positive");
      if (o.xc - o.r < 0 || o.xc + o.r > s.width_m || o.zc - o.r < 0 || o.zc + o.r > s.depth_m)
        bad("ObjectOutsideDomain", tag + ": cylinder exceeds the domain");
    }
  }
  return diags;
}

}  // namespace gprforge::scene
