#include "gprforge/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gprforge/common.hpp"

namespace gprforge::annotate {

double wave_velocity(double eps_r) { return kC0 / std::sqrt(eps_r); }

double hyperbola_travel_time(double x_m, double x0_m, double d_m, double v) {
  double dx = x_m - x0_m;
  return 2.0 * std::sqrt(d_m * d_m + dx * dx) / v;
}

double iou(const BBox& a, const BBox& b) {
  double ix = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  double iy = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (ix <= 0 || iy <= 0) return 0.0;
  double inter = ix * iy;
  double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

BBox clip_box(const BBox& b, int img_w, int img_h) {
  BBox out = b;
  out.xmin = std::clamp(b.xmin, 0.0, static_cast<double>(img_w));
  out.xmax = std::clamp(b.xmax, 0.0, static_cast<double>(img_w));
  out.ymin = std::clamp(b.ymin, 0.0, static_cast<double>(img_h));
  out.ymax = std::clamp(b.ymax, 0.0, static_cast<double>(img_h));
  return out;
}

BBox hyperbola_bbox(double x0_m, double depth_m, double v, double wavelet_delay_s,
                    double dominant_freq_hz, const gram::Radargram& meta, double scan_x_start,
                    double tail_drop) {
  double t_apex = 2.0 * depth_m / v + wavelet_delay_s;
  double period = 1.0 / dominant_freq_hz;

  // Geometric spreading d/sqrt(d^2+dx^2) >= tail_drop bounds the flank reach.
  double reach = depth_m * std::sqrt(1.0 / (tail_drop * tail_drop) - 1.0);
  double col_apex = (x0_m - scan_x_start) / meta.dx_m;
  double col_lo = (x0_m - reach - scan_x_start) / meta.dx_m;
  double col_hi = (x0_m + reach - scan_x_start) / meta.dx_m;
  col_lo = std::max(col_lo, 0.0);
  col_hi = std::min(col_hi, static_cast<double>(meta.n_traces));

  // Tail arrival at the achieved (possibly clipped) horizontal edges.
  double reach_left = std::abs(col_apex - col_lo) * meta.dx_m;
  double reach_right = std::abs(col_hi - col_apex) * meta.dx_m;
  double edge_reach = std::max(reach_left, reach_right);
  double t_tail =
      2.0 * std::sqrt(depth_m * depth_m + edge_reach * edge_reach) / v + wavelet_delay_s;

  double row_top = (t_apex - 0.5 * period - meta.time_zero) / meta.dt;
  double row_bot = (t_tail + period - meta.time_zero) / meta.dt;

  BBox box;
  box.xmin = std::floor(col_lo);
  box.xmax = std::ceil(col_hi);
  box.ymin = std::floor(row_top);
  box.ymax = std::ceil(row_bot);
  box.class_id = 0;
  return clip_box(box, meta.n_traces, meta.n_samples);
}

BBox object_bbox(const scene::ObjectSpec& object, const scene::Scene& s, const gram::Radargram& r,
                 double tail_drop) {
  const scene::Material* half = s.find_material("halfspace");
  double eps_r = half ? half->eps_r : 1.0;
  double v = wave_velocity(eps_r);

  double xc, zc;
  if (object.shape == scene::ObjectSpec::Shape::cylinder) {
    xc = object.xc;
    zc = object.zc;
  } else {
    xc = 0.5 * (object.x1 + object.x2);
    zc = 0.5 * (object.z1 + object.z2);
  }

  double fc = s.waveform.center_freq_hz;
  double delay = 1.5 / fc;  // source fires 1.5/fc after sample 0
  if (2.0 * zc / v + delay > s.time_window_s)
    throw Error("ObjectNotImageable", "apex arrival exceeds the time window");

  // The common-offset apex sits at the tx position xc - rx_offset/2 (midpoint
  // between tx and rx directly above the scatterer).
  double x0 = xc - 0.5 * s.rx_offset_m;
  return hyperbola_bbox(x0, zc, v, delay, fc, r, s.scan.x_start, tail_drop);
}

void write_labels(const std::string& path, const std::vector<BBox>& boxes) {
  std::ostringstream out;
  for (const auto& b : boxes) {
    out << b.class_id << ' ' << std::llround(b.xmin) << ' ' << std::llround(b.ymin) << ' '
        << std::llround(b.xmax) << ' ' << std::llround(b.ymax);
    if (b.score) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", *b.score);
      out << ' ' << buf;
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<BBox> read_labels(const std::string& path) {
  std::string text = read_text_file(path);
  std::vector<BBox> boxes;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    BBox b;
    double score;
    if (!(ls >> b.class_id >> b.xmin >> b.ymin >> b.xmax >> b.ymax))
      throw Error("MalformedLabelLine", path, line_no);
    if (ls >> score) b.score = score;
    std::string rest;
    if (ls >> rest) throw Error("MalformedLabelLine", path + ": trailing fields", line_no);
    if (!(b.xmin < b.xmax) || !(b.ymin < b.ymax))
      throw Error("MalformedLabelLine", path + ": degenerate box", line_no);
    boxes.push_back(b);
  }
  return boxes;
}

}  // namespace gprforge::annotate
