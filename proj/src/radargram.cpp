#include "gprforge/radargram.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gprforge/common.hpp"

namespace gprforge::gram {

namespace {

void append_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(static_cast<uint8_t>(v & 0xff));
  b.push_back(static_cast<uint8_t>(v >> 8));
}

void append_u32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void append_f32(std::vector<uint8_t>& b, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  append_u32(b, bits);
}

void append_f64(std::vector<uint8_t>& b, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<uint8_t>((bits >> (8 * i)) & 0xff));
}

struct ByteReader {
  const std::vector<uint8_t>& b;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > b.size()) throw Error("TruncatedFile", "unexpected end of file");
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(b[pos] | (b[pos + 1] << 8));
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

}  // namespace

Radargram Radargram::zeros(int n_traces, int n_samples, double dt, double dx_m, double time_zero) {
  Radargram r;
  r.n_traces = n_traces;
  r.n_samples = n_samples;
  r.dt = dt;
  r.dx_m = dx_m;
  r.time_zero = time_zero;
  r.data.assign(static_cast<size_t>(n_traces) * n_samples, 0.0f);
  return r;
}

Radargram dewow(const Radargram& r, int window) {
  if (window < 3 || window % 2 == 0)
    throw Error("BadWindow", "dewow window must be odd and >= 3, got " + std::to_string(window));
  Radargram out = r;
  int half = window / 2;
  int n = r.n_samples;
  std::vector<double> prefix(static_cast<size_t>(n) + 1);
  for (int i = 0; i < r.n_traces; ++i) {
    const float* src = r.trace(i);
    float* dst = out.trace(i);
    prefix[0] = 0.0;
    for (int t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + src[t];
    for (int t = 0; t < n; ++t) {
      int lo = std::max(0, t - half);
      int hi = std::min(n - 1, t + half);
      double mean = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
      dst[t] = static_cast<float>(src[t] - mean);
    }
  }
  return out;
}

Radargram remove_background(const Radargram& r) {
  if (r.n_traces < 2)
    throw Error("TooFewTraces", "background removal needs at least 2 traces");
  std::vector<double> mean(static_cast<size_t>(r.n_samples), 0.0);
  for (int i = 0; i < r.n_traces; ++i) {
    const float* src = r.trace(i);
    for (int t = 0; t < r.n_samples; ++t) mean[t] += src[t];
  }
  for (auto& v : mean) v /= r.n_traces;
  Radargram out = r;
  for (int i = 0; i < r.n_traces; ++i) {
    float* dst = out.trace(i);
    for (int t = 0; t < r.n_samples; ++t) dst[t] = static_cast<float>(dst[t] - mean[t]);
  }
  return out;
}

Radargram apply_gain(const Radargram& r, GainKind kind, double k) {
  if (k < 0) throw Error("OutOfRangeValue", "gain coefficient must be >= 0");
  Radargram out = r;
  std::vector<float> g(static_cast<size_t>(r.n_samples));
  for (int t = 0; t < r.n_samples; ++t) {
    double time = t * r.dt;
    g[t] = static_cast<float>(kind == GainKind::linear ? 1.0 + k * time : std::exp(k * time));
  }
  for (int i = 0; i < r.n_traces; ++i) {
    float* dst = out.trace(i);
    for (int t = 0; t < r.n_samples; ++t) dst[t] *= g[t];
  }
  return out;
}

NoiseModel estimate_noise(const Radargram& r, const std::vector<std::pair<int, int>>& ranges) {
  std::vector<int> cols;
  for (const auto& [lo, hi] : ranges)
    for (int i = std::max(0, lo); i < std::min(hi, r.n_traces); ++i) cols.push_back(i);
  if (cols.size() < 2) throw Error("EmptySelection", "need at least 2 selected traces");

  NoiseModel m;
  m.per_depth_std.resize(static_cast<size_t>(r.n_samples));
  for (int t = 0; t < r.n_samples; ++t) {
    double sum = 0, sum2 = 0;
    for (int c : cols) {
      double v = r.at(c, t);
      sum += v;
      sum2 += v * v;
    }
    double n = static_cast<double>(cols.size());
    double var = (sum2 - sum * sum / n) / (n - 1);
    m.per_depth_std[t] = static_cast<float>(std::sqrt(std::max(0.0, var)));
  }
  return m;
}

Radargram add_noise(const Radargram& r, const NoiseModel& m, uint64_t seed) {
  if (static_cast<int>(m.per_depth_std.size()) != r.n_samples)
    throw Error("LengthMismatch", "noise model length " + std::to_string(m.per_depth_std.size()) +
                                      " != n_samples " + std::to_string(r.n_samples));
  Radargram out = r;
  for (int i = 0; i < r.n_traces; ++i) {
    Rng rng = Rng::derive(seed, static_cast<uint64_t>(i));
    float* dst = out.trace(i);
    for (int t = 0; t < r.n_samples; ++t)
      dst[t] = static_cast<float>(dst[t] + m.per_depth_std[t] * rng.normal());
  }
  return out;
}

GrayImage to_image(const Radargram& r, ScaleMode mode, double p_lo, double p_hi) {
  GrayImage img;
  img.width = r.n_traces;
  img.height = r.n_samples;
  img.pixels.assign(static_cast<size_t>(img.width) * img.height, 128);

  double lo, hi;
  if (mode == ScaleMode::global_minmax) {
    lo = hi = r.data.empty() ? 0.0 : r.data[0];
    for (float v : r.data) {
      lo = std::min(lo, static_cast<double>(v));
      hi = std::max(hi, static_cast<double>(v));
    }
  } else {
    std::vector<float> sorted(r.data);
    std::sort(sorted.begin(), sorted.end());
    auto pick = [&sorted](double p) {
      double idx = p / 100.0 * (sorted.size() - 1);
      return static_cast<double>(sorted[static_cast<size_t>(std::llround(idx))]);
    };
    lo = pick(p_lo);
    hi = pick(p_hi);
  }
  if (!(hi > lo)) return img;  // DegenerateRange: uniform mid-gray

  double scale = 255.0 / (hi - lo);
  for (int i = 0; i < r.n_traces; ++i) {
    const float* src = r.trace(i);
    for (int t = 0; t < r.n_samples; ++t) {
      double v = std::clamp((src[t] - lo) * scale, 0.0, 255.0);
      img.at(t, i) = static_cast<uint8_t>(std::llround(v));
    }
  }
  return img;
}

Radargram resample_time(const Radargram& r, int n_out) {
  if (n_out < 1 || n_out >= r.n_samples) return r;
  int k = (r.n_samples + n_out - 1) / n_out;
  int actual = (r.n_samples + k - 1) / k;
  Radargram out = Radargram::zeros(r.n_traces, actual, r.dt * k, r.dx_m, r.time_zero);
  for (int i = 0; i < r.n_traces; ++i) {
    const float* src = r.trace(i);
    float* dst = out.trace(i);
    for (int t = 0; t < actual; ++t) {
      int lo = t * k;
      int hi = std::min(r.n_samples, lo + k);
      double sum = 0;
      for (int u = lo; u < hi; ++u) sum += src[u];
      dst[t] = static_cast<float>(sum / (hi - lo));
    }
  }
  return out;
}

void write_gprb(const std::string& path, const Radargram& r) {
  std::vector<uint8_t> bytes;
  bytes.reserve(38 + r.data.size() * 4);
  bytes.insert(bytes.end(), {'G', 'P', 'R', 'B'});
  append_u16(bytes, 1);
  append_u32(bytes, static_cast<uint32_t>(r.n_traces));
  append_u32(bytes, static_cast<uint32_t>(r.n_samples));
  append_f64(bytes, r.dt);
  append_f64(bytes, r.dx_m);
  append_f64(bytes, r.time_zero);
  for (float v : r.data) append_f32(bytes, v);
  write_binary_file(path, bytes);
}

Radargram read_gprb(const std::string& path) {
  auto bytes = read_binary_file(path);
  ByteReader rd{bytes};
  rd.need(4);
  if (std::memcmp(bytes.data(), "GPRB", 4) != 0)
    throw Error("BadMagic", "not a GPRB file: " + path);
  rd.pos = 4;
  uint16_t version = rd.u16();
  if (version != 1)
    throw Error("UnsupportedVersion", "GPRB version " + std::to_string(version));
  Radargram r;
  r.n_traces = static_cast<int>(rd.u32());
  r.n_samples = static_cast<int>(rd.u32());
  r.dt = rd.f64();
  r.dx_m = rd.f64();
  r.time_zero = rd.f64();
  if (r.n_traces < 1 || r.n_samples < 1 ||
      static_cast<uint64_t>(r.n_traces) * r.n_samples > (1ULL << 31))
    throw Error("TruncatedFile", "implausible GPRB dimensions");
  size_t count = static_cast<size_t>(r.n_traces) * r.n_samples;
  rd.need(count * 4);
  r.data.resize(count);
  for (size_t i = 0; i < count; ++i) r.data[i] = rd.f32();
  return r;
}

std::vector<uint8_t> encode_pgm(const GrayImage& img) {
  std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), img.pixels.begin(), img.pixels.end());
  return bytes;
}

GrayImage decode_pgm(const std::vector<uint8_t>& bytes) {
  ByteReader rd{bytes};
  rd.need(2);
  if (bytes[0] != 'P' || bytes[1] != '5') throw Error("BadMagic", "not a binary PGM (P5)");
  rd.pos = 2;

  auto next_token = [&rd, &bytes]() -> long {
    // Skips whitespace and '#' comment lines, then reads a decimal integer.
    while (true) {
      rd.need(1);
      uint8_t c = bytes[rd.pos];
      if (c == '#') {
        while (rd.pos < bytes.size() && bytes[rd.pos] != '\n') ++rd.pos;
      } else if (std::isspace(c)) {
        ++rd.pos;
      } else {
        break;
      }
    }
    long v = 0;
    bool any = false;
    while (rd.pos < bytes.size() && std::isdigit(bytes[rd.pos])) {
      v = v * 10 + (bytes[rd.pos] - '0');
      ++rd.pos;
      any = true;
      if (v > (1L << 30)) throw Error("BadHeader", "PGM header value too large");
    }
    if (!any) throw Error("BadHeader", "malformed PGM header");
    return v;
  };

  long w = next_token();
  long h = next_token();
  long maxval = next_token();
  if (w < 1 || h < 1) throw Error("BadHeader", "PGM dimensions must be positive");
  if (maxval != 255) throw Error("UnsupportedMaxval", "PGM maxval must be 255");
  rd.need(1);  // the single whitespace byte after maxval
  if (!std::isspace(bytes[rd.pos])) throw Error("BadHeader", "missing separator after maxval");
  ++rd.pos;

  GrayImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  size_t count = static_cast<size_t>(w) * static_cast<size_t>(h);
  rd.need(count);
  img.pixels.assign(bytes.begin() + static_cast<long>(rd.pos),
                    bytes.begin() + static_cast<long>(rd.pos + count));
  return img;
}

void write_pgm(const std::string& path, const GrayImage& img) {
  write_binary_file(path, encode_pgm(img));
}

GrayImage read_pgm(const std::string& path) { return decode_pgm(read_binary_file(path)); }

}  // namespace gprforge::gram
