#include "polsarkit/io.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "polsarkit/parallel.hpp"
#include "polsarkit/polsar.hpp"
#include "polsarkit/version.hpp"

namespace polsar::io {

using nlohmann::json;

const char* io_error_name(IoErrorCode c) {
  switch (c) {
    case IoErrorCode::OpenFailed: return "open_failed";
    case IoErrorCode::BadMagic: return "bad_magic";
    case IoErrorCode::BadVersion: return "bad_version";
    case IoErrorCode::Truncated: return "truncated";
    case IoErrorCode::BadChannelCount: return "bad_channel_count";
    case IoErrorCode::BadMetadata: return "bad_metadata";
  }
  return "unknown";
}

namespace {

void put_u16(std::string& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& b, float v) { put_u32(b, std::bit_cast<std::uint32_t>(v)); }
void put_f64(std::string& b, double v) { put_u64(b, std::bit_cast<std::uint64_t>(v)); }

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;
  const std::string& path;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) {
      throw IoError(IoErrorCode::Truncated, path + ": truncated file");
    }
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf[pos++]);
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[pos++])) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[pos++])) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  void expect_magic(const char* magic) {
    need(4);
    if (buf.compare(pos, 4, magic) != 0) {
      throw IoError(IoErrorCode::BadMagic, path + ": bad magic, want " + magic);
    }
    pos += 4;
  }
  void expect_version(std::uint16_t want) {
    const std::uint16_t got = u16();
    if (got != want) {
      throw IoError(IoErrorCode::BadVersion,
                    path + ": unsupported version " + std::to_string(got));
    }
  }
  json metadata() {
    const std::uint32_t len = u32();
    need(len);
    json meta;
    try {
      meta = json::parse(buf.substr(pos, len));
    } catch (const json::exception& e) {
      throw IoError(IoErrorCode::BadMetadata, path + ": bad metadata: " + e.what());
    }
    pos += len;
    return meta;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorCode::OpenFailed, path + ": cannot open for read");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoErrorCode::OpenFailed, path + ": cannot open for write");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoErrorCode::OpenFailed, path + ": write failed");
}

void put_metadata(std::string& b, const json& meta) {
  const std::string text = meta.dump();
  put_u32(b, static_cast<std::uint32_t>(text.size()));
  b += text;
}

void put_plane_f32(std::string& b, const RealGrid& g) {
  for (double v : g.cells) put_f32(b, static_cast<float>(v));
}

RealGrid read_plane_f32(Reader& r, int h, int w) {
  RealGrid g(h, w);
  for (double& v : g.cells) v = static_cast<double>(r.f32());
  return g;
}

std::uint8_t byte_of(double v, double mean) {
  if (!(mean > 0.0)) return 0;
  const double s = 255.0 * v / (2.5 * mean);
  const long q = std::lround(s);
  if (q < 0) return 0;
  if (q > 255) return 255;
  return static_cast<std::uint8_t>(q);
}

std::vector<std::uint8_t> compose_rgb(const RealGrid& r, const RealGrid& g,
                                      const RealGrid& b) {
  const double mr = pairwise_block_sum(r.cells) / static_cast<double>(r.size());
  const double mg = pairwise_block_sum(g.cells) / static_cast<double>(g.size());
  const double mb = pairwise_block_sum(b.cells) / static_cast<double>(b.size());
  std::vector<std::uint8_t> out(r.size() * 3);
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[3 * i] = byte_of(r.cells[i], mr);
    out[3 * i + 1] = byte_of(g.cells[i], mg);
    out[3 * i + 2] = byte_of(b.cells[i], mb);
  }
  return out;
}

}  // namespace

void write_cpxr(const PolsarRaster& raster, const std::string& path) {
  std::string b;
  b += "CPXR";
  put_u16(b, kCpxrVersion);
  put_u32(b, static_cast<std::uint32_t>(raster.height()));
  put_u32(b, static_cast<std::uint32_t>(raster.width()));
  put_u16(b, 8);
  const auto plane = [&](auto get) {
    for (const auto& px : raster.pixels.cells) put_f32(b, static_cast<float>(get(px)));
  };
  plane([](const ScatteringMatrix& s) { return s.hh.real(); });
  plane([](const ScatteringMatrix& s) { return s.hh.imag(); });
  plane([](const ScatteringMatrix& s) { return s.hv.real(); });
  plane([](const ScatteringMatrix& s) { return s.hv.imag(); });
  plane([](const ScatteringMatrix& s) { return s.vh.real(); });
  plane([](const ScatteringMatrix& s) { return s.vh.imag(); });
  plane([](const ScatteringMatrix& s) { return s.vv.real(); });
  plane([](const ScatteringMatrix& s) { return s.vv.imag(); });
  json meta;
  meta["sensor"] = raster.meta.sensor;
  meta["resolution_m"] = raster.meta.resolution_m;
  meta["tags"] = raster.meta.tags;
  put_metadata(b, meta);
  dump(path, b);
}

PolsarRaster read_cpxr(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, 0, path};
  r.expect_magic("CPXR");
  r.expect_version(kCpxrVersion);
  const int h = static_cast<int>(r.u32());
  const int w = static_cast<int>(r.u32());
  const std::uint16_t channels = r.u16();
  if (channels != 8) {
    throw IoError(IoErrorCode::BadChannelCount,
                  path + ": expected 8 channels, found " + std::to_string(channels));
  }
  if (h < 1 || w < 1) {
    throw IoError(IoErrorCode::BadMetadata, path + ": bad raster extents");
  }
  PolsarRaster out;
  out.pixels = Grid<ScatteringMatrix>(h, w);
  const auto plane = [&](auto set) {
    for (auto& px : out.pixels.cells) set(px, static_cast<double>(r.f32()));
  };
  plane([](ScatteringMatrix& s, double v) { s.hh.real(v); });
  plane([](ScatteringMatrix& s, double v) { s.hh.imag(v); });
  plane([](ScatteringMatrix& s, double v) { s.hv.real(v); });
  plane([](ScatteringMatrix& s, double v) { s.hv.imag(v); });
  plane([](ScatteringMatrix& s, double v) { s.vh.real(v); });
  plane([](ScatteringMatrix& s, double v) { s.vh.imag(v); });
  plane([](ScatteringMatrix& s, double v) { s.vv.real(v); });
  plane([](ScatteringMatrix& s, double v) { s.vv.imag(v); });
  const json meta = r.metadata();
  try {
    out.meta.sensor = meta.value("sensor", std::string());
    out.meta.resolution_m = meta.value("resolution_m", 0.0);
    if (meta.contains("tags")) {
      for (const auto& [k, v] : meta.at("tags").items()) {
        out.meta.tags[k] = v.get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw IoError(IoErrorCode::BadMetadata, path + ": bad metadata: " + e.what());
  }
  return out;
}

void write_span(const RealGrid& grid, const std::string& path) {
  std::string b;
  b += "PSPN";
  put_u16(b, kSpanVersion);
  put_u32(b, static_cast<std::uint32_t>(grid.height));
  put_u32(b, static_cast<std::uint32_t>(grid.width));
  put_u16(b, 1);
  put_plane_f32(b, grid);
  put_metadata(b, json::object());
  dump(path, b);
}

RealGrid read_span(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, 0, path};
  r.expect_magic("PSPN");
  r.expect_version(kSpanVersion);
  const int h = static_cast<int>(r.u32());
  const int w = static_cast<int>(r.u32());
  const std::uint16_t planes = r.u16();
  if (planes != 1) {
    throw IoError(IoErrorCode::BadChannelCount,
                  path + ": expected 1 plane, found " + std::to_string(planes));
  }
  RealGrid g = read_plane_f32(r, h, w);
  r.metadata();
  return g;
}

void write_stack(const ComponentStack& stack, const std::string& path) {
  std::string b;
  b += "PSTK";
  put_u16(b, kStackVersion);
  put_u32(b, static_cast<std::uint32_t>(stack.height()));
  put_u32(b, static_cast<std::uint32_t>(stack.width()));
  put_u16(b, kComponentCount);
  for (int i = 0; i < kComponentCount; ++i) put_plane_f32(b, stack.plane(i));
  json meta;
  for (int i = 0; i < kComponentCount; ++i) meta["components"].push_back(component_name(i));
  put_metadata(b, meta);
  dump(path, b);
}

ComponentStack read_stack(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, 0, path};
  r.expect_magic("PSTK");
  r.expect_version(kStackVersion);
  const int h = static_cast<int>(r.u32());
  const int w = static_cast<int>(r.u32());
  const std::uint16_t planes = r.u16();
  if (planes != kComponentCount) {
    throw IoError(IoErrorCode::BadChannelCount,
                  path + ": expected 4 planes, found " + std::to_string(planes));
  }
  ComponentStack stack{read_plane_f32(r, h, w), read_plane_f32(r, h, w),
                       read_plane_f32(r, h, w), read_plane_f32(r, h, w)};
  r.metadata();
  return stack;
}

void write_masks(const BinaryLabelStack& labels, const std::string& path) {
  std::string b;
  b += "PMSK";
  put_u16(b, kMaskVersion);
  put_u32(b, static_cast<std::uint32_t>(labels.masks[0].height));
  put_u32(b, static_cast<std::uint32_t>(labels.masks[0].width));
  put_u16(b, kComponentCount);
  for (const auto& m : labels.masks) {
    for (std::uint8_t v : m.cells) b.push_back(static_cast<char>(v ? 255 : 0));
  }
  json meta;
  for (int i = 0; i < kComponentCount; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    json f;
    f["component"] = component_name(i);
    f["threshold"] = labels.thresholds[idx];
    f["degenerate"] = labels.degenerate[idx];
    f["mu"] = labels.fits[idx].mu;
    f["n"] = labels.fits[idx].n;
    f["dropped_zeros"] = labels.fits[idx].dropped_zeros;
    f["quartiles"] = labels.fits[idx].quartiles;
    meta["components"].push_back(f);
  }
  put_metadata(b, meta);
  dump(path, b);
}

BinaryLabelStack read_masks(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, 0, path};
  r.expect_magic("PMSK");
  r.expect_version(kMaskVersion);
  const int h = static_cast<int>(r.u32());
  const int w = static_cast<int>(r.u32());
  const std::uint16_t planes = r.u16();
  if (planes != kComponentCount) {
    throw IoError(IoErrorCode::BadChannelCount,
                  path + ": expected 4 planes, found " + std::to_string(planes));
  }
  BinaryLabelStack out;
  for (auto& m : out.masks) {
    m = MaskGrid(h, w);
    for (auto& v : m.cells) v = r.u8() ? 1 : 0;
  }
  const json meta = r.metadata();
  try {
    const auto& comps = meta.at("components");
    for (int i = 0; i < kComponentCount; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const auto& f = comps.at(idx);
      out.thresholds[idx] = f.at("threshold").get<double>();
      out.degenerate[idx] = f.at("degenerate").get<bool>();
      out.fits[idx].mu = f.at("mu").get<double>();
      out.fits[idx].n = f.at("n").get<std::size_t>();
      out.fits[idx].dropped_zeros = f.at("dropped_zeros").get<std::size_t>();
      const auto& q = f.at("quartiles");
      for (std::size_t k = 0; k < 3; ++k) out.fits[idx].quartiles[k] = q.at(k).get<double>();
    }
  } catch (const json::exception& e) {
    throw IoError(IoErrorCode::BadMetadata, path + ": bad metadata: " + e.what());
  }
  return out;
}

void write_queries(const std::vector<ScatteringQuery>& queries,
                   const std::string& path) {
  std::string b;
  b += "QRYS";
  put_u16(b, kQueryVersion);
  put_u16(b, static_cast<std::uint16_t>(queries.size()));
  put_u32(b, kEmbedDim);
  put_u32(b, kQueryDim);
  for (const auto& q : queries) {
    put_u16(b, static_cast<std::uint16_t>(q.kind));
    put_u64(b, q.seed);
    put_u32(b, static_cast<std::uint32_t>(q.m));
    for (double v : q.vec768) put_f64(b, v);
    for (double v : q.vec256) put_f64(b, v);
  }
  json meta;
  for (const auto& q : queries) meta["kinds"].push_back(basis_name(q.kind));
  put_metadata(b, meta);
  dump(path, b);
}

std::vector<ScatteringQuery> read_queries(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, 0, path};
  r.expect_magic("QRYS");
  r.expect_version(kQueryVersion);
  const std::uint16_t count = r.u16();
  const std::uint32_t d768 = r.u32();
  const std::uint32_t d256 = r.u32();
  if (d768 != kEmbedDim || d256 != kQueryDim) {
    throw IoError(IoErrorCode::BadMetadata, path + ": unexpected query dimensions");
  }
  std::vector<ScatteringQuery> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    ScatteringQuery q;
    const std::uint16_t kind = r.u16();
    if (kind >= kBasisCount) {
      throw IoError(IoErrorCode::BadMetadata, path + ": unknown basis kind");
    }
    q.kind = static_cast<BasisKind>(kind);
    q.seed = r.u64();
    q.m = static_cast<int>(r.u32());
    q.vec768.resize(kEmbedDim);
    for (double& v : q.vec768) v = r.f64();
    q.vec256.resize(kQueryDim);
    for (double& v : q.vec256) v = r.f64();
    out.push_back(std::move(q));
  }
  r.metadata();
  return out;
}

namespace {

void put_matrix(std::string& b, const ad::Matrix& m) {
  put_u32(b, static_cast<std::uint32_t>(m.rows));
  put_u32(b, static_cast<std::uint32_t>(m.cols));
  for (double v : m.data) put_f64(b, v);
}

ad::Matrix read_matrix(Reader& r) {
  const int rows = static_cast<int>(r.u32());
  const int cols = static_cast<int>(r.u32());
  if (rows < 1 || cols < 1) {
    throw IoError(IoErrorCode::BadMetadata, r.path + ": bad matrix shape");
  }
  ad::Matrix m(rows, cols, 0.0);
  for (double& v : m.data) v = r.f64();
  return m;
}

}  // namespace

void write_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::string b;
  b += "CKPT";
  put_u16(b, kCheckpointVersion);
  put_u16(b, static_cast<std::uint16_t>(ckpt.params.encoder.size()));
  for (const auto& m : ckpt.params.encoder) put_matrix(b, m);
  put_matrix(b, ckpt.params.yamaguchi_bank);
  put_matrix(b, ckpt.params.decomp_bank);
  json meta;
  meta["encoder"] = {{"d", ckpt.ecfg.d},
                     {"patch", ckpt.ecfg.patch},
                     {"layers", ckpt.ecfg.layers},
                     {"seed", std::to_string(ckpt.ecfg.seed)}};
  meta["train"] = {{"alpha", ckpt.tcfg.alpha},
                   {"lr", ckpt.tcfg.lr},
                   {"iters", ckpt.tcfg.iters},
                   {"seed", std::to_string(ckpt.tcfg.seed)}};
  put_metadata(b, meta);
  dump(path, b);
}

Checkpoint read_checkpoint(const std::string& path) {
  const std::string buf = slurp(path);
  Reader r{buf, 0, path};
  r.expect_magic("CKPT");
  r.expect_version(kCheckpointVersion);
  const std::uint16_t enc_layers = r.u16();
  Checkpoint out;
  for (int i = 0; i < enc_layers; ++i) out.params.encoder.push_back(read_matrix(r));
  out.params.yamaguchi_bank = read_matrix(r);
  out.params.decomp_bank = read_matrix(r);
  const json meta = r.metadata();
  try {
    const auto& e = meta.at("encoder");
    out.ecfg.d = e.at("d").get<int>();
    out.ecfg.patch = e.at("patch").get<int>();
    out.ecfg.layers = e.at("layers").get<int>();
    out.ecfg.seed = std::stoull(e.at("seed").get<std::string>());
    const auto& t = meta.at("train");
    out.tcfg.alpha = t.at("alpha").get<double>();
    out.tcfg.lr = t.at("lr").get<double>();
    out.tcfg.iters = t.at("iters").get<int>();
    out.tcfg.seed = std::stoull(t.at("seed").get<std::string>());
  } catch (const std::exception& e) {
    throw IoError(IoErrorCode::BadMetadata, path + ": bad metadata: " + e.what());
  }
  if (static_cast<int>(out.params.encoder.size()) != out.ecfg.layers) {
    throw IoError(IoErrorCode::BadMetadata, path + ": encoder depth mismatch");
  }
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  bool saw_version = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const auto bad_value = [&]() {
      return std::invalid_argument("config line " + std::to_string(lineno) +
                                   ": bad value for " + key);
    };
    const auto as_int = [&] {
      try {
        std::size_t used = 0;
        const int x = std::stoi(val, &used);
        if (used != val.size()) throw bad_value();
        return x;
      } catch (const std::invalid_argument&) {
        throw bad_value();
      } catch (const std::out_of_range&) {
        throw bad_value();
      }
    };
    const auto as_double = [&] {
      try {
        std::size_t used = 0;
        const double x = std::stod(val, &used);
        if (used != val.size()) throw bad_value();
        return x;
      } catch (const std::invalid_argument&) {
        throw bad_value();
      } catch (const std::out_of_range&) {
        throw bad_value();
      }
    };
    const auto as_u64 = [&] {
      try {
        std::size_t used = 0;
        const std::uint64_t x = std::stoull(val, &used);
        if (used != val.size()) throw bad_value();
        return x;
      } catch (const std::invalid_argument&) {
        throw bad_value();
      } catch (const std::out_of_range&) {
        throw bad_value();
      }
    };
    if (key == "version") {
      if (as_int() != kConfigVersion) {
        throw std::invalid_argument("unsupported config version " + val);
      }
      saw_version = true;
    } else if (key == "alpha") {
      cfg.train.alpha = as_double();
    } else if (key == "lr") {
      cfg.train.lr = as_double();
    } else if (key == "iters") {
      cfg.train.iters = as_int();
    } else if (key == "d") {
      cfg.encoder.d = as_int();
    } else if (key == "patch") {
      cfg.encoder.patch = as_int();
    } else if (key == "layers") {
      cfg.encoder.layers = as_int();
    } else if (key == "seed") {
      const std::uint64_t s = as_u64();
      cfg.encoder.seed = s;
      cfg.train.seed = s;
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (!saw_version) throw std::invalid_argument("config missing version key");
  return cfg;
}

RunConfig read_config(const std::string& path) {
  return parse_config_text(slurp(path));
}

std::string config_to_text(const RunConfig& cfg) {
  // shortest decimal that parses back to the same double
  const auto num = [](double v) { return nlohmann::json(v).dump(); };
  std::ostringstream out;
  out << "version = " << kConfigVersion << "\n";
  out << "alpha = " << num(cfg.train.alpha) << "\n";
  out << "lr = " << num(cfg.train.lr) << "\n";
  out << "iters = " << cfg.train.iters << "\n";
  out << "d = " << cfg.encoder.d << "\n";
  out << "patch = " << cfg.encoder.patch << "\n";
  out << "layers = " << cfg.encoder.layers << "\n";
  out << "seed = " << cfg.encoder.seed << "\n";
  return out.str();
}

SceneSpec parse_scene_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scene spec: ") + e.what());
  }
  SceneSpec spec;
  try {
    spec.height = doc.at("height").get<int>();
    spec.width = doc.at("width").get<int>();
    for (const auto& region : doc.at("regions")) {
      SceneRegion r;
      r.r0 = region.value("r0", 0);
      r.c0 = region.value("c0", 0);
      r.r1 = region.at("r1").get<int>();
      r.c1 = region.at("c1").get<int>();
      for (const auto& [name, power] : region.at("powers").items()) {
        int kind = -1;
        for (int i = 0; i < kBasisCount; ++i) {
          if (name == basis_name(static_cast<BasisKind>(i))) kind = i;
        }
        if (kind < 0) {
          throw std::invalid_argument("scene spec: unknown basis " + name);
        }
        r.powers.p[static_cast<std::size_t>(kind)] = power.get<double>();
      }
      spec.regions.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scene spec: ") + e.what());
  }
  validate_scene(spec);
  return spec;
}

SceneSpec read_scene_json(const std::string& path) {
  return parse_scene_json(slurp(path));
}

std::vector<std::uint8_t> composite_pauli(const PolsarRaster& raster) {
  const int h = raster.height(), w = raster.width();
  RealGrid r(h, w), g(h, w), b(h, w);
  for (std::size_t i = 0; i < raster.pixels.size(); ++i) {
    const PauliVector k =
        pauli_vector(symmetrize_reciprocal(raster.pixels.cells[i]));
    r.cells[i] = std::norm(k.k2);
    g.cells[i] = std::norm(k.k3);
    b.cells[i] = std::norm(k.k1);
  }
  return compose_rgb(r, g, b);
}

std::vector<std::uint8_t> composite_yamaguchi(const ComponentStack& stack) {
  return compose_rgb(stack.double_bounce, stack.volume, stack.surface);
}

void write_ppm(const std::string& path, int height, int width,
               const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(height) * width * 3) {
    throw std::invalid_argument("ppm: rgb buffer does not match extents");
  }
  std::string b = "P6\n" + std::to_string(width) + " " + std::to_string(height) +
                  "\n255\n";
  b.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
  dump(path, b);
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
  const std::string buf = slurp(path);
  return fnv1a(buf.data(), buf.size());
}

std::string manifest_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      t = static_cast<std::time_t>(std::stoll(env));
    } catch (const std::exception&) {
      // unparsable override, fall back to the clock
    }
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {
std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

void write_manifest(const RunManifest& manifest, const std::string& path) {
  json j;
  j["tool_version"] = manifest.tool_version;
  j["command"] = manifest.command;
  j["config_hash"] = hex64(manifest.config_hash);
  j["timestamp"] = manifest.timestamp;
  j["inputs"] = json::array();
  for (const auto& [p, h] : manifest.inputs) {
    j["inputs"].push_back({{"path", p}, {"fnv1a", hex64(h)}});
  }
  j["outputs"] = json::array();
  for (const auto& [p, h] : manifest.outputs) {
    j["outputs"].push_back({{"path", p}, {"fnv1a", hex64(h)}});
  }
  write_text_file(path, j.dump(2) + "\n");
}

std::string read_text_file(const std::string& path) { return slurp(path); }

void write_text_file(const std::string& path, const std::string& text) {
  dump(path, text);
}

}  // namespace polsar::io
