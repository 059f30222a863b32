#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polsarkit/bases.hpp"
#include "polsarkit/labelgen.hpp"
#include "polsarkit/pretrain.hpp"
#include "polsarkit/queries.hpp"
#include "polsarkit/types.hpp"
#include "polsarkit/yamaguchi.hpp"

namespace polsar::io {

enum class IoErrorCode {
  OpenFailed,
  BadMagic,
  BadVersion,
  Truncated,
  BadChannelCount,
  BadMetadata,
};

struct IoError : std::runtime_error {
  IoErrorCode code;
  IoError(IoErrorCode c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

const char* io_error_name(IoErrorCode c);

// Raster container: magic "CPXR", u16 version, u32 height, u32 width,
// u16 channel count (8), then per-channel little-endian f32 planes in the
// order re/im of HH, HV, VH, VV, then a u32 byte length and JSON metadata.
void write_cpxr(const PolsarRaster& raster, const std::string& path);
PolsarRaster read_cpxr(const std::string& path);

// Single f32 plane, magic "PSPN".
void write_span(const RealGrid& grid, const std::string& path);
RealGrid read_span(const std::string& path);

// Four f32 power planes in component order, magic "PSTK".
void write_stack(const ComponentStack& stack, const std::string& path);
ComponentStack read_stack(const std::string& path);

// Four u8 planes with 0/255 encoding, magic "PMSK"; thresholds and fit
// statistics ride in the metadata block.
void write_masks(const BinaryLabelStack& labels, const std::string& path);
BinaryLabelStack read_masks(const std::string& path);

// Query bank, magic "QRYS"; f64 vectors (training consumes them bit-exact).
void write_queries(const std::vector<ScatteringQuery>& queries,
                   const std::string& path);
std::vector<ScatteringQuery> read_queries(const std::string& path);

struct Checkpoint {
  ModelParams params;
  EncoderConfig ecfg;
  TrainConfig tcfg;
};

// Magic "CKPT"; f64 parameter matrices plus config in the metadata block.
void write_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

// Key-value config text: `key = value` lines, `#` comments, mandatory
// `version = 1`. Unknown keys are rejected.
struct RunConfig {
  EncoderConfig encoder;
  TrainConfig train;
};
RunConfig parse_config_text(const std::string& text);
RunConfig read_config(const std::string& path);
std::string config_to_text(const RunConfig& cfg);

// Scene description JSON: height, width, regions[] with half-open pixel
// bounds r0/r1/c0/c1 and a powers object keyed by basis name. Validated
// as an exact tiling before returning.
SceneSpec parse_scene_json(const std::string& text);
SceneSpec read_scene_json(const std::string& path);

enum class CompositeMode { Pauli, Yamaguchi };

// RGB bytes, row-major. Pauli maps (|k2|^2, |k3|^2, |k1|^2) to (R,G,B);
// Yamaguchi maps (Pd, Pv, Ps). Each channel is scaled by 2.5x its mean
// and clipped to [0, 255]; an all-zero channel stays black.
std::vector<std::uint8_t> composite_pauli(const PolsarRaster& raster);
std::vector<std::uint8_t> composite_yamaguchi(const ComponentStack& stack);

void write_ppm(const std::string& path, int height, int width,
               const std::vector<std::uint8_t>& rgb);

std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t fnv1a_file(const std::string& path);

// UTC ISO-8601; honors SOURCE_DATE_EPOCH so archived runs reproduce.
std::string manifest_timestamp();

struct RunManifest {
  std::string tool_version;
  std::string command;                                       // subcommand name
  std::uint64_t config_hash = 0;                             // invocation hash
  std::vector<std::pair<std::string, std::uint64_t>> inputs;  // path, content hash
  std::vector<std::pair<std::string, std::uint64_t>> outputs;
  std::string timestamp;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace polsar::io
