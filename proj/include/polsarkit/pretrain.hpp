#pragma once

#include <cstdint>
#include <vector>

#include "polsarkit/autodiff.hpp"
#include "polsarkit/labelgen.hpp"
#include "polsarkit/queries.hpp"
#include "polsarkit/types.hpp"

namespace polsar {

struct EncoderConfig {
  int d = 64;      // feature dimension
  int patch = 4;   // square patch edge, must divide both raster extents
  int layers = 2;  // weight matrices in the patch encoder
  std::uint64_t seed = 0;
};

struct TrainConfig {
  double alpha = 0.1;  // power-loss weight
  double lr = 1e-2;
  int iters = 500;
  std::uint64_t seed = 0;
};

// Decoder depth is fixed; the config file's `layers` key sizes the encoder.
inline constexpr int kDecoderLayers = 3;
inline constexpr int kYamaguchiQueries = 4;
inline constexpr double kMaskThreshold = 0.5;
inline constexpr double kMaskBlocked = -1e9;

struct ModelParams {
  std::vector<ad::Matrix> encoder;  // bias-free weight stack
  ad::Matrix yamaguchi_bank;        // 4 x d
  ad::Matrix decomp_bank;           // 10 x d
};

// Encoder weights from the seeded stream; banks from the shipped query
// vectors through a fixed 256->d projection, rows unit-normalized.
ModelParams init_params(const EncoderConfig& cfg,
                        const std::vector<ScatteringQuery>& queries);

// Rows = patches in row-major patch order, columns = 8 * patch^2 reals
// (re/im of HH, HV, VH, VV per pixel, pixel-major).
ad::Matrix patch_embed_input(const PolsarRaster& raster, int patch);

// tanh between weight matrices, linear last layer, no biases anywhere.
// Output is patches x d.
ad::Value encode(ad::Tape& tape, const std::vector<ad::Value>& encoder_weights,
                 ad::Value input);

// softmax(mask + Q K^T) V + Q with K = V = features. No scaling term.
ad::Value masked_cross_attention(ad::Tape& tape, ad::Value queries,
                                 ad::Value features, const ad::Matrix& mask);

// Parameter-free global mixing: softmax(W W^T) W + W.
ad::Value query_self_attention(ad::Tape& tape, ad::Value queries);

ad::Value decoder_layer(ad::Tape& tape, ad::Value queries, ad::Value features,
                        const ad::Matrix& mask);

// Additive mask from coefficients in [0, 1]: 0 where >= 0.5, -1e9 below.
// Counts rows with every entry blocked (softmax falls back to uniform
// attention there).
ad::Matrix update_mask(const ad::Matrix& coefficients, int* blocked_rows = nullptr);

ad::Matrix open_mask(int rows, int cols);

// Majority vote over each patch window per component; ties map to 1.
// Output is 4 x patches.
ad::Matrix downsample_labels(const BinaryLabelStack& labels, int patch);

// Window mean over each patch. Output is 1 x patches.
ad::Matrix downsample_span(const RealGrid& span, int patch);

// Masks actually applied in one forward pass, per decoder layer.
struct MaskSet {
  std::vector<ad::Matrix> yamaguchi;  // kDecoderLayers entries, 4 x patches
  std::vector<ad::Matrix> decomp;     // kDecoderLayers entries, 10 x patches
};

struct ForwardResult {
  ad::Value features;        // patches x d
  ad::Value yamaguchi_maps;  // sigmoid coefficients, 4 x patches
  ad::Value decomp_maps;     // softplus coefficients, 10 x patches
  ad::Value power_map;       // column sums of decomp_maps, 1 x patches
  ad::Value loss_yamaguchi;
  ad::Value loss_power;
  ad::Value loss;
  int blocked_rows = 0;
  MaskSet masks;
};

// Full model: encode, per-bank masked decoder stack (layer 0 open, later
// masks thresholded from the previous layer's sigmoid maps, gradients not
// taken through masks), heads, losses. Masks are recomputed from the
// running forward pass unless `frozen` pins them (finite-difference
// checks need the thresholding held fixed).
ForwardResult model_forward(ad::Tape& tape, const std::vector<ad::Value>& params,
                            const ad::Matrix& input, const ad::Matrix& labels,
                            const ad::Matrix& span_row, double alpha,
                            const MaskSet* frozen = nullptr);

// Parameter order used by model_forward: encoder weights, then the
// yamaguchi bank, then the decomposition bank.
std::vector<ad::Matrix> flatten_params(const ModelParams& p);
ModelParams unflatten_params(const std::vector<ad::Matrix>& flat, int encoder_layers);

struct LossRow {
  int iter = 0;
  double total = 0.0, yamaguchi = 0.0, power = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<LossRow> trace;
  int blocked_row_warnings = 0;
};

// Plain gradient descent; deterministic per seed. Aborts when the loss
// exceeds 1e6 or stops being finite.
TrainResult train(const PolsarRaster& scene, const BinaryLabelStack& labels,
                  const RealGrid& span, const EncoderConfig& ecfg,
                  const TrainConfig& tcfg);

struct EvalMetrics {
  std::array<double, kComponentCount> oa{}, miou{}, macc{};  // percent

  double mean_oa() const;
  double mean_miou() const;
  double mean_macc() const;
};

// pred thresholded at 0.5 against binary labels, both 4 x patches.
EvalMetrics eval_metrics(const ad::Matrix& pred, const ad::Matrix& labels);

}  // namespace polsar
