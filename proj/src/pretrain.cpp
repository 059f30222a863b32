#include "polsarkit/pretrain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "polsarkit/rng.hpp"
#include "polsarkit/version.hpp"

namespace polsar {

namespace {

constexpr double kFeatureGain = 0.1;

ad::Matrix gaussian_matrix(int rows, int cols, double scale, Rng rng) {
  ad::Matrix m(rows, cols, 0.0);
  for (double& v : m.data) v = scale * rng.next_gaussian();
  return m;
}

// Fixed bridge from the 256-dim query vectors into the decoder width.
ad::Matrix bank_projection(int d) {
  Rng rng = Rng(kQuerySeed).derive(3);
  return gaussian_matrix(kQueryDim, d,
                         1.0 / std::sqrt(static_cast<double>(kQueryDim)), rng);
}

ad::Matrix bank_from_queries(const std::vector<ScatteringQuery>& queries,
                             const std::vector<BasisKind>& kinds, int d) {
  const ad::Matrix proj = bank_projection(d);
  ad::Matrix bank(static_cast<int>(kinds.size()), d, 0.0);
  for (int r = 0; r < bank.rows; ++r) {
    const ScatteringQuery* src = nullptr;
    for (const auto& q : queries) {
      if (q.kind == kinds[static_cast<std::size_t>(r)]) {
        src = &q;
        break;
      }
    }
    if (!src) throw std::invalid_argument("query bank init: missing basis kind");
    for (int c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kQueryDim; ++k) {
        acc += src->vec256[static_cast<std::size_t>(k)] * proj.at(k, c);
      }
      bank.at(r, c) = acc;
    }
    double norm_sq = 0.0;
    for (int c = 0; c < d; ++c) norm_sq += bank.at(r, c) * bank.at(r, c);
    if (!(norm_sq > 0.0)) throw std::runtime_error("query bank init: zero row");
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (int c = 0; c < d; ++c) bank.at(r, c) *= inv;
  }
  return bank;
}

// Coefficient map sigmoid(W F^T) computed outside the tape; masks carry
// no gradient.
ad::Matrix coefficient_map(const ad::Matrix& bank, const ad::Matrix& features) {
  ad::Matrix coeff(bank.rows, features.rows, 0.0);
  for (int q = 0; q < bank.rows; ++q) {
    for (int p = 0; p < features.rows; ++p) {
      double acc = 0.0;
      for (int c = 0; c < bank.cols; ++c) acc += bank.at(q, c) * features.at(p, c);
      coeff.at(q, p) = 1.0 / (1.0 + std::exp(-acc));
    }
  }
  return coeff;
}

ad::Value run_bank(ad::Tape& tape, ad::Value bank, ad::Value features,
                   const std::vector<ad::Matrix>* frozen_masks,
                   std::vector<ad::Matrix>* used_masks, int* blocked_rows) {
  const int nq = tape.value(bank).rows;
  const int np = tape.value(features).rows;
  ad::Value w = bank;
  for (int layer = 0; layer < kDecoderLayers; ++layer) {
    ad::Matrix mask(nq, np, 0.0);
    if (frozen_masks) {
      mask = (*frozen_masks)[static_cast<std::size_t>(layer)];
    } else if (layer > 0) {
      int blocked = 0;
      mask = update_mask(coefficient_map(tape.value(w), tape.value(features)),
                         &blocked);
      *blocked_rows += blocked;
    }
    used_masks->push_back(mask);
    w = decoder_layer(tape, w, features, mask);
  }
  return w;
}

}  // namespace

ModelParams init_params(const EncoderConfig& cfg,
                        const std::vector<ScatteringQuery>& queries) {
  if (cfg.d < 8) throw std::invalid_argument("feature dim must be >= 8");
  if (cfg.patch < 1) throw std::invalid_argument("patch size must be >= 1");
  if (cfg.layers < 1) throw std::invalid_argument("encoder needs >= 1 layer");
  ModelParams p;
  const Rng base(cfg.seed);
  int in_dim = 8 * cfg.patch * cfg.patch;
  for (int i = 0; i < cfg.layers; ++i) {
    // The decoder's residual stack amplifies query norms by roughly 2x per
    // layer, so the last encoder layer starts damped to keep head logits
    // inside the responsive range of sigmoid/softplus.
    const double gain = i + 1 == cfg.layers ? kFeatureGain : 1.0;
    const double scale = gain / std::sqrt(static_cast<double>(in_dim));
    p.encoder.push_back(gaussian_matrix(in_dim, cfg.d, scale, base.derive(100, i)));
    in_dim = cfg.d;
  }
  p.yamaguchi_bank = bank_from_queries(
      queries,
      {BasisKind::Surface, BasisKind::DoubleBounce, BasisKind::Volume,
       BasisKind::Helix},
      cfg.d);
  std::vector<BasisKind> all;
  for (int i = 0; i < kBasisCount; ++i) all.push_back(static_cast<BasisKind>(i));
  p.decomp_bank = bank_from_queries(queries, all, cfg.d);
  return p;
}

ad::Matrix patch_embed_input(const PolsarRaster& raster, int patch) {
  const int h = raster.height(), w = raster.width();
  if (patch < 1 || h % patch != 0 || w % patch != 0) {
    throw std::invalid_argument("patch size must divide both raster extents");
  }
  const int ph = h / patch, pw = w / patch;
  ad::Matrix out(ph * pw, 8 * patch * patch, 0.0);
  for (int pr = 0; pr < ph; ++pr) {
    for (int pc = 0; pc < pw; ++pc) {
      const int row = pr * pw + pc;
      int col = 0;
      for (int dr = 0; dr < patch; ++dr) {
        for (int dc = 0; dc < patch; ++dc) {
          const ScatteringMatrix& s = raster.pixels.at(pr * patch + dr, pc * patch + dc);
          out.at(row, col++) = s.hh.real();
          out.at(row, col++) = s.hh.imag();
          out.at(row, col++) = s.hv.real();
          out.at(row, col++) = s.hv.imag();
          out.at(row, col++) = s.vh.real();
          out.at(row, col++) = s.vh.imag();
          out.at(row, col++) = s.vv.real();
          out.at(row, col++) = s.vv.imag();
        }
      }
    }
  }
  return out;
}

ad::Value encode(ad::Tape& tape, const std::vector<ad::Value>& encoder_weights,
                 ad::Value input) {
  if (encoder_weights.empty()) throw std::invalid_argument("encoder has no weights");
  ad::Value x = input;
  for (std::size_t i = 0; i < encoder_weights.size(); ++i) {
    x = tape.matmul(x, encoder_weights[i]);
    if (i + 1 < encoder_weights.size()) x = tape.tanh(x);
  }
  return x;
}

ad::Value masked_cross_attention(ad::Tape& tape, ad::Value queries,
                                 ad::Value features, const ad::Matrix& mask) {
  const ad::Value logits = tape.matmul(queries, tape.transpose(features));
  const ad::Value attn = tape.softmax_rows(tape.masked_add(logits, mask));
  return tape.add(tape.matmul(attn, features), queries);
}

ad::Value query_self_attention(ad::Tape& tape, ad::Value queries) {
  const ad::Value attn =
      tape.softmax_rows(tape.matmul(queries, tape.transpose(queries)));
  return tape.add(tape.matmul(attn, queries), queries);
}

ad::Value decoder_layer(ad::Tape& tape, ad::Value queries, ad::Value features,
                        const ad::Matrix& mask) {
  return query_self_attention(
      tape, masked_cross_attention(tape, queries, features, mask));
}

ad::Matrix update_mask(const ad::Matrix& coefficients, int* blocked_rows) {
  ad::Matrix mask(coefficients.rows, coefficients.cols, 0.0);
  int blocked = 0;
  for (int r = 0; r < coefficients.rows; ++r) {
    bool any_open = false;
    for (int c = 0; c < coefficients.cols; ++c) {
      const double v = coefficients.at(r, c);
      if (v < 0.0 || v > 1.0 || !std::isfinite(v)) {
        throw std::invalid_argument("mask coefficients must lie in [0, 1]");
      }
      if (v >= kMaskThreshold) {
        any_open = true;
      } else {
        mask.at(r, c) = kMaskBlocked;
      }
    }
    if (!any_open) ++blocked;
  }
  if (blocked_rows) *blocked_rows = blocked;
  return mask;
}

ad::Matrix open_mask(int rows, int cols) { return ad::Matrix(rows, cols, 0.0); }

ad::Matrix downsample_labels(const BinaryLabelStack& labels, int patch) {
  const int h = labels.masks[0].height, w = labels.masks[0].width;
  if (patch < 1 || h % patch != 0 || w % patch != 0) {
    throw std::invalid_argument("patch size must divide label extents");
  }
  const int ph = h / patch, pw = w / patch;
  ad::Matrix out(kComponentCount, ph * pw, 0.0);
  for (int comp = 0; comp < kComponentCount; ++comp) {
    const MaskGrid& mask = labels.masks[static_cast<std::size_t>(comp)];
    for (int pr = 0; pr < ph; ++pr) {
      for (int pc = 0; pc < pw; ++pc) {
        int ones = 0;
        for (int dr = 0; dr < patch; ++dr) {
          for (int dc = 0; dc < patch; ++dc) {
            ones += mask.at(pr * patch + dr, pc * patch + dc);
          }
        }
        // ties vote 1
        out.at(comp, pr * pw + pc) = 2 * ones >= patch * patch ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

ad::Matrix downsample_span(const RealGrid& span, int patch) {
  const int h = span.height, w = span.width;
  if (patch < 1 || h % patch != 0 || w % patch != 0) {
    throw std::invalid_argument("patch size must divide span extents");
  }
  const int ph = h / patch, pw = w / patch;
  ad::Matrix out(1, ph * pw, 0.0);
  const double inv = 1.0 / (patch * patch);
  for (int pr = 0; pr < ph; ++pr) {
    for (int pc = 0; pc < pw; ++pc) {
      double acc = 0.0;
      for (int dr = 0; dr < patch; ++dr) {
        for (int dc = 0; dc < patch; ++dc) {
          acc += span.at(pr * patch + dr, pc * patch + dc);
        }
      }
      out.at(0, pr * pw + pc) = acc * inv;
    }
  }
  return out;
}

ForwardResult model_forward(ad::Tape& tape, const std::vector<ad::Value>& params,
                            const ad::Matrix& input, const ad::Matrix& labels,
                            const ad::Matrix& span_row, double alpha,
                            const MaskSet* frozen) {
  if (params.size() < 3) throw std::invalid_argument("missing parameter groups");
  const std::size_t n_enc = params.size() - 2;
  std::vector<ad::Value> enc(params.begin(), params.begin() + n_enc);
  const ad::Value yam_bank = params[n_enc];
  const ad::Value dec_bank = params[n_enc + 1];

  ForwardResult out;
  const ad::Value in = tape.leaf(input);
  out.features = encode(tape, enc, in);

  const ad::Value yam_final =
      run_bank(tape, yam_bank, out.features, frozen ? &frozen->yamaguchi : nullptr,
               &out.masks.yamaguchi, &out.blocked_rows);
  const ad::Value dec_final =
      run_bank(tape, dec_bank, out.features, frozen ? &frozen->decomp : nullptr,
               &out.masks.decomp, &out.blocked_rows);

  const ad::Value ft = tape.transpose(out.features);
  const ad::Value yam_logits = tape.matmul(yam_final, ft);
  out.yamaguchi_maps = tape.sigmoid(yam_logits);
  const ad::Value dec_logits = tape.matmul(dec_final, ft);
  out.decomp_maps = tape.softplus(dec_logits);

  // power adapter: sum the ten coefficient maps per patch
  const ad::Value ones = tape.leaf(ad::Matrix(1, kBasisCount, 1.0));
  out.power_map = tape.matmul(ones, out.decomp_maps);

  out.loss_yamaguchi = tape.bce_with_logits_mean(yam_logits, labels);
  const ad::Value resid = tape.sub(out.power_map, tape.leaf(span_row));
  out.loss_power = tape.mean(tape.mul(resid, resid));
  out.loss = tape.add(out.loss_yamaguchi, tape.scale(out.loss_power, alpha));
  return out;
}

std::vector<ad::Matrix> flatten_params(const ModelParams& p) {
  std::vector<ad::Matrix> flat = p.encoder;
  flat.push_back(p.yamaguchi_bank);
  flat.push_back(p.decomp_bank);
  return flat;
}

ModelParams unflatten_params(const std::vector<ad::Matrix>& flat, int encoder_layers) {
  if (static_cast<int>(flat.size()) != encoder_layers + 2) {
    throw std::invalid_argument("parameter count does not match encoder depth");
  }
  ModelParams p;
  p.encoder.assign(flat.begin(), flat.begin() + encoder_layers);
  p.yamaguchi_bank = flat[static_cast<std::size_t>(encoder_layers)];
  p.decomp_bank = flat[static_cast<std::size_t>(encoder_layers) + 1];
  return p;
}

TrainResult train(const PolsarRaster& scene, const BinaryLabelStack& labels,
                  const RealGrid& span, const EncoderConfig& ecfg,
                  const TrainConfig& tcfg) {
  if (tcfg.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  if (tcfg.iters < 1) throw std::invalid_argument("iterations must be >= 1");
  const ad::Matrix input = patch_embed_input(scene, ecfg.patch);
  const ad::Matrix labelsM = downsample_labels(labels, ecfg.patch);
  const ad::Matrix spanM = downsample_span(span, ecfg.patch);

  const auto queries = shipped_queries(kQuerySeed, kQuerySamplePairs);
  ModelParams params = init_params(ecfg, queries);
  std::vector<ad::Matrix> flat = flatten_params(params);

  TrainResult result;
  result.trace.reserve(static_cast<std::size_t>(tcfg.iters));
  for (int iter = 1; iter <= tcfg.iters; ++iter) {
    ad::Tape tape;
    std::vector<ad::Value> leaves;
    leaves.reserve(flat.size());
    for (const auto& m : flat) leaves.push_back(tape.leaf(m));
    const ForwardResult fwd =
        model_forward(tape, leaves, input, labelsM, spanM, tcfg.alpha);
    const double total = tape.value(fwd.loss).scalar();
    result.trace.push_back(LossRow{iter, total,
                                   tape.value(fwd.loss_yamaguchi).scalar(),
                                   tape.value(fwd.loss_power).scalar()});
    result.blocked_row_warnings += fwd.blocked_rows;
    if (!std::isfinite(total) || total > 1e6) {
      std::ostringstream msg;
      msg << "training diverged at iteration " << iter << " (loss " << total
          << ", lr " << tcfg.lr << ")";
      throw std::runtime_error(msg.str());
    }
    tape.backward(fwd.loss);
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const ad::Matrix& g = tape.grad(leaves[i]);
      for (std::size_t j = 0; j < flat[i].size(); ++j) {
        flat[i].data[j] -= tcfg.lr * g.data[j];
      }
    }
  }
  result.params = unflatten_params(flat, ecfg.layers);
  return result;
}

double EvalMetrics::mean_oa() const {
  double acc = 0.0;
  for (double v : oa) acc += v;
  return acc / kComponentCount;
}

double EvalMetrics::mean_miou() const {
  double acc = 0.0;
  for (double v : miou) acc += v;
  return acc / kComponentCount;
}

double EvalMetrics::mean_macc() const {
  double acc = 0.0;
  for (double v : macc) acc += v;
  return acc / kComponentCount;
}

EvalMetrics eval_metrics(const ad::Matrix& pred, const ad::Matrix& labels) {
  if (!pred.same_shape(labels) || pred.rows != kComponentCount) {
    throw std::invalid_argument("eval_metrics: shape mismatch");
  }
  EvalMetrics out;
  for (int comp = 0; comp < kComponentCount; ++comp) {
    long long tp = 0, tn = 0, fp = 0, fn = 0;
    for (int i = 0; i < pred.cols; ++i) {
      const int p = pred.at(comp, i) >= 0.5 ? 1 : 0;
      const int y = labels.at(comp, i) >= 0.5 ? 1 : 0;
      if (p == 1 && y == 1) ++tp;
      else if (p == 0 && y == 0) ++tn;
      else if (p == 1 && y == 0) ++fp;
      else ++fn;
    }
    const double total = static_cast<double>(pred.cols);
    const auto idx = static_cast<std::size_t>(comp);
    out.oa[idx] = 100.0 * static_cast<double>(tp + tn) / total;
    // per-class scores; an absent, never-predicted class scores perfect
    const double iou1 = (tp + fp + fn) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    const double iou0 = (tn + fp + fn) == 0 ? 1.0 : static_cast<double>(tn) / static_cast<double>(tn + fp + fn);
    out.miou[idx] = 100.0 * 0.5 * (iou0 + iou1);
    const double acc1 = (tp + fn) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double acc0 = (tn + fp) == 0 ? 1.0 : static_cast<double>(tn) / static_cast<double>(tn + fp);
    out.macc[idx] = 100.0 * 0.5 * (acc0 + acc1);
  }
  return out;
}

}  // namespace polsar
