// Copyright (c) 2026 The StarNav Authors. All Rights Reserved.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "starnav/star_transformer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "starnav/error.hpp"
#include "starnav/random.hpp"
#include "starnav/vocab.hpp"

namespace starnav {

void ModelConfig::validate() const {
  if (vocab_size < vocab::kMinVocabSize) throw Error(ErrorCode::ConfigError, "vocabulary too small for the action tokens");
  if (d_obs < 1 || model_dim < 1 || num_heads < 1 || num_layers < 1 || ffn_mult < 1 || projector_hidden < 1) {
    throw Error(ErrorCode::ConfigError, "model dimensions must be positive");
  }
  if (model_dim % num_heads != 0) throw Error(ErrorCode::ConfigError, "model_dim must be divisible by num_heads");
}

namespace {

constexpr double kLayerNormEps = 1e-5;

template <class S>
S gelu(S x) {
  const S c = static_cast<S>(std::sqrt(2.0 / std::numbers::pi));
  return S(0.5) * x * (S(1) + std::tanh(c * (x + S(0.044715) * x * x * x)));
}

template <class S>
S gelu_grad(S x) {
  const S c = static_cast<S>(std::sqrt(2.0 / std::numbers::pi));
  const S t = std::tanh(c * (x + S(0.044715) * x * x * x));
  return S(0.5) * (S(1) + t) + S(0.5) * x * (S(1) - t * t) * c * (S(1) + S(3 * 0.044715) * x * x);
}

template <class S>
void layer_norm(const MatrixX<S>& x, const MatrixX<S>& gain, const MatrixX<S>& bias, MatrixX<S>& hat,
                VectorX<S>& rstd, MatrixX<S>& out) {
  const VectorX<S> mean = x.rowwise().mean();
  hat = x.colwise() - mean;
  rstd = (hat.array().square().rowwise().mean() + static_cast<S>(kLayerNormEps)).rsqrt().matrix();
  hat.array().colwise() *= rstd.array();
  out = (hat.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array();
}

template <class S>
MatrixX<S> layer_norm_backward(const MatrixX<S>& d_out, const MatrixX<S>& hat, const VectorX<S>& rstd,
                               const MatrixX<S>& gain, MatrixX<S>& d_gain, MatrixX<S>& d_bias) {
  d_gain += (d_out.array() * hat.array()).colwise().sum().matrix();
  d_bias += d_out.colwise().sum();
  const MatrixX<S> d_hat = (d_out.array().rowwise() * gain.row(0).array()).matrix();
  const VectorX<S> mean_d = d_hat.rowwise().mean();
  const VectorX<S> mean_dh = (d_hat.array() * hat.array()).rowwise().mean().matrix();
  MatrixX<S> dx = d_hat;
  dx.colwise() -= mean_d;
  dx -= (hat.array().colwise() * mean_dh.array()).matrix();
  dx.array().colwise() *= rstd.array();
  return dx;
}

template <class S>
void check_finite(const MatrixX<S>& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NumericError, std::string("non-finite values in ") + what);
}

template <class S>
void fill_normal(MatrixX<S>& m, Rng& rng, double std) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<S>(std * rng.normal());
}

}  // namespace

template <class S>
StarAttParams<S> StarAttParams<S>::zeros(int model_dim, int num_heads) {
  StarAttParams p;
  p.num_heads = num_heads;
  p.wq = MatrixX<S>::Zero(model_dim, model_dim);
  p.wk = MatrixX<S>::Zero(model_dim, model_dim);
  p.wv = MatrixX<S>::Zero(model_dim, model_dim);
  p.wo = MatrixX<S>::Zero(model_dim, model_dim);
  p.bo = MatrixX<S>::Zero(1, model_dim);
  p.alpha = MatrixX<S>::Zero(1, num_heads);
  return p;
}

template <class S>
StarModel<S> init_model(const ModelConfig& config) {
  config.validate();
  Rng rng(mix_seed({config.seed, 0x6d6f64656cULL}));
  const int dm = config.model_dim;
  const int hidden = dm * config.ffn_mult;
  const double depth_scale = 1.0 / std::sqrt(2.0 * config.num_layers);

  StarModel<S> model;
  model.config = config;
  auto& p = model.params;
  p.token_embedding.resize(config.vocab_size, dm);
  fill_normal(p.token_embedding, rng, 1.0);
  p.proj_w1.resize(config.d_obs, config.projector_hidden);
  fill_normal(p.proj_w1, rng, 1.0 / std::sqrt(config.d_obs));
  p.proj_b1 = MatrixX<S>::Zero(1, config.projector_hidden);
  p.proj_w2.resize(config.projector_hidden, dm);
  fill_normal(p.proj_w2, rng, 1.0 / std::sqrt(config.projector_hidden));
  p.proj_b2 = MatrixX<S>::Zero(1, dm);

  p.blocks.resize(config.num_layers);
  for (auto& b : p.blocks) {
    b.ln1_gain = MatrixX<S>::Ones(1, dm);
    b.ln1_bias = MatrixX<S>::Zero(1, dm);
    b.attention = StarAttParams<S>::zeros(dm, config.num_heads);
    fill_normal(b.attention.wq, rng, 1.0 / std::sqrt(dm));
    fill_normal(b.attention.wk, rng, 1.0 / std::sqrt(dm));
    fill_normal(b.attention.wv, rng, 1.0 / std::sqrt(dm));
    fill_normal(b.attention.wo, rng, depth_scale / std::sqrt(dm));
    b.ln2_gain = MatrixX<S>::Ones(1, dm);
    b.ln2_bias = MatrixX<S>::Zero(1, dm);
    b.ff_w1.resize(dm, hidden);
    fill_normal(b.ff_w1, rng, 1.0 / std::sqrt(dm));
    b.ff_b1 = MatrixX<S>::Zero(1, hidden);
    b.ff_w2.resize(hidden, dm);
    fill_normal(b.ff_w2, rng, depth_scale / std::sqrt(hidden));
    b.ff_b2 = MatrixX<S>::Zero(1, dm);
  }
  p.lnf_gain = MatrixX<S>::Ones(1, dm);
  p.lnf_bias = MatrixX<S>::Zero(1, dm);
  p.out_w.resize(dm, config.vocab_size);
  fill_normal(p.out_w, rng, 0.5 / std::sqrt(dm));
  p.out_b = MatrixX<S>::Zero(1, config.vocab_size);
  return model;
}

template <class S>
MatrixX<S> star_attention(const MatrixX<S>& x, const MatrixX<S>& d_hat, const StarAttParams<S>& params, bool causal,
                          AttentionTrace<S>* trace, int query_offset) {
  const Eigen::Index L = x.rows();
  const Eigen::Index dm = x.cols();
  const int heads = params.num_heads;
  if (heads < 1 || dm % heads != 0 || params.wq.rows() != dm || params.wq.cols() != dm || params.wk.rows() != dm ||
      params.wv.rows() != dm || params.wo.rows() != dm || params.alpha.cols() != heads) {
    throw Error(ErrorCode::ShapeError, "attention parameters do not match the input width");
  }
  if (d_hat.rows() != L || d_hat.cols() != L) throw Error(ErrorCode::ShapeError, "affinity matrix must be L x L");
  if (query_offset < 0 || query_offset >= L) throw Error(ErrorCode::ShapeError, "query offset out of range");
  check_finite(x, "attention input");
  check_finite(d_hat, "affinity matrix");

  const Eigen::Index d = dm / heads;
  const Eigen::Index m = L - query_offset;
  const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(d)));
  const S neg_inf = -std::numeric_limits<S>::infinity();

  AttentionTrace<S> local;
  AttentionTrace<S>& t = trace ? *trace : local;
  t.query_offset = query_offset;
  t.q.noalias() = x.bottomRows(m) * params.wq;
  t.k.noalias() = x * params.wk;
  t.v.noalias() = x * params.wv;
  t.scores.resize(heads);
  t.weights.resize(heads);
  t.context.resize(m, dm);

  for (int h = 0; h < heads; ++h) {
    MatrixX<S>& s = t.scores[h];
    s.noalias() = t.q.middleCols(h * d, d) * t.k.middleCols(h * d, d).transpose();
    s *= scale;
    s.noalias() += params.alpha(0, h) * (-d_hat.bottomRows(m));
    if (causal) {
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index first_hidden = query_offset + i + 1;
        if (first_hidden < L) s.row(i).tail(L - first_hidden).setConstant(neg_inf);
      }
    }
    MatrixX<S>& w = t.weights[h];
    const VectorX<S> row_max = s.rowwise().maxCoeff();
    w = (s.colwise() - row_max).array().exp().matrix();
    const VectorX<S> row_sum = w.rowwise().sum();
    w.array().colwise() /= row_sum.array();
    t.context.middleCols(h * d, d).noalias() = w * t.v.middleCols(h * d, d);
  }
  MatrixX<S> out = t.context * params.wo;
  out.rowwise() += params.bo.row(0);
  return out;
}

template <class S>
MatrixX<S> star_attention_backward(const MatrixX<S>& d_out, const MatrixX<S>& x, const MatrixX<S>& d_hat,
                                   const StarAttParams<S>& params, const AttentionTrace<S>& t,
                                   StarAttParams<S>& grad) {
  const Eigen::Index L = x.rows();
  const Eigen::Index dm = x.cols();
  const int heads = params.num_heads;
  const Eigen::Index d = dm / heads;
  const Eigen::Index m = L - t.query_offset;
  if (d_out.rows() != m || d_out.cols() != dm) throw Error(ErrorCode::ShapeError, "attention output gradient shape");
  const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(d)));

  grad.wo.noalias() += t.context.transpose() * d_out;
  grad.bo += d_out.colwise().sum();
  const MatrixX<S> d_ctx = d_out * params.wo.transpose();

  MatrixX<S> dq(m, dm), dk = MatrixX<S>::Zero(L, dm), dv = MatrixX<S>::Zero(L, dm);
  for (int h = 0; h < heads; ++h) {
    const MatrixX<S>& w = t.weights[h];
    const auto d_ctx_h = d_ctx.middleCols(h * d, d);
    dv.middleCols(h * d, d).noalias() += w.transpose() * d_ctx_h;
    const MatrixX<S> dw = d_ctx_h * t.v.middleCols(h * d, d).transpose();
    const VectorX<S> inner = (dw.array() * w.array()).rowwise().sum().matrix();
    MatrixX<S> ds = (w.array() * (dw.colwise() - inner).array()).matrix();
    grad.alpha(0, h) -= (ds.array() * d_hat.bottomRows(m).array()).sum();
    dq.middleCols(h * d, d).noalias() = scale * (ds * t.k.middleCols(h * d, d));
    dk.middleCols(h * d, d).noalias() += scale * (ds.transpose() * t.q.middleCols(h * d, d));
  }
  grad.wq.noalias() += x.bottomRows(m).transpose() * dq;
  grad.wk.noalias() += x.transpose() * dk;
  grad.wv.noalias() += x.transpose() * dv;
  MatrixX<S> dx = dk * params.wk.transpose();
  dx.noalias() += dv * params.wv.transpose();
  dx.bottomRows(m).noalias() += dq * params.wq.transpose();
  return dx;
}

template <class S>
MatrixX<S> sinusoidal_positions(int length, int model_dim) {
  MatrixX<S> pe(length, model_dim);
  for (int p = 0; p < length; ++p) {
    for (int i = 0; i < model_dim; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / model_dim);
      pe(p, i) = static_cast<S>(i % 2 == 0 ? std::sin(p * freq) : std::cos(p * freq));
    }
  }
  return pe;
}

namespace {

template <class S>
MatrixX<S> block_forward(const BlockParams<S>& b, const MatrixX<S>& x, const MatrixX<S>& d_hat, bool causal,
                         int offset, LayerTrace<S>& t) {
  const Eigen::Index m = x.rows() - offset;
  t.query_offset = offset;
  layer_norm(x, b.ln1_gain, b.ln1_bias, t.ln1_hat, t.ln1_rstd, t.ln1_out);
  t.mid = x.bottomRows(m) + star_attention(t.ln1_out, d_hat, b.attention, causal, &t.attention, offset);
  layer_norm(t.mid, b.ln2_gain, b.ln2_bias, t.ln2_hat, t.ln2_rstd, t.ln2_out);
  t.ff_pre = t.ln2_out * b.ff_w1;
  t.ff_pre.rowwise() += b.ff_b1.row(0);
  t.ff_act = t.ff_pre.unaryExpr([](S v) { return gelu(v); });
  t.output = t.mid + t.ff_act * b.ff_w2;
  t.output.rowwise() += b.ff_b2.row(0);
  return t.output;
}

template <class S>
MatrixX<S> block_backward(const BlockParams<S>& b, const LayerTrace<S>& t, const MatrixX<S>& d_hat,
                          const MatrixX<S>& d_output, BlockParams<S>& g) {
  const Eigen::Index L = t.ln1_out.rows();
  const Eigen::Index m = d_output.rows();
  MatrixX<S> d_mid = d_output;
  g.ff_w2.noalias() += t.ff_act.transpose() * d_output;
  g.ff_b2 += d_output.colwise().sum();
  MatrixX<S> d_pre = d_output * b.ff_w2.transpose();
  d_pre.array() *= t.ff_pre.unaryExpr([](S v) { return gelu_grad(v); }).array();
  g.ff_w1.noalias() += t.ln2_out.transpose() * d_pre;
  g.ff_b1 += d_pre.colwise().sum();
  const MatrixX<S> d_ln2 = d_pre * b.ff_w1.transpose();
  d_mid += layer_norm_backward(d_ln2, t.ln2_hat, t.ln2_rstd, b.ln2_gain, g.ln2_gain, g.ln2_bias);

  const MatrixX<S> d_ln1 = star_attention_backward(d_mid, t.ln1_out, d_hat, b.attention, t.attention, g.attention);
  MatrixX<S> dx = layer_norm_backward(d_ln1, t.ln1_hat, t.ln1_rstd, b.ln1_gain, g.ln1_gain, g.ln1_bias);
  dx.bottomRows(m) += d_mid;
  (void)L;
  return dx;
}

}  // namespace

template <class S>
ForwardTrace<S> forward(const StarModel<S>& model, const PromptSequence& prompt, const Eigen::MatrixXd& d_hat,
                        ForwardMode mode) {
  const ModelConfig& cfg = model.config;
  const auto& p = model.params;
  const int L = prompt.length();
  if (L == 0) throw Error(ErrorCode::ShapeError, "empty prompt");
  if (d_hat.rows() != L || d_hat.cols() != L) throw Error(ErrorCode::ShapeError, "affinity matrix does not match prompt length");
  if (prompt.visual_count() > 0 && prompt.visual_features.cols() != cfg.d_obs) {
    throw Error(ErrorCode::ShapeError, "visual feature width does not match the model");
  }
  if (!d_hat.allFinite()) throw Error(ErrorCode::NumericError, "non-finite affinity matrix");
  if ((d_hat.array() < 0.0).any() || (d_hat - d_hat.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::InconsistentState, "affinity matrix must be symmetric and non-negative");
  }

  ForwardTrace<S> t;
  t.length = L;
  t.tokens = prompt.tokens;
  t.visual_row = prompt.visual_row;
  t.d_hat = d_hat.cast<S>();

  MatrixX<S> visual;
  if (prompt.visual_count() > 0) {
    t.visual_in = prompt.visual_features.cast<S>();
    check_finite(t.visual_in, "visual features");
    t.proj_pre = t.visual_in * p.proj_w1;
    t.proj_pre.rowwise() += p.proj_b1.row(0);
    t.proj_act = t.proj_pre.unaryExpr([](S v) { return gelu(v); });
    visual = t.proj_act * p.proj_w2;
    visual.rowwise() += p.proj_b2.row(0);
  }

  t.embedded.resize(L, cfg.model_dim);
  for (int pos = 0; pos < L; ++pos) {
    if (prompt.visual_row[pos] >= 0) {
      t.embedded.row(pos) = visual.row(prompt.visual_row[pos]);
    } else {
      const int tok = prompt.tokens[pos];
      if (tok < 0 || tok >= cfg.vocab_size) throw Error(ErrorCode::ShapeError, "token id outside the vocabulary");
      t.embedded.row(pos) = p.token_embedding.row(tok);
    }
  }
  if (cfg.positional) t.embedded += sinusoidal_positions<S>(L, cfg.model_dim);

  MatrixX<S> x = t.embedded;
  t.layers.resize(p.blocks.size());
  for (std::size_t l = 0; l < p.blocks.size(); ++l) {
    const bool last = l + 1 == p.blocks.size();
    const int offset = (mode == ForwardMode::DecisionOnly && last) ? L - 1 : 0;
    x = block_forward(p.blocks[l], x, t.d_hat, cfg.causal, offset, t.layers[l]);
  }

  const MatrixX<S> last_row = x.bottomRows(1);
  MatrixX<S> hat, hidden;
  VectorX<S> rstd;
  layer_norm(last_row, p.lnf_gain, p.lnf_bias, hat, rstd, hidden);
  t.final_hat = hat;
  t.final_hidden = hidden;
  t.final_rstd = rstd(0);
  t.logits = t.final_hidden * p.out_w + p.out_b;
  check_finite(MatrixX<S>(t.logits), "logits");
  return t;
}

template <class S>
S sap_loss(const ForwardTrace<S>& trace, int gt_token) {
  if (gt_token < 0 || gt_token >= trace.logits.size()) throw Error(ErrorCode::ShapeError, "label outside the vocabulary");
  const S max = trace.logits.maxCoeff();
  const S lse = max + std::log((trace.logits.array() - max).exp().sum());
  return lse - trace.logits(gt_token);
}

template <class S>
void backward_accumulate(const StarModel<S>& model, const ForwardTrace<S>& t, int gt_token, S loss_scale,
                         ModelParams<S>& g) {
  const auto& p = model.params;
  const int L = t.length;

  RowVectorX<S> d_logits = (t.logits.array() - t.logits.maxCoeff()).exp().matrix();
  d_logits /= d_logits.sum();
  d_logits(gt_token) -= S(1);
  d_logits *= loss_scale;

  g.out_w.noalias() += t.final_hidden.transpose() * d_logits;
  g.out_b += d_logits;
  const MatrixX<S> d_hidden = d_logits * p.out_w.transpose();
  VectorX<S> rstd(1);
  rstd(0) = t.final_rstd;
  const MatrixX<S> d_last = layer_norm_backward(d_hidden, MatrixX<S>(t.final_hat), rstd, p.lnf_gain, g.lnf_gain, g.lnf_bias);

  MatrixX<S> dx = MatrixX<S>::Zero(t.layers.back().output.rows(), model.config.model_dim);
  dx.bottomRows(1) = d_last;
  for (std::size_t l = p.blocks.size(); l-- > 0;) {
    dx = block_backward(p.blocks[l], t.layers[l], t.d_hat, dx, g.blocks[l]);
  }

  MatrixX<S> d_visual;
  if (t.visual_in.rows() > 0) d_visual = MatrixX<S>::Zero(t.visual_in.rows(), model.config.model_dim);
  for (int pos = 0; pos < L; ++pos) {
    if (t.visual_row[pos] >= 0) {
      d_visual.row(t.visual_row[pos]) += dx.row(pos);
    } else {
      g.token_embedding.row(t.tokens[pos]) += dx.row(pos);
    }
  }
  if (t.visual_in.rows() > 0) {
    g.proj_w2.noalias() += t.proj_act.transpose() * d_visual;
    g.proj_b2 += d_visual.colwise().sum();
    MatrixX<S> d_pre = d_visual * p.proj_w2.transpose();
    d_pre.array() *= t.proj_pre.unaryExpr([](S v) { return gelu_grad(v); }).array();
    g.proj_w1.noalias() += t.visual_in.transpose() * d_pre;
    g.proj_b1 += d_pre.colwise().sum();
  }
}

template <class S>
ModelParams<S> backward(const StarModel<S>& model, const ForwardTrace<S>& trace, int gt_token, S loss_scale) {
  ModelParams<S> g = model.params.zeros_like();
  backward_accumulate(model, trace, gt_token, loss_scale, g);
  return g;
}

#define STARNAV_INSTANTIATE(S)                                                                                    \
  template struct StarAttParams<S>;                                                                              \
  template StarModel<S> init_model<S>(const ModelConfig&);                                                       \
  template MatrixX<S> star_attention<S>(const MatrixX<S>&, const MatrixX<S>&, const StarAttParams<S>&, bool,     \
                                        AttentionTrace<S>*, int);                                                \
  template MatrixX<S> star_attention_backward<S>(const MatrixX<S>&, const MatrixX<S>&, const MatrixX<S>&,        \
                                                 const StarAttParams<S>&, const AttentionTrace<S>&,              \
                                                 StarAttParams<S>&);                                             \
  template MatrixX<S> sinusoidal_positions<S>(int, int);                                                         \
  template ForwardTrace<S> forward<S>(const StarModel<S>&, const PromptSequence&, const Eigen::MatrixXd&,        \
                                      ForwardMode);                                                              \
  template S sap_loss<S>(const ForwardTrace<S>&, int);                                                           \
  template void backward_accumulate<S>(const StarModel<S>&, const ForwardTrace<S>&, int, S, ModelParams<S>&);    \
  template ModelParams<S> backward<S>(const StarModel<S>&, const ForwardTrace<S>&, int, S);

STARNAV_INSTANTIATE(float)
STARNAV_INSTANTIATE(double)

#undef STARNAV_INSTANTIATE

}  // namespace starnav
