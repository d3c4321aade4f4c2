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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "starnav/prompt.hpp"

namespace starnav {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct ModelConfig {
  int vocab_size = 256;
  int d_obs = 32;
  int model_dim = 64;
  int num_heads = 4;
  int num_layers = 2;
  int ffn_mult = 4;
  int projector_hidden = 64;
  bool causal = true;
  bool positional = true;  // fixed sinusoidal position signal added to the embeddings
  std::uint64_t seed = 0;

  int head_dim() const { return model_dim / num_heads; }
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// One STAR-Att layer. `alpha` (1 x heads) scales the negated affinity matrix
/// into each head's scores; it has no additive term.
template <class Scalar>
struct StarAttParams {
  int num_heads = 1;
  MatrixX<Scalar> wq, wk, wv;  // model_dim x model_dim, head h owns columns [h*d, (h+1)*d)
  MatrixX<Scalar> wo;          // model_dim x model_dim
  MatrixX<Scalar> bo;          // 1 x model_dim
  MatrixX<Scalar> alpha;       // 1 x num_heads

  static StarAttParams zeros(int model_dim, int num_heads);
};

template <class Scalar>
struct BlockParams {
  MatrixX<Scalar> ln1_gain, ln1_bias;
  StarAttParams<Scalar> attention;
  MatrixX<Scalar> ln2_gain, ln2_bias;
  MatrixX<Scalar> ff_w1, ff_b1, ff_w2, ff_b2;
};

template <class Scalar>
struct ModelParams {
  MatrixX<Scalar> token_embedding;  // vocab x model_dim
  MatrixX<Scalar> proj_w1, proj_b1, proj_w2, proj_b2;
  std::vector<BlockParams<Scalar>> blocks;
  MatrixX<Scalar> lnf_gain, lnf_bias;
  MatrixX<Scalar> out_w, out_b;  // model_dim x vocab, 1 x vocab

  /// Visits every tensor as (name, matrix) in a fixed order.
  template <class F>
  void for_each(F&& f);
  template <class F>
  void for_each(F&& f) const;

  ModelParams zeros_like() const;
  Eigen::Index parameter_count() const;
};

template <class Scalar>
struct StarModel {
  ModelConfig config;
  ModelParams<Scalar> params;

  template <class Other>
  StarModel<Other> cast() const;
};

/// Seeded initialisation; per-head distance weights start at zero.
template <class Scalar>
StarModel<Scalar> init_model(const ModelConfig& config);

template <class Scalar>
struct AttentionTrace {
  int query_offset = 0;
  MatrixX<Scalar> q;  // queries for rows [query_offset, L)
  MatrixX<Scalar> k, v;
  std::vector<MatrixX<Scalar>> scores;   // per head, pre-softmax, masked entries = -inf
  std::vector<MatrixX<Scalar>> weights;  // per head, row-stochastic
  MatrixX<Scalar> context;               // heads concatenated, before the output projection
};

/// Multi-head attention with per-head residual distance bias
///   S_h = (X Wq_h)(X Wk_h)^T / sqrt(d) + alpha_h * (-d_hat),
/// causal masking applied after the bias. Only query rows from
/// `query_offset` on are produced.
template <class Scalar>
MatrixX<Scalar> star_attention(const MatrixX<Scalar>& x, const MatrixX<Scalar>& d_hat,
                               const StarAttParams<Scalar>& params, bool causal,
                               AttentionTrace<Scalar>* trace = nullptr, int query_offset = 0);

/// Accumulates parameter gradients into `grad` and returns dLoss/dx.
template <class Scalar>
MatrixX<Scalar> star_attention_backward(const MatrixX<Scalar>& d_out, const MatrixX<Scalar>& x,
                                        const MatrixX<Scalar>& d_hat, const StarAttParams<Scalar>& params,
                                        const AttentionTrace<Scalar>& trace, StarAttParams<Scalar>& grad);

enum class ForwardMode {
  Full,          // every layer computes every row
  DecisionOnly,  // the last layer only computes the decision row
};

template <class Scalar>
struct LayerTrace {
  int query_offset = 0;
  MatrixX<Scalar> ln1_hat, ln1_out;
  VectorX<Scalar> ln1_rstd;
  AttentionTrace<Scalar> attention;
  MatrixX<Scalar> mid;  // residual stream after attention, rows [offset, L)
  MatrixX<Scalar> ln2_hat, ln2_out;
  VectorX<Scalar> ln2_rstd;
  MatrixX<Scalar> ff_pre, ff_act;
  MatrixX<Scalar> output;  // rows [offset, L)
};

template <class Scalar>
struct ForwardTrace {
  int length = 0;
  std::vector<int> tokens;
  std::vector<int> visual_row;
  MatrixX<Scalar> d_hat;
  MatrixX<Scalar> visual_in, proj_pre, proj_act;
  MatrixX<Scalar> embedded;
  std::vector<LayerTrace<Scalar>> layers;
  RowVectorX<Scalar> final_hat, final_hidden;
  Scalar final_rstd = 0;
  RowVectorX<Scalar> logits;  // at the decision position
};

template <class Scalar>
ForwardTrace<Scalar> forward(const StarModel<Scalar>& model, const PromptSequence& prompt,
                             const Eigen::MatrixXd& d_hat, ForwardMode mode = ForwardMode::Full);

/// -log softmax(logits)[gt_token].
template <class Scalar>
Scalar sap_loss(const ForwardTrace<Scalar>& trace, int gt_token);

/// Gradients of loss_scale * sap_loss with respect to every parameter.
template <class Scalar>
ModelParams<Scalar> backward(const StarModel<Scalar>& model, const ForwardTrace<Scalar>& trace, int gt_token,
                             Scalar loss_scale = Scalar(1));

/// Same, accumulating into `grad` (used for batches).
template <class Scalar>
void backward_accumulate(const StarModel<Scalar>& model, const ForwardTrace<Scalar>& trace, int gt_token,
                         Scalar loss_scale, ModelParams<Scalar>& grad);

template <class Scalar>
MatrixX<Scalar> sinusoidal_positions(int length, int model_dim);

// ---------------------------------------------------------------------------

template <class Scalar>
template <class F>
void ModelParams<Scalar>::for_each(F&& f) {
  f("token_embedding", token_embedding);
  f("proj_w1", proj_w1);
  f("proj_b1", proj_b1);
  f("proj_w2", proj_w2);
  f("proj_b2", proj_b2);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string p = "block" + std::to_string(i) + ".";
    auto& b = blocks[i];
    f(p + "ln1_gain", b.ln1_gain);
    f(p + "ln1_bias", b.ln1_bias);
    f(p + "att.wq", b.attention.wq);
    f(p + "att.wk", b.attention.wk);
    f(p + "att.wv", b.attention.wv);
    f(p + "att.wo", b.attention.wo);
    f(p + "att.bo", b.attention.bo);
    f(p + "att.alpha", b.attention.alpha);
    f(p + "ln2_gain", b.ln2_gain);
    f(p + "ln2_bias", b.ln2_bias);
    f(p + "ff_w1", b.ff_w1);
    f(p + "ff_b1", b.ff_b1);
    f(p + "ff_w2", b.ff_w2);
    f(p + "ff_b2", b.ff_b2);
  }
  f("lnf_gain", lnf_gain);
  f("lnf_bias", lnf_bias);
  f("out_w", out_w);
  f("out_b", out_b);
}

template <class Scalar>
template <class F>
void ModelParams<Scalar>::for_each(F&& f) const {
  const_cast<ModelParams*>(this)->for_each(
      [&f](const std::string& name, MatrixX<Scalar>& m) { f(name, static_cast<const MatrixX<Scalar>&>(m)); });
}

template <class Scalar>
ModelParams<Scalar> ModelParams<Scalar>::zeros_like() const {
  ModelParams out = *this;
  out.for_each([](const std::string&, MatrixX<Scalar>& m) { m.setZero(); });
  return out;
}

template <class Scalar>
Eigen::Index ModelParams<Scalar>::parameter_count() const {
  Eigen::Index n = 0;
  for_each([&n](const std::string&, const MatrixX<Scalar>& m) { n += m.size(); });
  return n;
}

template <class Scalar>
template <class Other>
StarModel<Other> StarModel<Scalar>::cast() const {
  StarModel<Other> out;
  out.config = config;
  std::vector<const MatrixX<Scalar>*> src;
  params.for_each([&src](const std::string&, const MatrixX<Scalar>& m) { src.push_back(&m); });
  out.params.blocks.resize(params.blocks.size());
  std::size_t i = 0;
  out.params.for_each([&](const std::string&, MatrixX<Other>& m) { m = src[i++]->template cast<Other>(); });
  for (auto& b : out.params.blocks) b.attention.num_heads = config.num_heads;
  return out;
}

}  // namespace starnav
