#pragma once

#include "simtuple/adam.hpp"
#include "simtuple/network_input.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

namespace simtuple {

/// Temporal convolutional residual network: a stem convolution, `blocks`
/// residual blocks of two dilated convolutions (dilation 2^b), global average
/// pooling over time and a linear head to m outputs. All convolutions are
/// zero-padded to keep the temporal length.
struct Architecture {
  std::size_t in_channels = 46;
  std::size_t width = 32;
  std::size_t kernel = 5;
  std::size_t blocks = 2;
  std::size_t m = 64;
  /// Temporal pooling applied to scenes before they enter the network.
  std::size_t input_pool = 1;

  std::size_t param_count() const;
  InputSpec input_spec() const { return InputSpec{input_pool, Pitch{}}; }
  bool operator==(const Architecture&) const = default;
};

/// Parameters of one convolution inside the flat parameter vector.
struct ConvSlot {
  std::size_t weight = 0;  ///< offset of kernel taps, each cout x cin column-major
  std::size_t bias = 0;
  std::size_t cin = 0;
  std::size_t cout = 0;
  std::size_t dilation = 1;
};

struct Layout {
  ConvSlot stem;
  std::vector<ConvSlot> convs;  ///< two per block
  std::size_t head_weight = 0;  ///< m x width column-major
  std::size_t head_bias = 0;
  std::size_t size = 0;
};

Layout make_layout(const Architecture& arch);

struct EmbeddingModel {
  Architecture arch;
  Eigen::VectorXd params;
  /// Incremented by every training call that updates parameters.
  std::uint64_t version = 0;
  /// Drives batch shuffling; stored in checkpoints.
  std::mt19937_64 rng;
  AdamState adam;
};

/// He-initialized model. Deterministic in `seed`.
EmbeddingModel make_model(const Architecture& arch, std::uint64_t seed);

/// Intermediate activations kept for the backward pass.
struct ForwardCache {
  const Eigen::MatrixXd* input = nullptr;
  std::vector<Eigen::MatrixXd> h;  ///< stem output, then each block output
  std::vector<Eigen::MatrixXd> a;  ///< inner activation of each block
  /// Unfolded (kernel * channels) x T input of every convolution, stem first.
  std::vector<Eigen::MatrixXd> cols;
  Eigen::VectorXd pooled;
};

/// Embeds one network input (see network_input). Throws invalid_input when
/// the channel count does not match the architecture.
Eigen::VectorXd forward(const EmbeddingModel& model, const Eigen::MatrixXd& input,
                        ForwardCache* cache = nullptr);

/// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
void backward(const EmbeddingModel& model, const ForwardCache& cache,
              const Eigen::VectorXd& grad_out, Eigen::VectorXd& grad);

/// Embeds a scene from raw coordinates (template order + normalization).
Eigen::VectorXd embed_scene(const EmbeddingModel& model, const Scene& scene);

/// m x N matrix of embeddings, column i for inputs[i].
Eigen::MatrixXd embed_all(const EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs);

}  // namespace simtuple
