#include "simtuple/network.hpp"

#include "simtuple/error.hpp"

#include <cmath>

namespace simtuple {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using CMap = Eigen::Map<const MatrixXd>;
using Map = Eigen::Map<MatrixXd>;

ConvSlot slot(std::size_t& offset, std::size_t cin, std::size_t cout, std::size_t k, std::size_t dilation) {
  ConvSlot s{offset, offset + cin * cout * k, cin, cout, dilation};
  offset = s.bias + cout;
  return s;
}

// Column range [t0, t0 + n) of the output that reads input columns shifted by off.
struct Span {
  Index t0 = 0;
  Index n = 0;
};

Span overlap(Index T, Index off) {
  const Index lo = std::max<Index>(0, -off);
  const Index hi = std::min<Index>(T, T - off);
  return {lo, std::max<Index>(0, hi - lo)};
}

// Stacks the k shifted copies of the input so one product evaluates every tap.
// Row tap * cin + c, column t holds in(c, t + offset(tap)), zero outside.
void unfold(const MatrixXd& in, std::size_t k, std::size_t dilation, MatrixXd& X) {
  const Index T = in.cols(), cin = in.rows();
  X.setZero(static_cast<Index>(k) * cin, T);
  const auto half = static_cast<Index>((k - 1) / 2);
  for (std::size_t tap = 0; tap < k; ++tap) {
    const Index off = (static_cast<Index>(tap) - half) * static_cast<Index>(dilation);
    const Span sp = overlap(T, off);
    if (sp.n > 0) X.block(static_cast<Index>(tap) * cin, sp.t0, cin, sp.n) = in.middleCols(sp.t0 + off, sp.n);
  }
}

// Taps are stored one cout x cin block after another, which is exactly a
// cout x (k * cin) column-major matrix matching the unfolded input.
void conv_forward(const Eigen::VectorXd& p, const ConvSlot& s, std::size_t k, const MatrixXd& in, MatrixXd& X,
                  MatrixXd& out) {
  unfold(in, k, s.dilation, X);
  const auto cout = static_cast<Index>(s.cout), kc = static_cast<Index>(k * s.cin);
  out.noalias() = CMap(p.data() + s.weight, cout, kc) * X;
  out.colwise() += Eigen::Map<const Eigen::VectorXd>(p.data() + s.bias, cout);
}

void conv_backward(const Eigen::VectorXd& p, const ConvSlot& s, std::size_t k, const MatrixXd& X,
                   const MatrixXd& gout, Eigen::VectorXd& g, MatrixXd* gin, MatrixXd& gX) {
  const Index T = X.cols();
  const auto cout = static_cast<Index>(s.cout), cin = static_cast<Index>(s.cin), kc = static_cast<Index>(k * s.cin);
  Eigen::Map<Eigen::VectorXd>(g.data() + s.bias, cout) += gout.rowwise().sum();
  Map(g.data() + s.weight, cout, kc).noalias() += gout * X.transpose();
  if (!gin) return;
  gX.noalias() = CMap(p.data() + s.weight, cout, kc).transpose() * gout;
  const auto half = static_cast<Index>((k - 1) / 2);
  for (std::size_t tap = 0; tap < k; ++tap) {
    const Index off = (static_cast<Index>(tap) - half) * static_cast<Index>(s.dilation);
    const Span sp = overlap(T, off);
    if (sp.n > 0) gin->middleCols(sp.t0 + off, sp.n) += gX.block(static_cast<Index>(tap) * cin, sp.t0, cin, sp.n);
  }
}

}  // namespace

Layout make_layout(const Architecture& arch) {
  Layout l;
  std::size_t offset = 0;
  l.stem = slot(offset, arch.in_channels, arch.width, arch.kernel, 1);
  for (std::size_t b = 0; b < arch.blocks; ++b) {
    const std::size_t dilation = std::size_t{1} << b;
    l.convs.push_back(slot(offset, arch.width, arch.width, arch.kernel, dilation));
    l.convs.push_back(slot(offset, arch.width, arch.width, arch.kernel, dilation));
  }
  l.head_weight = offset;
  l.head_bias = offset + arch.m * arch.width;
  l.size = l.head_bias + arch.m;
  return l;
}

std::size_t Architecture::param_count() const { return make_layout(*this).size; }

EmbeddingModel make_model(const Architecture& arch, std::uint64_t seed) {
  require(arch.in_channels >= 1 && arch.width >= 1 && arch.m >= 1, "architecture: sizes must be positive");
  require(arch.kernel % 2 == 1, "architecture: kernel size must be odd");
  EmbeddingModel model;
  model.arch = arch;
  model.rng.seed(seed);
  const Layout l = make_layout(arch);
  model.params = Eigen::VectorXd::Zero(static_cast<Index>(l.size));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto fill = [&](std::size_t offset, std::size_t count, double scale) {
    for (std::size_t i = 0; i < count; ++i) model.params[static_cast<Index>(offset + i)] = scale * normal(model.rng);
  };
  auto init_conv = [&](const ConvSlot& s) {
    fill(s.weight, s.cin * s.cout * arch.kernel, std::sqrt(2.0 / static_cast<double>(s.cin * arch.kernel)));
  };
  init_conv(l.stem);
  for (const auto& c : l.convs) init_conv(c);
  fill(l.head_weight, arch.m * arch.width, std::sqrt(1.0 / static_cast<double>(arch.width)));
  model.adam.reset(model.params.size());
  return model;
}

Eigen::VectorXd forward(const EmbeddingModel& model, const MatrixXd& input, ForwardCache* cache) {
  const Architecture& arch = model.arch;
  require(input.rows() == static_cast<Index>(arch.in_channels),
          "forward: input has " + std::to_string(input.rows()) + " channels, architecture expects " +
              std::to_string(arch.in_channels));
  require(input.cols() >= 1, "forward: empty input");
  const Layout l = make_layout(arch);
  require(model.params.size() == static_cast<Index>(l.size), "forward: parameter vector does not match architecture");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.input = &input;
  c.h.resize(arch.blocks + 1);
  c.a.resize(arch.blocks);
  c.cols.resize(1 + 2 * arch.blocks);

  conv_forward(model.params, l.stem, arch.kernel, input, c.cols[0], c.h[0]);
  c.h[0] = c.h[0].cwiseMax(0.0);
  for (std::size_t b = 0; b < arch.blocks; ++b) {
    conv_forward(model.params, l.convs[2 * b], arch.kernel, c.h[b], c.cols[1 + 2 * b], c.a[b]);
    c.a[b] = c.a[b].cwiseMax(0.0);
    conv_forward(model.params, l.convs[2 * b + 1], arch.kernel, c.a[b], c.cols[2 + 2 * b], c.h[b + 1]);
    c.h[b + 1] = (c.h[b + 1] + c.h[b]).cwiseMax(0.0);
  }
  c.pooled = c.h[arch.blocks].rowwise().mean();
  CMap W(model.params.data() + l.head_weight, static_cast<Index>(arch.m), static_cast<Index>(arch.width));
  return W * c.pooled + Eigen::Map<const Eigen::VectorXd>(model.params.data() + l.head_bias, static_cast<Index>(arch.m));
}

void backward(const EmbeddingModel& model, const ForwardCache& c, const Eigen::VectorXd& grad_out,
              Eigen::VectorXd& grad) {
  const Architecture& arch = model.arch;
  const Layout l = make_layout(arch);
  if (grad.size() != model.params.size()) grad = Eigen::VectorXd::Zero(model.params.size());
  const auto m = static_cast<Index>(arch.m), w = static_cast<Index>(arch.width);

  Map(grad.data() + l.head_weight, m, w).noalias() += grad_out * c.pooled.transpose();
  Eigen::Map<Eigen::VectorXd>(grad.data() + l.head_bias, m) += grad_out;
  const Eigen::VectorXd gp = CMap(model.params.data() + l.head_weight, m, w).transpose() * grad_out;

  const Index T = c.h[0].cols();
  MatrixXd gh = (gp / static_cast<double>(T)).replicate(1, T);
  MatrixXd ga, gX;
  for (std::size_t b = arch.blocks; b-- > 0;) {
    // h[b+1] = relu(h[b] + conv2(relu(conv1(h[b]))))
    gh = (c.h[b + 1].array() > 0.0).select(gh, 0.0);
    ga.setZero(w, T);
    conv_backward(model.params, l.convs[2 * b + 1], arch.kernel, c.cols[2 + 2 * b], gh, grad, &ga, gX);
    ga = (c.a[b].array() > 0.0).select(ga, 0.0);
    conv_backward(model.params, l.convs[2 * b], arch.kernel, c.cols[1 + 2 * b], ga, grad, &gh, gX);
  }
  gh = (c.h[0].array() > 0.0).select(gh, 0.0);
  conv_backward(model.params, l.stem, arch.kernel, c.cols[0], gh, grad, nullptr, gX);
}

Eigen::VectorXd embed_scene(const EmbeddingModel& model, const Scene& scene) {
  return forward(model, network_input(scene, model.arch.input_spec()));
}

Eigen::MatrixXd embed_all(const EmbeddingModel& model, const std::vector<MatrixXd>& inputs) {
  MatrixXd out(static_cast<Index>(model.arch.m), static_cast<Index>(inputs.size()));
  ForwardCache cache;
  for (std::size_t i = 0; i < inputs.size(); ++i) out.col(static_cast<Index>(i)) = forward(model, inputs[i], &cache);
  return out;
}

}  // namespace simtuple
