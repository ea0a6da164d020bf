// SPDX-License-Identifier: Apache-2.0
//
// skybeam: beamforming simulator for two-layer airborne massive-MIMO networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Minimal reverse-mode differentiable compute: dense and same-padded 2-D
// convolution layers, ReLU, reparameterized Gaussian sampling with
// log-density, and Adam. Everything runs in 64-bit precision on the CPU.

#ifndef SKYBEAM_NEURAL_HPP
#define SKYBEAM_NEURAL_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "skybeam/rng.hpp"

namespace skybeam::neural {

struct Shape {
    std::array<long, 4> d{1, 1, 1, 1};
    int nd = 1;

    static Shape of(std::initializer_list<long> dims);
    long numel() const;
    bool operator==(const Shape &) const = default;
};

struct Tensor {
    Shape shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(s), v(std::size_t(s.numel()), 0.0) {}

    static Tensor zeros(Shape s) { return Tensor(s); }
    static Tensor scalar(double x);

    long numel() const { return shape.numel(); }
    double &operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    bool is_finite() const;
};

class Node;
using Var = std::shared_ptr<Node>;

class Node {
  public:
    Tensor val;
    Tensor grad; // allocated on first backward touch
    bool has_grad = false;
    bool requires_grad = false;
    std::vector<Var> parents;
    std::function<void(Node &)> backfn; // scatter this node's grad to parents
    std::uint64_t id = 0;

    void ensure_grad();       // allocate (zeroed) if absent
    void zero_grad();         // drop accumulated gradient
};

/// Log-std head outputs are clamped to this range before use; unbounded
/// log-std collapses or explodes the sampled beams numerically.
constexpr double kLogStdMin = -10.0;
constexpr double kLogStdMax = 4.0;

enum class SampleMode {
    kSample,
    kMean, // epsilon = 0, no rng consumption
};

/// One forward tape. Build ops through a Graph, call backward(loss) once;
/// a second backward without a fresh forward throws.
class Graph {
  public:
    explicit Graph(bool enable_grad = true) : grad_(enable_grad) {}

    Var leaf(Tensor value, bool requires_grad = false);

    /// Same-padded stride-1 cross-correlation plus bias. x is [N,Ci,H,W],
    /// kernel [Co,Ci,kh,kw] with odd kh/kw, bias [Co].
    Var conv2d(Var x, Var kernel, Var bias);

    /// Affine map: x [N,F], weight [O,F], bias [O] -> [N,O].
    Var dense(Var x, Var weight, Var bias);

    Var relu(Var x);

    /// [N,C,H,W] -> [N, C*H*W].
    Var flatten(Var x);

    /// [1,A] -> [N,A] (backward sums over rows).
    Var broadcast_rows(Var x, long n_rows);

    /// [N,A] ++ [N,B] -> [N,A+B].
    Var concat_cols(Var a, Var b);

    Var add(Var a, Var b);

    Var sum(Var x); // scalar

    /// (1/N) * sum_i coef[i] * x[i] for 1-D x; coef is a constant.
    Var weighted_mean(Var x, const Tensor &coef);

    /// Reparameterized draw a = mu + exp(clamped logsig) .* eps with
    /// eps ~ N(0, I), plus the per-row log-density
    /// logp[n] = sum_i (-logsig - 0.5*log(2*pi) - 0.5*eps^2).
    /// Returns {action [N,A], logp [N]}. `fixed_eps`, when given, replaces
    /// the draw (test hook).
    std::pair<Var, Var> gaussian_sample(Var mu, Var logsig, Rng &rng,
                                        SampleMode mode = SampleMode::kSample,
                                        const Tensor *fixed_eps = nullptr);

    /// Log-density of a fixed action under N(mu, exp(logsig)^2), per row.
    Var gaussian_logp(Var mu, Var logsig, const Tensor &action);

    /// Reverse-mode accumulation from a scalar loss into every reachable
    /// node's grad. Throws if the loss is not scalar or if this graph was
    /// already traversed.
    void backward(const Var &loss);

    bool grad_enabled() const { return grad_; }

  private:
    Var make(Tensor value);

    bool grad_;
    bool spent_ = false;
    std::vector<Var> tape_;
};

/// A trainable tensor: persistent leaf node plus Adam state.
struct Param {
    Var node;
    Tensor m, v; // Adam moments
    long step = 0;

    Param() = default;
    explicit Param(Tensor init);

    Tensor &value() { return node->val; }
    const Tensor &value() const { return node->val; }
    void zero_grad() { node->zero_grad(); }
};

/// One Adam update from the node's accumulated gradient (treated as zero if
/// nothing was backpropagated). Clears the gradient afterwards.
void adam_step(Param &p, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

/// I.i.d. Normal(0, std^2) tensor.
Tensor init_gaussian(Shape shape, Rng &rng, double std);

} // namespace skybeam::neural

#endif
