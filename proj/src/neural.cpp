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

#include "skybeam/neural.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace skybeam::neural {

namespace {

std::atomic<std::uint64_t> g_next_node_id{1};

constexpr double kHalfLog2Pi = 0.9189385332046727; // 0.5*log(2*pi)

double clamp_logstd(double x) {
    return std::min(kLogStdMax, std::max(kLogStdMin, x));
}

double clamp_mask(double x) {
    return (x >= kLogStdMin && x <= kLogStdMax) ? 1.0 : 0.0;
}

void check_same_shape(const Tensor &a, const Tensor &b, const char *what) {
    if (!(a.shape == b.shape))
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

} // namespace

Shape Shape::of(std::initializer_list<long> dims) {
    if (dims.size() < 1 || dims.size() > 4)
        throw std::invalid_argument("Shape: 1 to 4 axes supported");
    Shape s;
    s.nd = int(dims.size());
    int i = 0;
    for (long d : dims)
    {
        if (d < 0)
            throw std::invalid_argument("Shape: negative dimension");
        s.d[std::size_t(i++)] = d;
    }
    for (; i < 4; ++i)
        s.d[std::size_t(i)] = 1;
    return s;
}

long Shape::numel() const {
    long n = 1;
    for (int i = 0; i < nd; ++i)
        n *= d[std::size_t(i)];
    return n;
}

Tensor Tensor::scalar(double x) {
    Tensor t(Shape::of({1}));
    t.v[0] = x;
    return t;
}

bool Tensor::is_finite() const {
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

void Node::ensure_grad() {
    if (!has_grad)
    {
        grad = Tensor::zeros(val.shape);
        has_grad = true;
    }
}

void Node::zero_grad() {
    if (has_grad)
        std::fill(grad.v.begin(), grad.v.end(), 0.0);
}

Var Graph::make(Tensor value) {
    auto node = std::make_shared<Node>();
    node->val = std::move(value);
    node->id = g_next_node_id.fetch_add(1);
    tape_.push_back(node);
    return node;
}

Var Graph::leaf(Tensor value, bool requires_grad) {
    Var n = make(std::move(value));
    n->requires_grad = requires_grad && grad_;
    return n;
}

Var Graph::conv2d(Var x, Var kernel, Var bias) {
    const Shape &xs = x->val.shape;
    const Shape &ks = kernel->val.shape;
    if (xs.nd != 4 || ks.nd != 4)
        throw std::invalid_argument("conv2d: expects 4-D input and kernel");
    const long n = xs.d[0], ci = xs.d[1], h = xs.d[2], w = xs.d[3];
    const long co = ks.d[0], kci = ks.d[1], kh = ks.d[2], kw = ks.d[3];
    if (kci != ci)
        throw std::invalid_argument("conv2d: channel mismatch");
    if (kh % 2 == 0 || kw % 2 == 0)
        throw std::invalid_argument("conv2d: same padding requires odd kernels");
    if (bias->val.numel() != co)
        throw std::invalid_argument("conv2d: bias size mismatch");
    const long ph = kh / 2, pw = kw / 2;

    Tensor out(Shape::of({n, co, h, w}));
    const double *xv = x->val.v.data();
    const double *kv = kernel->val.v.data();
    const double *bv = bias->val.v.data();
    double *ov = out.v.data();

    auto xi = [=](long nn, long c, long i, long j) {
        return ((nn * ci + c) * h + i) * w + j;
    };
    auto oi = [=](long nn, long c, long i, long j) {
        return ((nn * co + c) * h + i) * w + j;
    };
    auto ki = [=](long o, long c, long a, long b) {
        return ((o * ci + c) * kh + a) * kw + b;
    };

    for (long nn = 0; nn < n; ++nn)
        for (long o = 0; o < co; ++o)
            for (long i = 0; i < h; ++i)
                for (long j = 0; j < w; ++j)
                {
                    double acc = bv[o];
                    for (long c = 0; c < ci; ++c)
                        for (long a = 0; a < kh; ++a)
                        {
                            const long src_i = i + a - ph;
                            if (src_i < 0 || src_i >= h)
                                continue;
                            for (long b = 0; b < kw; ++b)
                            {
                                const long src_j = j + b - pw;
                                if (src_j < 0 || src_j >= w)
                                    continue;
                                acc += xv[xi(nn, c, src_i, src_j)] * kv[ki(o, c, a, b)];
                            }
                        }
                    ov[oi(nn, o, i, j)] = acc;
                }

    Var y = make(std::move(out));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {x, kernel, bias};
    y->backfn = [=](Node &self) {
        x->ensure_grad();
        kernel->ensure_grad();
        bias->ensure_grad();
        const double *gy = self.grad.v.data();
        const double *xvv = x->val.v.data();
        const double *kvv = kernel->val.v.data();
        double *gx = x->grad.v.data();
        double *gk = kernel->grad.v.data();
        double *gb = bias->grad.v.data();
        for (long nn = 0; nn < n; ++nn)
            for (long o = 0; o < co; ++o)
                for (long i = 0; i < h; ++i)
                    for (long j = 0; j < w; ++j)
                    {
                        const double g = gy[oi(nn, o, i, j)];
                        gb[o] += g;
                        for (long c = 0; c < ci; ++c)
                            for (long a = 0; a < kh; ++a)
                            {
                                const long src_i = i + a - ph;
                                if (src_i < 0 || src_i >= h)
                                    continue;
                                for (long b = 0; b < kw; ++b)
                                {
                                    const long src_j = j + b - pw;
                                    if (src_j < 0 || src_j >= w)
                                        continue;
                                    gx[xi(nn, c, src_i, src_j)] += g * kvv[ki(o, c, a, b)];
                                    gk[ki(o, c, a, b)] += g * xvv[xi(nn, c, src_i, src_j)];
                                }
                            }
                    }
    };
    return y;
}

Var Graph::dense(Var x, Var weight, Var bias) {
    const Shape &xs = x->val.shape;
    const Shape &ws = weight->val.shape;
    if (xs.nd != 2 || ws.nd != 2)
        throw std::invalid_argument("dense: expects 2-D input and weight");
    const long n = xs.d[0], f = xs.d[1];
    const long o = ws.d[0], wf = ws.d[1];
    if (wf != f)
        throw std::invalid_argument("dense: feature mismatch");
    if (bias->val.numel() != o)
        throw std::invalid_argument("dense: bias size mismatch");

    Tensor out(Shape::of({n, o}));
    const double *xv = x->val.v.data();
    const double *wv = weight->val.v.data();
    const double *bv = bias->val.v.data();
    double *ov = out.v.data();
    for (long nn = 0; nn < n; ++nn)
        for (long oo = 0; oo < o; ++oo)
        {
            const double *xr = xv + nn * f;
            const double *wr = wv + oo * f;
            double acc = bv[oo];
            for (long ff = 0; ff < f; ++ff)
                acc += xr[ff] * wr[ff];
            ov[nn * o + oo] = acc;
        }

    Var y = make(std::move(out));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {x, weight, bias};
    y->backfn = [=](Node &self) {
        x->ensure_grad();
        weight->ensure_grad();
        bias->ensure_grad();
        const double *gy = self.grad.v.data();
        const double *xv2 = x->val.v.data();
        const double *wv2 = weight->val.v.data();
        double *gx = x->grad.v.data();
        double *gw = weight->grad.v.data();
        double *gb = bias->grad.v.data();
        for (long nn = 0; nn < n; ++nn)
            for (long oo = 0; oo < o; ++oo)
            {
                const double g = gy[nn * o + oo];
                gb[oo] += g;
                const double *xr = xv2 + nn * f;
                const double *wr = wv2 + oo * f;
                double *gxr = gx + nn * f;
                double *gwr = gw + oo * f;
                for (long ff = 0; ff < f; ++ff)
                {
                    gxr[ff] += g * wr[ff];
                    gwr[ff] += g * xr[ff];
                }
            }
    };
    return y;
}

Var Graph::relu(Var x) {
    Tensor out = x->val;
    for (double &v : out.v)
        v = v > 0.0 ? v : 0.0;
    Var y = make(std::move(out));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {x};
    y->backfn = [=](Node &self) {
        x->ensure_grad();
        const double *gy = self.grad.v.data();
        const double *xv = x->val.v.data();
        double *gx = x->grad.v.data();
        const std::size_t n = x->val.v.size();
        for (std::size_t i = 0; i < n; ++i)
            if (xv[i] > 0.0) // subgradient at 0 is 0
                gx[i] += gy[i];
    };
    return y;
}

Var Graph::flatten(Var x) {
    const Shape &xs = x->val.shape;
    if (xs.nd != 4)
        throw std::invalid_argument("flatten: expects 4-D input");
    Tensor out = x->val;
    out.shape = Shape::of({xs.d[0], xs.d[1] * xs.d[2] * xs.d[3]});
    Var y = make(std::move(out));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {x};
    y->backfn = [=](Node &self) {
        x->ensure_grad();
        for (std::size_t i = 0; i < self.grad.v.size(); ++i)
            x->grad.v[i] += self.grad.v[i];
    };
    return y;
}

Var Graph::broadcast_rows(Var x, long n_rows) {
    const Shape &xs = x->val.shape;
    if (xs.nd != 2 || xs.d[0] != 1)
        throw std::invalid_argument("broadcast_rows: expects [1,A]");
    const long a = xs.d[1];
    Tensor out(Shape::of({n_rows, a}));
    for (long n = 0; n < n_rows; ++n)
        for (long i = 0; i < a; ++i)
            out.v[std::size_t(n * a + i)] = x->val.v[std::size_t(i)];
    Var y = make(std::move(out));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {x};
    y->backfn = [=](Node &self) {
        x->ensure_grad();
        for (long n = 0; n < n_rows; ++n)
            for (long i = 0; i < a; ++i)
                x->grad.v[std::size_t(i)] += self.grad.v[std::size_t(n * a + i)];
    };
    return y;
}

Var Graph::concat_cols(Var a, Var b) {
    const Shape &as = a->val.shape;
    const Shape &bs = b->val.shape;
    if (as.nd != 2 || bs.nd != 2 || as.d[0] != bs.d[0])
        throw std::invalid_argument("concat_cols: expects [N,A], [N,B]");
    const long n = as.d[0], ca = as.d[1], cb = bs.d[1];
    Tensor out(Shape::of({n, ca + cb}));
    for (long r = 0; r < n; ++r)
    {
        for (long i = 0; i < ca; ++i)
            out.v[std::size_t(r * (ca + cb) + i)] = a->val.v[std::size_t(r * ca + i)];
        for (long i = 0; i < cb; ++i)
            out.v[std::size_t(r * (ca + cb) + ca + i)] = b->val.v[std::size_t(r * cb + i)];
    }
    Var y = make(std::move(out));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {a, b};
    y->backfn = [=](Node &self) {
        a->ensure_grad();
        b->ensure_grad();
        for (long r = 0; r < n; ++r)
        {
            for (long i = 0; i < ca; ++i)
                a->grad.v[std::size_t(r * ca + i)] += self.grad.v[std::size_t(r * (ca + cb) + i)];
            for (long i = 0; i < cb; ++i)
                b->grad.v[std::size_t(r * cb + i)] +=
                    self.grad.v[std::size_t(r * (ca + cb) + ca + i)];
        }
    };
    return y;
}

Var Graph::add(Var a, Var b) {
    check_same_shape(a->val, b->val, "add");
    Tensor out = a->val;
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] += b->val.v[i];
    Var y = make(std::move(out));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {a, b};
    y->backfn = [=](Node &self) {
        a->ensure_grad();
        b->ensure_grad();
        for (std::size_t i = 0; i < self.grad.v.size(); ++i)
        {
            a->grad.v[i] += self.grad.v[i];
            b->grad.v[i] += self.grad.v[i];
        }
    };
    return y;
}

Var Graph::sum(Var x) {
    double acc = 0.0;
    for (double v : x->val.v)
        acc += v;
    Var y = make(Tensor::scalar(acc));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {x};
    y->backfn = [=](Node &self) {
        x->ensure_grad();
        const double g = self.grad.v[0];
        for (double &gx : x->grad.v)
            gx += g;
    };
    return y;
}

Var Graph::weighted_mean(Var x, const Tensor &coef) {
    if (x->val.numel() != coef.numel())
        throw std::invalid_argument("weighted_mean: size mismatch");
    const long n = x->val.numel();
    if (n == 0)
        throw std::invalid_argument("weighted_mean: empty input");
    double acc = 0.0;
    for (long i = 0; i < n; ++i)
        acc += coef.v[std::size_t(i)] * x->val.v[std::size_t(i)];
    acc /= double(n);
    Var y = make(Tensor::scalar(acc));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {x};
    Tensor coef_copy = coef;
    y->backfn = [x, n, coef_copy](Node &self) {
        x->ensure_grad();
        const double g = self.grad.v[0];
        for (long i = 0; i < n; ++i)
            x->grad.v[std::size_t(i)] += g * coef_copy.v[std::size_t(i)] / double(n);
    };
    return y;
}

std::pair<Var, Var> Graph::gaussian_sample(Var mu, Var logsig, Rng &rng,
                                           SampleMode mode, const Tensor *fixed_eps) {
    check_same_shape(mu->val, logsig->val, "gaussian_sample");
    const Shape &s = mu->val.shape;
    if (s.nd != 2)
        throw std::invalid_argument("gaussian_sample: expects [N,A]");
    const long n = s.d[0], a = s.d[1];

    auto eps = std::make_shared<Tensor>(s);
    if (mode == SampleMode::kSample)
    {
        if (fixed_eps != nullptr)
        {
            check_same_shape(*fixed_eps, mu->val, "gaussian_sample fixed_eps");
            *eps = *fixed_eps;
        }
        else
        {
            for (double &e : eps->v)
                e = rng.normal();
        }
    }

    Tensor action(s);
    Tensor logp(Shape::of({n}));
    for (long r = 0; r < n; ++r)
    {
        double lp = 0.0;
        for (long i = 0; i < a; ++i)
        {
            const std::size_t idx = std::size_t(r * a + i);
            const double lsc = clamp_logstd(logsig->val.v[idx]);
            const double e = eps->v[idx];
            action.v[idx] = mu->val.v[idx] + std::exp(lsc) * e;
            lp += -lsc - kHalfLog2Pi - 0.5 * e * e;
        }
        logp.v[std::size_t(r)] = lp;
    }

    Var va = make(std::move(action));
    Var vlp = make(std::move(logp));
    if (!grad_)
        return {va, vlp};

    va->requires_grad = true;
    va->parents = {mu, logsig};
    va->backfn = [mu, logsig, eps, n, a](Node &self) {
        mu->ensure_grad();
        logsig->ensure_grad();
        for (long r = 0; r < n; ++r)
            for (long i = 0; i < a; ++i)
            {
                const std::size_t idx = std::size_t(r * a + i);
                const double g = self.grad.v[idx];
                const double ls = logsig->val.v[idx];
                mu->grad.v[idx] += g;
                logsig->grad.v[idx] +=
                    g * std::exp(clamp_logstd(ls)) * eps->v[idx] * clamp_mask(ls);
            }
    };

    // Reparameterized density: with eps held fixed, logp depends on logsig
    // only through the explicit -logsig term.
    vlp->requires_grad = true;
    vlp->parents = {mu, logsig};
    vlp->backfn = [logsig, n, a](Node &self) {
        logsig->ensure_grad();
        for (long r = 0; r < n; ++r)
        {
            const double g = self.grad.v[std::size_t(r)];
            for (long i = 0; i < a; ++i)
            {
                const std::size_t idx = std::size_t(r * a + i);
                logsig->grad.v[idx] += -g * clamp_mask(logsig->val.v[idx]);
            }
        }
    };
    return {va, vlp};
}

Var Graph::gaussian_logp(Var mu, Var logsig, const Tensor &action) {
    check_same_shape(mu->val, logsig->val, "gaussian_logp");
    check_same_shape(mu->val, action, "gaussian_logp action");
    const Shape &s = mu->val.shape;
    if (s.nd != 2)
        throw std::invalid_argument("gaussian_logp: expects [N,A]");
    const long n = s.d[0], a = s.d[1];

    Tensor logp(Shape::of({n}));
    for (long r = 0; r < n; ++r)
    {
        double lp = 0.0;
        for (long i = 0; i < a; ++i)
        {
            const std::size_t idx = std::size_t(r * a + i);
            const double lsc = clamp_logstd(logsig->val.v[idx]);
            const double z = (action.v[idx] - mu->val.v[idx]) * std::exp(-lsc);
            lp += -lsc - kHalfLog2Pi - 0.5 * z * z;
        }
        logp.v[std::size_t(r)] = lp;
    }

    Var y = make(std::move(logp));
    if (!grad_)
        return y;
    y->requires_grad = true;
    y->parents = {mu, logsig};
    Tensor action_copy = action;
    y->backfn = [mu, logsig, action_copy, n, a](Node &self) {
        mu->ensure_grad();
        logsig->ensure_grad();
        for (long r = 0; r < n; ++r)
        {
            const double g = self.grad.v[std::size_t(r)];
            for (long i = 0; i < a; ++i)
            {
                const std::size_t idx = std::size_t(r * a + i);
                const double ls = logsig->val.v[idx];
                const double lsc = clamp_logstd(ls);
                const double inv_sig = std::exp(-lsc);
                const double z = (action_copy.v[idx] - mu->val.v[idx]) * inv_sig;
                mu->grad.v[idx] += g * z * inv_sig;
                logsig->grad.v[idx] += g * (-1.0 + z * z) * clamp_mask(ls);
            }
        }
    };
    return y;
}

void Graph::backward(const Var &loss) {
    if (spent_)
        throw std::logic_error("Graph::backward called twice without a new forward");
    if (!grad_)
        throw std::logic_error("Graph::backward on a gradient-disabled graph");
    if (loss->val.numel() != 1)
        throw std::invalid_argument("Graph::backward: loss must be scalar");
    spent_ = true;

    // Collect everything reachable from the loss, then run backfns in
    // reverse creation order (a valid reverse topological order).
    std::vector<Node *> order;
    std::unordered_set<Node *> seen;
    std::vector<Node *> stack{loss.get()};
    while (!stack.empty())
    {
        Node *cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur).second)
            continue;
        order.push_back(cur);
        for (const Var &p : cur->parents)
            stack.push_back(p.get());
    }
    std::sort(order.begin(), order.end(),
              [](const Node *a, const Node *b) { return a->id > b->id; });

    loss->ensure_grad();
    loss->grad.v[0] += 1.0;
    for (Node *node : order)
        if (node->backfn && node->has_grad)
            node->backfn(*node);
}

Param::Param(Tensor init)
    : m(Tensor::zeros(init.shape)), v(Tensor::zeros(init.shape)) {
    node = std::make_shared<Node>();
    node->val = std::move(init);
    node->requires_grad = true;
    node->id = g_next_node_id.fetch_add(1);
}

void adam_step(Param &p, double lr, double beta1, double beta2, double eps) {
    p.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, double(p.step));
    const double bc2 = 1.0 - std::pow(beta2, double(p.step));
    const std::size_t n = p.node->val.v.size();
    const bool has_grad = p.node->has_grad;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double g = has_grad ? p.node->grad.v[i] : 0.0;
        p.m.v[i] = beta1 * p.m.v[i] + (1.0 - beta1) * g;
        p.v.v[i] = beta2 * p.v.v[i] + (1.0 - beta2) * g * g;
        const double mhat = p.m.v[i] / bc1;
        const double vhat = p.v.v[i] / bc2;
        p.node->val.v[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    p.zero_grad();
}

Tensor init_gaussian(Shape shape, Rng &rng, double std) {
    Tensor t(shape);
    if (std > 0.0)
        for (double &v : t.v)
            v = std * rng.normal();
    return t;
}

} // namespace skybeam::neural
