//  Copyright 2026 The starenh Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#include "starenh/nn/ops.hpp"

#include <Eigen/Core>
#include <cmath>

#include "starenh/colorspace.hpp"
#include "starenh/curves.hpp"

namespace starenh::nn {

namespace {

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;

void accumulate(const Var& target, const Tensor& delta) {
  if (!target->requires_grad) return;
  Tensor& g = target->grad_buffer();
  for (size_t i = 0; i < g.size(); ++i) g[i] += delta[i];
}

bool wants(const Var& v) { return v && v->requires_grad; }

void check_rank(const Var& x, int rank, const char* op) {
  require(x->value.rank() == rank, std::string(op) + ": expected a rank-" + std::to_string(rank) +
                                       " tensor, got " + shape_string(x->value.shape()));
}

struct ConvGeometry {
  int batch, cin, h, w, cout, k, stride, pad, ho, wo;
  int rows() const { return cin * k * k; }
  int cols() const { return batch * ho * wo; }
};

void im2col(const double* x, const ConvGeometry& g, double* cols) {
  const int ncol = g.cols();
  for (int ci = 0; ci < g.cin; ++ci)
    for (int ky = 0; ky < g.k; ++ky)
      for (int kx = 0; kx < g.k; ++kx) {
        double* row = cols + static_cast<size_t>((ci * g.k + ky) * g.k + kx) * ncol;
        for (int b = 0; b < g.batch; ++b) {
          const double* plane = x + (static_cast<size_t>(b) * g.cin + ci) * g.h * g.w;
          for (int oy = 0; oy < g.ho; ++oy) {
            const int iy = oy * g.stride - g.pad + ky;
            double* dst = row + (static_cast<size_t>(b) * g.ho + oy) * g.wo;
            if (iy < 0 || iy >= g.h) {
              std::fill(dst, dst + g.wo, 0.0);
              continue;
            }
            const double* src = plane + static_cast<size_t>(iy) * g.w;
            for (int ox = 0; ox < g.wo; ++ox) {
              const int ix = ox * g.stride - g.pad + kx;
              dst[ox] = (ix >= 0 && ix < g.w) ? src[ix] : 0.0;
            }
          }
        }
      }
}

void col2im(const double* cols, const ConvGeometry& g, double* dx) {
  const int ncol = g.cols();
  for (int ci = 0; ci < g.cin; ++ci)
    for (int ky = 0; ky < g.k; ++ky)
      for (int kx = 0; kx < g.k; ++kx) {
        const double* row = cols + static_cast<size_t>((ci * g.k + ky) * g.k + kx) * ncol;
        for (int b = 0; b < g.batch; ++b) {
          double* plane = dx + (static_cast<size_t>(b) * g.cin + ci) * g.h * g.w;
          for (int oy = 0; oy < g.ho; ++oy) {
            const int iy = oy * g.stride - g.pad + ky;
            if (iy < 0 || iy >= g.h) continue;
            const double* src = row + (static_cast<size_t>(b) * g.ho + oy) * g.wo;
            double* dst = plane + static_cast<size_t>(iy) * g.w;
            for (int ox = 0; ox < g.wo; ++ox) {
              const int ix = ox * g.stride - g.pad + kx;
              if (ix >= 0 && ix < g.w) dst[ix] += src[ox];
            }
          }
        }
      }
}

}  // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  check_rank(x, 4, "conv2d");
  check_rank(weight, 4, "conv2d weight");
  const Tensor& xv = x->value;
  const Tensor& wv = weight->value;
  require(wv.dim(1) == xv.dim(1), "conv2d: input has " + std::to_string(xv.dim(1)) +
                                      " channels, weight expects " + std::to_string(wv.dim(1)));
  require(wv.dim(2) == wv.dim(3), "conv2d: kernels must be square");
  require(stride >= 1 && pad >= 0, "conv2d: bad stride or padding");
  ConvGeometry g{xv.dim(0), xv.dim(1), xv.dim(2), xv.dim(3), wv.dim(0), wv.dim(2), stride, pad, 0, 0};
  g.ho = (g.h + 2 * pad - g.k) / stride + 1;
  g.wo = (g.w + 2 * pad - g.k) / stride + 1;
  require(g.ho >= 1 && g.wo >= 1, "conv2d: input smaller than kernel");
  if (bias) require(bias->value.size() == static_cast<size_t>(g.cout), "conv2d: bias size mismatch");

  auto cols = std::make_shared<std::vector<double>>(static_cast<size_t>(g.rows()) * g.cols());
  im2col(xv.data(), g, cols->data());
  MatR y = CMapR(wv.data(), g.cout, g.rows()) * CMapR(cols->data(), g.rows(), g.cols());

  Tensor out({g.batch, g.cout, g.ho, g.wo});
  const size_t hw = static_cast<size_t>(g.ho) * g.wo;
  for (int b = 0; b < g.batch; ++b)
    for (int co = 0; co < g.cout; ++co) {
      const double bv = bias ? bias->value[static_cast<size_t>(co)] : 0.0;
      const double* src = y.data() + static_cast<size_t>(co) * g.cols() + b * hw;
      double* dst = out.data() + (static_cast<size_t>(b) * g.cout + co) * hw;
      for (size_t i = 0; i < hw; ++i) dst[i] = src[i] + bv;
    }

  std::vector<Var> inputs{x, weight};
  if (bias) inputs.push_back(bias);
  return make_node(std::move(out), std::move(inputs), [g, cols, hw](Node& self) {
    const Var& xin = self.inputs[0];
    const Var& w = self.inputs[1];
    MatR dy(g.cout, g.cols());
    for (int b = 0; b < g.batch; ++b)
      for (int co = 0; co < g.cout; ++co) {
        const double* src = self.grad.data() + (static_cast<size_t>(b) * g.cout + co) * hw;
        std::copy(src, src + hw, dy.data() + static_cast<size_t>(co) * g.cols() + b * hw);
      }
    if (self.inputs.size() > 2 && wants(self.inputs[2])) {
      Tensor& gb = self.inputs[2]->grad_buffer();
      for (int co = 0; co < g.cout; ++co) gb[static_cast<size_t>(co)] += dy.row(co).sum();
    }
    if (wants(w)) {
      MapR gw(w->grad_buffer().data(), g.cout, g.rows());
      gw.noalias() += dy * CMapR(cols->data(), g.rows(), g.cols()).transpose();
    }
    if (wants(xin)) {
      MatR dcols = CMapR(w->value.data(), g.cout, g.rows()).transpose() * dy;
      col2im(dcols.data(), g, xin->grad_buffer().data());
    }
  });
}

Var relu(const Var& x) {
  Tensor out = x->value;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return make_node(std::move(out), {x}, [](Node& self) {
    const Var& in = self.inputs[0];
    if (!wants(in)) return;
    Tensor& g = in->grad_buffer();
    for (size_t i = 0; i < g.size(); ++i)
      if (in->value[i] > 0.0) g[i] += self.grad[i];
  });
}

Var add(const Var& a, const Var& b) {
  require(a->value.shape() == b->value.shape(), "add: shape mismatch " + shape_string(a->value.shape()) +
                                                    " vs " + shape_string(b->value.shape()));
  Tensor out = a->value;
  for (size_t i = 0; i < out.size(); ++i) out[i] += b->value[i];
  return make_node(std::move(out), {a, b}, [](Node& self) {
    accumulate(self.inputs[0], self.grad);
    accumulate(self.inputs[1], self.grad);
  });
}

Var add_scalar(const Var& x, const Var& s) {
  require(s->value.size() == 1, "add_scalar: scalar operand expected");
  Tensor out = x->value;
  const double sv = s->value[0];
  for (double& v : out.values()) v += sv;
  return make_node(std::move(out), {x, s}, [](Node& self) {
    accumulate(self.inputs[0], self.grad);
    if (wants(self.inputs[1])) {
      double t = 0;
      for (double v : self.grad.values()) t += v;
      self.inputs[1]->grad_buffer()[0] += t;
    }
  });
}

Var mul_scalar(const Var& x, const Var& s) {
  require(s->value.size() == 1, "mul_scalar: scalar operand expected");
  Tensor out = x->value;
  const double sv = s->value[0];
  for (double& v : out.values()) v *= sv;
  return make_node(std::move(out), {x, s}, [](Node& self) {
    const Var& in = self.inputs[0];
    const Var& sc = self.inputs[1];
    if (wants(in)) {
      Tensor& g = in->grad_buffer();
      const double sv = sc->value[0];
      for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * sv;
    }
    if (wants(sc)) {
      double t = 0;
      for (size_t i = 0; i < self.grad.size(); ++i) t += self.grad[i] * in->value[i];
      sc->grad_buffer()[0] += t;
    }
  });
}

Var global_avg_pool(const Var& x) {
  check_rank(x, 4, "global_avg_pool");
  const int b = x->value.dim(0), c = x->value.dim(1);
  const size_t hw = static_cast<size_t>(x->value.dim(2)) * x->value.dim(3);
  Tensor out({b, c});
  for (size_t i = 0; i < static_cast<size_t>(b) * c; ++i) {
    double s = 0;
    const double* src = x->value.data() + i * hw;
    for (size_t p = 0; p < hw; ++p) s += src[p];
    out[i] = s / static_cast<double>(hw);
  }
  return make_node(std::move(out), {x}, [hw](Node& self) {
    if (!wants(self.inputs[0])) return;
    Tensor& g = self.inputs[0]->grad_buffer();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      const double d = self.grad[i] / static_cast<double>(hw);
      double* dst = g.data() + i * hw;
      for (size_t p = 0; p < hw; ++p) dst[p] += d;
    }
  });
}

Var linear(const Var& x, const Var& weight, const Var& bias) {
  check_rank(x, 2, "linear");
  check_rank(weight, 2, "linear weight");
  const int b = x->value.dim(0), in = x->value.dim(1), outn = weight->value.dim(0);
  require(weight->value.dim(1) == in, "linear: input width " + std::to_string(in) +
                                          " does not match weight " + shape_string(weight->value.shape()));
  if (bias) require(bias->value.size() == static_cast<size_t>(outn), "linear: bias size mismatch");
  Tensor out({b, outn});
  MapR y(out.data(), b, outn);
  y.noalias() = CMapR(x->value.data(), b, in) * CMapR(weight->value.data(), outn, in).transpose();
  if (bias)
    for (int r = 0; r < b; ++r)
      for (int o = 0; o < outn; ++o) y(r, o) += bias->value[static_cast<size_t>(o)];
  std::vector<Var> inputs{x, weight};
  if (bias) inputs.push_back(bias);
  return make_node(std::move(out), std::move(inputs), [b, in, outn](Node& self) {
    CMapR dy(self.grad.data(), b, outn);
    const Var& xv = self.inputs[0];
    const Var& w = self.inputs[1];
    if (wants(xv)) MapR(xv->grad_buffer().data(), b, in).noalias() += dy * CMapR(w->value.data(), outn, in);
    if (wants(w))
      MapR(w->grad_buffer().data(), outn, in).noalias() += dy.transpose() * CMapR(xv->value.data(), b, in);
    if (self.inputs.size() > 2 && wants(self.inputs[2])) {
      Tensor& gb = self.inputs[2]->grad_buffer();
      for (int o = 0; o < outn; ++o) gb[static_cast<size_t>(o)] += dy.col(o).sum();
    }
  });
}

Var slice_cols(const Var& x, int offset, int len) {
  check_rank(x, 2, "slice_cols");
  const int b = x->value.dim(0), n = x->value.dim(1);
  require(offset >= 0 && len >= 0 && offset + len <= n, "slice_cols: range out of bounds");
  Tensor out({b, len});
  for (int r = 0; r < b; ++r)
    for (int c = 0; c < len; ++c)
      out[static_cast<size_t>(r) * len + c] = x->value[static_cast<size_t>(r) * n + offset + c];
  return make_node(std::move(out), {x}, [b, n, offset, len](Node& self) {
    if (!wants(self.inputs[0])) return;
    Tensor& g = self.inputs[0]->grad_buffer();
    for (int r = 0; r < b; ++r)
      for (int c = 0; c < len; ++c)
        g[static_cast<size_t>(r) * n + offset + c] += self.grad[static_cast<size_t>(r) * len + c];
  });
}

Var sigma_from_raw(const Var& raw) {
  Tensor out = raw->value;
  for (double& v : out.values()) v = std::max(1.0 + v, kSigmaMin);
  return make_node(std::move(out), {raw}, [](Node& self) {
    if (!wants(self.inputs[0])) return;
    Tensor& g = self.inputs[0]->grad_buffer();
    for (size_t i = 0; i < g.size(); ++i)
      if (1.0 + self.inputs[0]->value[i] > kSigmaMin) g[i] += self.grad[i];
  });
}

Var dual_adain(const Var& f, const Var& mu_a, const Var& sigma_a, const Var& mu_b, const Var& sigma_b) {
  const Tensor& fv = f->value;
  require(fv.rank() == 4 || fv.rank() == 2, "dual_adain: features must be [B,C,H,W] or [B,C]");
  const int b = fv.dim(0), c = fv.dim(1);
  const size_t hw = fv.rank() == 4 ? static_cast<size_t>(fv.dim(2)) * fv.dim(3) : 1;
  for (const Var* code : {&mu_a, &sigma_a, &mu_b, &sigma_b}) {
    const Tensor& t = (*code)->value;
    require(t.rank() == 2 && t.dim(0) == b && t.dim(1) == c,
            "dual_adain: codes " + shape_string(t.shape()) + " do not match features " + shape_string(fv.shape()));
  }
  for (const Var* code : {&sigma_a, &sigma_b})
    for (double s : (*code)->value.values())
      require(s >= kSigmaMin, "dual_adain: sigma below the minimum");

  Tensor out(fv.shape());
  for (int n = 0; n < b; ++n)
    for (int ch = 0; ch < c; ++ch) {
      const size_t k = static_cast<size_t>(n) * c + ch;
      const double ma = mu_a->value[k], sa = sigma_a->value[k], mb = mu_b->value[k], sb = sigma_b->value[k];
      const double* src = fv.data() + k * hw;
      double* dst = out.data() + k * hw;
      if (ma == mb && sa == sb) {
        std::copy(src, src + hw, dst);  // exact identity
        continue;
      }
      for (size_t p = 0; p < hw; ++p) dst[p] = sb * ((src[p] - ma) / sa) + mb;
    }
  return make_node(std::move(out), {f, mu_a, sigma_a, mu_b, sigma_b}, [b, c, hw](Node& self) {
    const Tensor& fv = self.inputs[0]->value;
    const Tensor& ma = self.inputs[1]->value;
    const Tensor& sa = self.inputs[2]->value;
    const Tensor& sb = self.inputs[4]->value;
    for (int n = 0; n < b; ++n)
      for (int ch = 0; ch < c; ++ch) {
        const size_t k = static_cast<size_t>(n) * c + ch;
        const double* g = self.grad.data() + k * hw;
        const double* src = fv.data() + k * hw;
        const double ratio = sb[k] / sa[k];
        double gsum = 0, gcentered = 0;
        for (size_t p = 0; p < hw; ++p) {
          gsum += g[p];
          gcentered += g[p] * (src[p] - ma[k]);
        }
        if (wants(self.inputs[0])) {
          double* dst = self.inputs[0]->grad_buffer().data() + k * hw;
          for (size_t p = 0; p < hw; ++p) dst[p] += g[p] * ratio;
        }
        if (wants(self.inputs[1])) self.inputs[1]->grad_buffer()[k] -= gsum * ratio;
        if (wants(self.inputs[2])) self.inputs[2]->grad_buffer()[k] -= gcentered * sb[k] / (sa[k] * sa[k]);
        if (wants(self.inputs[3])) self.inputs[3]->grad_buffer()[k] += gsum;
        if (wants(self.inputs[4])) self.inputs[4]->grad_buffer()[k] += gcentered / sa[k];
      }
  });
}

Var sum(const Var& x) {
  double s = 0;
  for (double v : x->value.values()) s += v;
  return make_node(Tensor::scalar(s), {x}, [](Node& self) {
    if (!wants(self.inputs[0])) return;
    Tensor& g = self.inputs[0]->grad_buffer();
    for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0];
  });
}

Var mean(const Var& x) {
  const double n = static_cast<double>(x->value.size());
  double s = 0;
  for (double v : x->value.values()) s += v;
  return make_node(Tensor::scalar(s / n), {x}, [n](Node& self) {
    if (!wants(self.inputs[0])) return;
    Tensor& g = self.inputs[0]->grad_buffer();
    for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0] / n;
  });
}

Var normalized_softmax_loss(const Var& f, const Var& w, std::span<const int> labels, double scale) {
  check_rank(f, 2, "normalized_softmax_loss");
  check_rank(w, 2, "normalized_softmax_loss weight");
  const int b = f->value.dim(0), e = f->value.dim(1), q = w->value.dim(0);
  require(w->value.dim(1) == e, "normalized_softmax_loss: embedding width mismatch");
  require(labels.size() == static_cast<size_t>(b), "normalized_softmax_loss: one label per row expected");
  require(q >= 2 && scale > 0, "normalized_softmax_loss: need two classes and a positive scale");
  auto norms = [](const Tensor& t, int rows, int cols) {
    std::vector<double> n(static_cast<size_t>(rows));
    for (int r = 0; r < rows; ++r) {
      double s = 0;
      for (int k = 0; k < cols; ++k) s += t[static_cast<size_t>(r) * cols + k] * t[static_cast<size_t>(r) * cols + k];
      n[static_cast<size_t>(r)] = std::sqrt(s);
      require(n[static_cast<size_t>(r)] > 0, "normalized_softmax_loss: zero-norm vector");
    }
    return n;
  };
  const auto fn = norms(f->value, b, e);
  const auto wn = norms(w->value, q, e);
  MatR cos = CMapR(f->value.data(), b, e) * CMapR(w->value.data(), q, e).transpose();
  auto prob = std::make_shared<MatR>(b, q);
  double total = 0;
  std::vector<int> lab(labels.begin(), labels.end());
  for (int r = 0; r < b; ++r) {
    require(lab[static_cast<size_t>(r)] >= 0 && lab[static_cast<size_t>(r)] < q, "normalized_softmax_loss: label out of range");
    double top = -INFINITY;
    for (int k = 0; k < q; ++k) {
      cos(r, k) /= fn[static_cast<size_t>(r)] * wn[static_cast<size_t>(k)];
      top = std::max(top, scale * cos(r, k));
    }
    double z = 0;
    for (int k = 0; k < q; ++k) z += ((*prob)(r, k) = std::exp(scale * cos(r, k) - top));
    for (int k = 0; k < q; ++k) (*prob)(r, k) /= z;
    total += top + std::log(z) - scale * cos(r, lab[static_cast<size_t>(r)]);
  }
  auto cos_shared = std::make_shared<MatR>(std::move(cos));
  return make_node(Tensor::scalar(total / b), {f, w},
                   [b, e, q, scale, lab, fn, wn, prob, cos_shared](Node& self) {
    const Tensor& fv = self.inputs[0]->value;
    const Tensor& wv = self.inputs[1]->value;
    const double upstream = self.grad[0] / b;
    for (int r = 0; r < b; ++r)
      for (int k = 0; k < q; ++k) {
        const double dcos = upstream * scale * ((*prob)(r, k) - (k == lab[static_cast<size_t>(r)] ? 1.0 : 0.0));
        if (dcos == 0.0) continue;
        const double c = (*cos_shared)(r, k);
        const double nf = fn[static_cast<size_t>(r)], nw = wn[static_cast<size_t>(k)];
        const double* frow = fv.data() + static_cast<size_t>(r) * e;
        const double* wrow = wv.data() + static_cast<size_t>(k) * e;
        if (wants(self.inputs[0])) {
          double* gf = self.inputs[0]->grad_buffer().data() + static_cast<size_t>(r) * e;
          for (int d = 0; d < e; ++d) gf[d] += dcos * (wrow[d] / (nf * nw) - c * frow[d] / (nf * nf));
        }
        if (wants(self.inputs[1])) {
          double* gw = self.inputs[1]->grad_buffer().data() + static_cast<size_t>(k) * e;
          for (int d = 0; d < e; ++d) gw[d] += dcos * (frow[d] / (nf * nw) - c * wrow[d] / (nw * nw));
        }
      }
  });
}

Var render_enhance(const Var& image, const Var& u, const CurveLayout& layout, int depth) {
  check_rank(image, 4, "render_enhance");
  check_rank(u, 2, "render_enhance knots");
  const Tensor& iv = image->value;
  const int b = iv.dim(0), h = iv.dim(2), w = iv.dim(3);
  require(iv.dim(1) == 3, "render_enhance: image needs three channels");
  require(u->value.dim(0) == b && u->value.dim(1) == layout.total(),
          "render_enhance: knot tensor " + shape_string(u->value.shape()) + " does not match the layout");
  const size_t img_size = static_cast<size_t>(3) * h * w;
  Tensor out(iv.shape());
  for (int n = 0; n < b; ++n) {
    const auto row = std::span<const double>(u->value.values()).subspan(static_cast<size_t>(n) * layout.total(),
                                                                      static_cast<size_t>(layout.total()));
    const auto luts = build_lut_set<double>(CurveSet::from_vector(row, layout), depth, h, w);
    ImageD in(h, w);
    std::copy(iv.data() + n * img_size, iv.data() + (n + 1) * img_size, in.data.begin());
    const ImageD o = enhance(in, luts, false);
    std::copy(o.data.begin(), o.data.end(), out.data() + n * img_size);
  }
  return make_node(std::move(out), {image, u}, [layout, depth, b, h, w, img_size](Node& self) {
    const Var& img = self.inputs[0];
    const Var& knots = self.inputs[1];
    if (wants(img)) accumulate(img, self.grad);
    if (!wants(knots)) return;
    const int levels = 1 << depth;
    const auto scale = static_cast<double>(levels - 1);
    const size_t plane = static_cast<size_t>(h) * w;
    Tensor& gu = knots->grad_buffer();
    std::array<std::vector<double>, kCurveCount> tab_grad;
    for (int n = 0; n < b; ++n) {
      for (int i = 0; i < kCurveCount; ++i) {
        const int src = i / 3;
        const int len = src < 3 ? levels : (src == static_cast<int>(Source::kX) ? w : h);
        tab_grad[static_cast<size_t>(i)].assign(static_cast<size_t>(len), 0.0);
      }
      const double* in = img->value.data() + n * img_size;
      const double* g = self.grad.data() + n * img_size;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const size_t p = static_cast<size_t>(y) * w + x;
          const int idx[3] = {color_index(in[p], scale, levels - 1), color_index(in[plane + p], scale, levels - 1),
                              color_index(in[2 * plane + p], scale, levels - 1)};
          for (int j = 0; j < 3; ++j) {
            const double gj = g[j * plane + p];
            for (int s = 0; s < 3; ++s) tab_grad[static_cast<size_t>(curve_index(s, j))][static_cast<size_t>(idx[s])] += gj;
            tab_grad[static_cast<size_t>(curve_index(4, j))][static_cast<size_t>(y)] += gj;
            tab_grad[static_cast<size_t>(curve_index(3, j))][static_cast<size_t>(x)] += gj;
          }
        }
      for (int i = 0; i < kCurveCount; ++i) {
        const size_t off = static_cast<size_t>(n) * layout.total() + layout.offset(i);
        const size_t m = static_cast<size_t>(layout.knots[static_cast<size_t>(i)]);
        const auto knot_vals = std::span<const double>(knots->value.values()).subspan(off, m);
        const auto& tg = tab_grad[static_cast<size_t>(i)];
        auto dst = std::span<double>(gu.values()).subspan(off, m);
        if (tg.size() == 1) {
          dst[0] += tg[0];
        } else {
          curves::sample_curve_backward(knot_vals, tg, dst);
        }
      }
    }
  });
}

Var lab_l1(const Var& pred, const Var& target) {
  check_rank(pred, 4, "lab_l1");
  require(pred->value.shape() == target->value.shape(), "lab_l1: shape mismatch");
  require(pred->value.dim(1) == 3, "lab_l1: three channels expected");
  const size_t plane = static_cast<size_t>(pred->value.dim(2)) * pred->value.dim(3);
  auto grad = std::make_shared<std::vector<double>>(pred->requires_grad ? pred->value.size() : 0);
  const double loss = colorspace::lab_l1_loss(pred->value.span(), target->value.span(), plane, *grad);
  return make_node(Tensor::scalar(loss), {pred, target}, [grad](Node& self) {
    if (!wants(self.inputs[0])) return;
    Tensor& g = self.inputs[0]->grad_buffer();
    for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0] * (*grad)[i];
  });
}

}  // namespace starenh::nn
