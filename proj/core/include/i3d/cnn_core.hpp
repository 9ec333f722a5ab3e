#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

// Fixed-topology network for 28x28 single-channel patches:
//   conv 5x5x16 same-pad, relu, 3x3 max pool stride 3   -> 9x9x16
//   conv 5x5x64 same-pad, relu, 3x3 max pool stride 3   -> 3x3x64
//   fc 576->128, relu, fc 128->2 logits
// Activations are HWC. Weight layouts keep the output-channel (or output-unit)
// index innermost so the hot loops are independent-lane FMAs rather than
// reductions, which keeps them vectorizable under strict FP semantics.
// Pooling uses floor semantics: the 28th row/column feeds no pool window.
// Ties in a pool window resolve to the first element in row-major scan order.

namespace i3d::cnncore {

constexpr int kIn = 28;
constexpr int kC1 = 16;
constexpr int kP1 = 9;
constexpr int kC2 = 64;
constexpr int kP2 = 3;
constexpr int kFlat = kP2 * kP2 * kC2;  // 576
constexpr int kFc1 = 128;
constexpr int kOut = 2;
constexpr int kK = 5;
constexpr int kPad = 2;

constexpr std::size_t kC1w = kK * kK * kC1;          // [ky][kx][co], ci = 1
constexpr std::size_t kC2w = kK * kK * kC1 * kC2;    // [ky][kx][ci][co]
constexpr std::size_t kF1w = kFlat * kFc1;           // [in][out]
constexpr std::size_t kF2w = kFc1 * kOut;            // [in][out]

template <typename T>
struct Params {
  std::vector<T> c1w, c1b, c2w, c2b, f1w, f1b, f2w, f2b;

  void zero() {
    c1w.assign(kC1w, T(0));
    c1b.assign(kC1, T(0));
    c2w.assign(kC2w, T(0));
    c2b.assign(kC2, T(0));
    f1w.assign(kF1w, T(0));
    f1b.assign(kFc1, T(0));
    f2w.assign(kF2w, T(0));
    f2b.assign(kOut, T(0));
  }

  std::size_t total() const {
    return c1w.size() + c1b.size() + c2w.size() + c2b.size() + f1w.size() + f1b.size() +
           f2w.size() + f2b.size();
  }

  template <typename U>
  static Params<T> from(const Params<U>& o) {
    Params<T> p;
    auto conv = [](const std::vector<U>& src, std::vector<T>& dst) {
      dst.resize(src.size());
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<T>(src[i]);
    };
    conv(o.c1w, p.c1w);
    conv(o.c1b, p.c1b);
    conv(o.c2w, p.c2w);
    conv(o.c2b, p.c2b);
    conv(o.f1w, p.f1w);
    conv(o.f1b, p.f1b);
    conv(o.f2w, p.f2w);
    conv(o.f2b, p.f2b);
    return p;
  }
};

template <typename T>
struct Acts {
  std::vector<T> in;     // 28*28
  std::vector<T> z1;     // 28*28*16 pre-relu
  std::vector<T> a1;     // relu(z1)
  std::vector<T> p1;     // 9*9*16
  std::vector<int> arg1; // flat index into a1 per pooled value
  std::vector<T> z2;     // 9*9*64
  std::vector<T> a2;
  std::vector<T> p2;     // 3*3*64
  std::vector<int> arg2;
  std::vector<T> z3;     // 128 pre-relu
  std::vector<T> a3;
  std::array<T, kOut> logits{};

  void resize() {
    in.resize(kIn * kIn);
    z1.resize(kIn * kIn * kC1);
    a1.resize(kIn * kIn * kC1);
    p1.resize(kP1 * kP1 * kC1);
    arg1.resize(kP1 * kP1 * kC1);
    z2.resize(kP1 * kP1 * kC2);
    a2.resize(kP1 * kP1 * kC2);
    p2.resize(kP2 * kP2 * kC2);
    arg2.resize(kP2 * kP2 * kC2);
    z3.resize(kFc1);
    a3.resize(kFc1);
  }
};

namespace detail {

template <typename T>
void conv_same(const T* in, int side, int ci_n, const T* w, const T* b, int co_n, T* out) {
  std::vector<T> acc(co_n);
  for (int v = 0; v < side; ++v) {
    for (int u = 0; u < side; ++u) {
      for (int co = 0; co < co_n; ++co) acc[co] = b[co];
      const int ky0 = std::max(0, kPad - v), ky1 = std::min(kK, side + kPad - v);
      const int kx0 = std::max(0, kPad - u), kx1 = std::min(kK, side + kPad - u);
      for (int ky = ky0; ky < ky1; ++ky) {
        const int yy = v + ky - kPad;
        for (int kx = kx0; kx < kx1; ++kx) {
          const int xx = u + kx - kPad;
          const T* px = in + (static_cast<std::size_t>(yy) * side + xx) * ci_n;
          const T* wb = w + (static_cast<std::size_t>(ky) * kK + kx) * ci_n * co_n;
          for (int ci = 0; ci < ci_n; ++ci) {
            const T iv = px[ci];
            const T* wr = wb + static_cast<std::size_t>(ci) * co_n;
            for (int co = 0; co < co_n; ++co) acc[co] += iv * wr[co];
          }
        }
      }
      T* dst = out + (static_cast<std::size_t>(v) * side + u) * co_n;
      for (int co = 0; co < co_n; ++co) dst[co] = acc[co];
    }
  }
}

template <typename T>
void pool3(const T* in, int side, int c_n, T* out, int* arg) {
  const int oside = side / 3;
  for (int py = 0; py < oside; ++py) {
    for (int px = 0; px < oside; ++px) {
      for (int c = 0; c < c_n; ++c) {
        T best{};
        int bi = -1;
        for (int wy = 0; wy < 3; ++wy) {
          for (int wx = 0; wx < 3; ++wx) {
            const int idx = ((3 * py + wy) * side + 3 * px + wx) * c_n + c;
            if (bi < 0 || in[idx] > best) {
              best = in[idx];
              bi = idx;
            }
          }
        }
        const int o = (py * oside + px) * c_n + c;
        out[o] = best;
        arg[o] = bi;
      }
    }
  }
}

}  // namespace detail

template <typename T>
void forward(const Params<T>& p, const T* input, Acts<T>& a) {
  a.resize();
  std::copy(input, input + kIn * kIn, a.in.begin());
  detail::conv_same(a.in.data(), kIn, 1, p.c1w.data(), p.c1b.data(), kC1, a.z1.data());
  for (std::size_t i = 0; i < a.z1.size(); ++i) a.a1[i] = a.z1[i] > T(0) ? a.z1[i] : T(0);
  detail::pool3(a.a1.data(), kIn, kC1, a.p1.data(), a.arg1.data());
  detail::conv_same(a.p1.data(), kP1, kC1, p.c2w.data(), p.c2b.data(), kC2, a.z2.data());
  for (std::size_t i = 0; i < a.z2.size(); ++i) a.a2[i] = a.z2[i] > T(0) ? a.z2[i] : T(0);
  detail::pool3(a.a2.data(), kP1, kC2, a.p2.data(), a.arg2.data());
  for (int o = 0; o < kFc1; ++o) a.z3[o] = p.f1b[o];
  for (int i = 0; i < kFlat; ++i) {
    const T iv = a.p2[i];
    const T* wr = p.f1w.data() + static_cast<std::size_t>(i) * kFc1;
    for (int o = 0; o < kFc1; ++o) a.z3[o] += iv * wr[o];
  }
  for (int o = 0; o < kFc1; ++o) a.a3[o] = a.z3[o] > T(0) ? a.z3[o] : T(0);
  for (int k = 0; k < kOut; ++k) a.logits[k] = p.f2b[k];
  for (int o = 0; o < kFc1; ++o) {
    const T iv = a.a3[o];
    const T* wr = p.f2w.data() + static_cast<std::size_t>(o) * kOut;
    for (int k = 0; k < kOut; ++k) a.logits[k] += iv * wr[k];
  }
}

// cross-entropy over softmax; cls is 0 or 1
template <typename T>
T softmax_ce(const std::array<T, kOut>& logits, int cls, std::array<T, kOut>& dlogits) {
  const T m = std::max(logits[0], logits[1]);
  T z = T(0);
  std::array<T, kOut> e{};
  for (int k = 0; k < kOut; ++k) {
    e[k] = std::exp(logits[k] - m);
    z += e[k];
  }
  for (int k = 0; k < kOut; ++k) dlogits[k] = e[k] / z;
  dlogits[cls] -= T(1);
  return -(logits[cls] - m - std::log(z));
}

template <typename T>
struct Workspace {
  std::vector<T> c2wT;  // [ky][kx][co][ci], rebuilt when weights change
  std::vector<T> dp2, dz2, dp1, dz1, dz3;

  void prepare(const Params<T>& p) {
    c2wT.resize(kC2w);
    for (int ky = 0; ky < kK; ++ky)
      for (int kx = 0; kx < kK; ++kx)
        for (int ci = 0; ci < kC1; ++ci)
          for (int co = 0; co < kC2; ++co)
            c2wT[((static_cast<std::size_t>(ky) * kK + kx) * kC2 + co) * kC1 + ci] =
                p.c2w[((static_cast<std::size_t>(ky) * kK + kx) * kC1 + ci) * kC2 + co];
  }
};

// Accumulates parameter gradients into g (caller zeros g per batch).
// Input gradients are not produced; no layer below conv1 needs them.
template <typename T>
void backward(const Params<T>& p, const Acts<T>& a, const std::array<T, kOut>& dlogits,
              Workspace<T>& ws, Params<T>& g) {
  // fc2
  std::vector<T>& dz3 = ws.dz3;
  dz3.assign(kFc1, T(0));
  for (int k = 0; k < kOut; ++k) g.f2b[k] += dlogits[k];
  for (int o = 0; o < kFc1; ++o) {
    const T iv = a.a3[o];
    T* gw = g.f2w.data() + static_cast<std::size_t>(o) * kOut;
    const T* wr = p.f2w.data() + static_cast<std::size_t>(o) * kOut;
    T acc = T(0);
    for (int k = 0; k < kOut; ++k) {
      gw[k] += iv * dlogits[k];
      acc += wr[k] * dlogits[k];
    }
    dz3[o] = a.z3[o] > T(0) ? acc : T(0);
  }
  // fc1
  std::vector<T>& dp2 = ws.dp2;
  dp2.assign(kFlat, T(0));
  for (int o = 0; o < kFc1; ++o) g.f1b[o] += dz3[o];
  for (int i = 0; i < kFlat; ++i) {
    const T iv = a.p2[i];
    T* gw = g.f1w.data() + static_cast<std::size_t>(i) * kFc1;
    const T* wr = p.f1w.data() + static_cast<std::size_t>(i) * kFc1;
    T acc = T(0);
    for (int o = 0; o < kFc1; ++o) {
      gw[o] += iv * dz3[o];
      acc += wr[o] * dz3[o];
    }
    dp2[i] = acc;
  }
  // pool2 + relu
  std::vector<T>& dz2 = ws.dz2;
  dz2.assign(kP1 * kP1 * kC2, T(0));
  for (int j = 0; j < kFlat; ++j)
    if (a.z2[a.arg2[j]] > T(0)) dz2[a.arg2[j]] += dp2[j];
  // conv2
  std::vector<T>& dp1 = ws.dp1;
  dp1.assign(kP1 * kP1 * kC1, T(0));
  for (int v = 0; v < kP1; ++v) {
    for (int u = 0; u < kP1; ++u) {
      const T* dzr = dz2.data() + (static_cast<std::size_t>(v) * kP1 + u) * kC2;
      const int ky0 = std::max(0, kPad - v), ky1 = std::min(kK, kP1 + kPad - v);
      const int kx0 = std::max(0, kPad - u), kx1 = std::min(kK, kP1 + kPad - u);
      for (int co = 0; co < kC2; ++co) g.c2b[co] += dzr[co];
      for (int ky = ky0; ky < ky1; ++ky) {
        const int yy = v + ky - kPad;
        for (int kx = kx0; kx < kx1; ++kx) {
          const int xx = u + kx - kPad;
          const std::size_t pix = (static_cast<std::size_t>(yy) * kP1 + xx) * kC1;
          const std::size_t tap = static_cast<std::size_t>(ky) * kK + kx;
          for (int ci = 0; ci < kC1; ++ci) {
            const T iv = a.p1[pix + ci];
            T* gw = g.c2w.data() + (tap * kC1 + ci) * kC2;
            for (int co = 0; co < kC2; ++co) gw[co] += iv * dzr[co];
          }
          T* dpx = dp1.data() + pix;
          for (int co = 0; co < kC2; ++co) {
            const T dv = dzr[co];
            const T* wr = ws.c2wT.data() + (tap * kC2 + co) * kC1;
            for (int ci = 0; ci < kC1; ++ci) dpx[ci] += dv * wr[ci];
          }
        }
      }
    }
  }
  // pool1 + relu
  std::vector<T>& dz1 = ws.dz1;
  dz1.assign(kIn * kIn * kC1, T(0));
  for (std::size_t j = 0; j < a.arg1.size(); ++j)
    if (a.z1[a.arg1[j]] > T(0)) dz1[a.arg1[j]] += dp1[j];
  // conv1
  for (int v = 0; v < kIn; ++v) {
    for (int u = 0; u < kIn; ++u) {
      const T* dzr = dz1.data() + (static_cast<std::size_t>(v) * kIn + u) * kC1;
      const int ky0 = std::max(0, kPad - v), ky1 = std::min(kK, kIn + kPad - v);
      const int kx0 = std::max(0, kPad - u), kx1 = std::min(kK, kIn + kPad - u);
      for (int co = 0; co < kC1; ++co) g.c1b[co] += dzr[co];
      for (int ky = ky0; ky < ky1; ++ky) {
        const int yy = v + ky - kPad;
        for (int kx = kx0; kx < kx1; ++kx) {
          const int xx = u + kx - kPad;
          const T iv = a.in[static_cast<std::size_t>(yy) * kIn + xx];
          T* gw = g.c1w.data() + (static_cast<std::size_t>(ky) * kK + kx) * kC1;
          for (int co = 0; co < kC1; ++co) gw[co] += iv * dzr[co];
        }
      }
    }
  }
}

}  // namespace i3d::cnncore
