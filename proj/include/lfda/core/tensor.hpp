/* Copyright 2026 The LFDA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef LFDA_CORE_TENSOR_HPP_
#define LFDA_CORE_TENSOR_HPP_

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfda {

// Dense rank-4 tensor laid out (depth, height, width, channels), channel
// index fastest. Depth is the angular/view axis throughout the codec.
template <typename T>
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(size_t d, size_t h, size_t w, size_t c)
      : d_(d), h_(h), w_(w), c_(c), data_(d * h * w * c, T(0)) {}

  size_t d() const { return d_; }
  size_t h() const { return h_; }
  size_t w() const { return w_; }
  size_t c() const { return c_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator()(size_t d, size_t h, size_t w, size_t c) {
    assert(d < d_ && h < h_ && w < w_ && c < c_);
    return data_[((d * h_ + h) * w_ + w) * c_ + c];
  }
  T operator()(size_t d, size_t h, size_t w, size_t c) const {
    assert(d < d_ && h < h_ && w < w_ && c < c_);
    return data_[((d * h_ + h) * w_ + w) * c_ + c];
  }
  T& at(size_t d, size_t h, size_t w, size_t c) {
    return (*this)(d, h, w, c);
  }
  T at(size_t d, size_t h, size_t w, size_t c) const {
    return (*this)(d, h, w, c);
  }

  T& operator[](size_t i) { return data_[i]; }
  T operator[](size_t i) const { return data_[i]; }

  bool same_shape(const Tensor4& o) const {
    return d_ == o.d_ && h_ == o.h_ && w_ == o.w_ && c_ == o.c_;
  }

  void fill(T v) { data_.assign(data_.size(), v); }

  std::string shape_str() const {
    return std::to_string(d_) + "x" + std::to_string(h_) + "x" +
           std::to_string(w_) + "x" + std::to_string(c_);
  }

 private:
  size_t d_ = 0, h_ = 0, w_ = 0, c_ = 0;
  std::vector<T> data_;
};

// 2D image with an arbitrary channel count, (height, width, channels),
// channel fastest. RGB SAIs use c = 3, disparity flows c = 2, luma c = 1.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(size_t h, size_t w, size_t c = 3)
      : h_(h), w_(w), c_(c), data_(h * w * c, T(0)) {}

  size_t h() const { return h_; }
  size_t w() const { return w_; }
  size_t c() const { return c_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator()(size_t y, size_t x, size_t c) {
    assert(y < h_ && x < w_ && c < c_);
    return data_[(y * w_ + x) * c_ + c];
  }
  T operator()(size_t y, size_t x, size_t c) const {
    assert(y < h_ && x < w_ && c < c_);
    return data_[(y * w_ + x) * c_ + c];
  }
  T& at(size_t y, size_t x, size_t c) { return (*this)(y, x, c); }
  T at(size_t y, size_t x, size_t c) const { return (*this)(y, x, c); }

  T& operator[](size_t i) { return data_[i]; }
  T operator[](size_t i) const { return data_[i]; }

  bool same_shape(const Image& o) const {
    return h_ == o.h_ && w_ == o.w_ && c_ == o.c_;
  }

  void fill(T v) { data_.assign(data_.size(), v); }

 private:
  size_t h_ = 0, w_ = 0, c_ = 0;
  std::vector<T> data_;
};

template <typename T>
inline void check_same_shape(const Tensor4<T>& a, const Tensor4<T>& b,
                             const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
  }
}

template <typename T>
inline Tensor4<T> zeros_like(const Tensor4<T>& t) {
  return Tensor4<T>(t.d(), t.h(), t.w(), t.c());
}

template <typename T>
inline Image<T> zeros_like(const Image<T>& t) {
  return Image<T>(t.h(), t.w(), t.c());
}

// Copies one depth slice of a tensor into an image (and back).
template <typename T>
inline Image<T> slice_image(const Tensor4<T>& t, size_t d) {
  Image<T> out(t.h(), t.w(), t.c());
  const T* src = t.data() + d * t.h() * t.w() * t.c();
  std::copy(src, src + out.size(), out.data());
  return out;
}

template <typename T>
inline void set_slice(Tensor4<T>& t, size_t d, const Image<T>& img) {
  assert(img.h() == t.h() && img.w() == t.w() && img.c() == t.c());
  std::copy(img.data(), img.data() + img.size(),
            t.data() + d * t.h() * t.w() * t.c());
}

template <typename T>
inline bool all_finite(const T* p, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  return true;
}

template <typename T>
inline bool all_finite(const Tensor4<T>& t) {
  return all_finite(t.data(), t.size());
}

template <typename T>
inline bool all_finite(const Image<T>& t) {
  return all_finite(t.data(), t.size());
}

}  // namespace lfda

#endif  // LFDA_CORE_TENSOR_HPP_
