// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/iir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ecgrob/errors.hpp"

namespace ecgrob::iir {

using cd = std::complex<double>;

namespace {

struct Zpk {
  std::vector<cd> zeros;
  std::vector<cd> poles;
};

std::vector<cd> prototype_poles(int order) {
  std::vector<cd> poles;
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    poles.emplace_back(std::cos(theta), std::sin(theta));
  }
  return poles;
}

double prewarp(double f, double fs) { return 2.0 * fs * std::tan(std::numbers::pi * f / fs); }

cd bilinear(cd s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

void check_order(int order) {
  if (order < 1 || order > 12) {
    throw Error(ErrorCode::InvalidSpec, "filter order must be in [1, 12]");
  }
}

void check_band(double f, double fs) {
  if (!(fs > 0.0) || !(f > 0.0) || !(f < fs / 2.0)) {
    throw Error(ErrorCode::InvalidSpec, "cutoff " + std::to_string(f) +
                                            " Hz must lie in (0, fs/2) for fs " +
                                            std::to_string(fs));
  }
}

bool is_real(cd v) { return std::abs(v.imag()) <= 1e-12 * std::max(1.0, std::abs(v)); }

// Groups conjugate pairs into biquads and normalises each section to unit
// magnitude at z_ref.
SosFilter to_sos(Zpk zpk, cd z_ref) {
  std::vector<cd> pole_pairs, pole_reals, zero_pairs, zero_reals;
  for (cd p : zpk.poles) {
    if (is_real(p)) pole_reals.push_back(p.real());
    else if (p.imag() > 0) pole_pairs.push_back(p);
  }
  for (cd z : zpk.zeros) {
    if (is_real(z)) zero_reals.push_back(z.real());
    else if (z.imag() > 0) zero_pairs.push_back(z);
  }

  SosFilter f;
  auto take_numerator = [&](Biquad& s, int degree) {
    if (degree == 2 && !zero_pairs.empty()) {
      const cd z = zero_pairs.back();
      zero_pairs.pop_back();
      s.b0 = 1.0;
      s.b1 = -2.0 * z.real();
      s.b2 = std::norm(z);
      return;
    }
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = 0.0;
    if (degree >= 1 && !zero_reals.empty()) {
      const double z1 = zero_reals.back().real();
      zero_reals.pop_back();
      s.b1 = -z1;
      if (degree == 2 && !zero_reals.empty()) {
        const double z2 = zero_reals.back().real();
        zero_reals.pop_back();
        s.b1 = -(z1 + z2);
        s.b2 = z1 * z2;
      }
    }
  };

  for (cd p : pole_pairs) {
    Biquad s;
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    take_numerator(s, 2);
    f.sections.push_back(s);
  }
  while (!pole_reals.empty()) {
    Biquad s;
    const double p1 = pole_reals.back().real();
    pole_reals.pop_back();
    if (!pole_reals.empty()) {
      const double p2 = pole_reals.back().real();
      pole_reals.pop_back();
      s.a1 = -(p1 + p2);
      s.a2 = p1 * p2;
      take_numerator(s, 2);
    } else {
      s.a1 = -p1;
      take_numerator(s, 1);
    }
    f.sections.push_back(s);
  }

  for (Biquad& s : f.sections) {
    const double g = std::abs(s.response(z_ref));
    s.b0 /= g;
    s.b1 /= g;
    s.b2 /= g;
    // keep the reference gain real-positive
    if (s.response(z_ref).real() < 0) {
      s.b0 = -s.b0;
      s.b1 = -s.b1;
      s.b2 = -s.b2;
    }
  }
  return f;
}

}  // namespace

cd Biquad::response(cd z) const {
  const cd zi = 1.0 / z;
  return (b0 + zi * (b1 + zi * b2)) / (1.0 + zi * (a1 + zi * a2));
}

cd SosFilter::response(double freq_hz, double fs) const {
  const cd z = std::polar(1.0, 2.0 * std::numbers::pi * freq_hz / fs);
  cd h = 1.0;
  for (const auto& s : sections) h *= s.response(z);
  return h;
}

double SosFilter::max_pole_radius() const {
  double r = 0.0;
  for (const auto& s : sections) {
    // roots of z^2 + a1 z + a2
    const cd disc = std::sqrt(cd(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    r = std::max({r, std::abs((-s.a1 + disc) / 2.0), std::abs((-s.a1 - disc) / 2.0)});
  }
  return r;
}

std::size_t SosFilter::effective_length() const {
  const double r = max_pole_radius();
  if (r <= 0.0) return 1;
  if (r >= 1.0) throw Error(ErrorCode::InvalidSpec, "unstable filter");
  return static_cast<std::size_t>(std::ceil(-1.0 / std::log(r)));
}

SosFilter butterworth_lowpass(int order, double cutoff_hz, double fs) {
  check_order(order);
  check_band(cutoff_hz, fs);
  const double wc = prewarp(cutoff_hz, fs);
  Zpk d;
  for (cd p : prototype_poles(order)) {
    d.poles.push_back(bilinear(p * wc, fs));
    d.zeros.emplace_back(-1.0, 0.0);
  }
  return to_sos(std::move(d), cd(1.0, 0.0));
}

SosFilter butterworth_highpass(int order, double cutoff_hz, double fs) {
  check_order(order);
  check_band(cutoff_hz, fs);
  const double wc = prewarp(cutoff_hz, fs);
  Zpk d;
  for (cd p : prototype_poles(order)) {
    d.poles.push_back(bilinear(wc / p, fs));
    d.zeros.emplace_back(1.0, 0.0);
  }
  return to_sos(std::move(d), cd(-1.0, 0.0));
}

SosFilter butterworth_bandstop(int order, double low_hz, double high_hz, double fs) {
  check_order(order);
  check_band(low_hz, fs);
  check_band(high_hz, fs);
  if (!(low_hz < high_hz)) throw Error(ErrorCode::InvalidSpec, "band-stop edges out of order");
  const double w1 = prewarp(low_hz, fs);
  const double w2 = prewarp(high_hz, fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);
  Zpk d;
  for (cd p : prototype_poles(order)) {
    const cd hp = (bw / 2.0) / p;
    const cd root = std::sqrt(hp * hp - w0 * w0);
    d.poles.push_back(bilinear(hp + root, fs));
    d.poles.push_back(bilinear(hp - root, fs));
    d.zeros.push_back(bilinear(cd(0.0, w0), fs));
    d.zeros.push_back(bilinear(cd(0.0, -w0), fs));
  }
  return to_sos(std::move(d), cd(1.0, 0.0));
}

std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x, double zi_scale) {
  std::vector<double> y(x.begin(), x.end());
  double level = zi_scale;  // steady-state input level of the current section
  for (const Biquad& s : filter.sections) {
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    double z1 = (gain - s.b0) * level;
    double z2 = (s.b2 - s.a2 * gain) * level;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    level *= gain;
  }
  return y;
}

std::size_t filtfilt_padding(const SosFilter& filter, std::size_t n) {
  if (n < 2) return 0;
  const std::size_t base = std::max(filter.effective_length(), 2 * filter.sections.size() + 1);
  return std::min(n - 1, 3 * base);
}

std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t pad = filtfilt_padding(filter, n);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(x[n - 1 - i]);

  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  std::vector<double> fwd = sosfilt(filter, ext, mean(ext));
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd = sosfilt(filter, fwd, mean(fwd));
  std::reverse(bwd.begin(), bwd.end());
  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad),
          bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace ecgrob::iir
