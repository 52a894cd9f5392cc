#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "srprompt/codec.hpp"
#include "srprompt/estimator.hpp"
#include "srprompt/filter.hpp"
#include "srprompt/noise.hpp"
#include "srprompt/resample.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"

using namespace srprompt;
namespace oracle = srprompt::oracle;

namespace {

oracle::Grid to_grid(const ImageBuffer& img, Index c = 0) {
  oracle::Grid g(static_cast<int>(img.height()), static_cast<int>(img.width()));
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) g.at(y, x) = img(y, x, c);
  return g;
}

Image<double> from_grid(const oracle::Grid& g) {
  Image<double> img(g.h, g.w, 1);
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) img(y, x, 0) = g.at(y, x);
  return img;
}

double max_abs_diff(const KernelMatrix& k, const oracle::Grid& g) {
  double m = 0.0;
  for (int i = 0; i < g.h; ++i)
    for (int j = 0; j < g.w; ++j) m = std::max(m, std::abs(k(i, j) - g.at(i, j)));
  return m;
}

oracle::Method to_oracle(ResizeMethod m) {
  switch (m) {
    case ResizeMethod::area: return oracle::Method::area;
    case ResizeMethod::bilinear: return oracle::Method::bilinear;
    default: return oracle::Method::bicubic;
  }
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("delta limit of a tiny sigma") {
    const auto k = gaussian_kernel_iso(3, 1e-3);
    CHECK(k(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.sum() - k(1, 1) < 1e-12);
  }

  TEST_CASE("iso kernel peaks at the centre and is transpose-symmetric") {
    const auto k = gaussian_kernel_iso(7, 1.0);
    CHECK(k(3, 3) == k.maxCoeff());
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((k - k.colwise().reverse()).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("eta 21, sigma 3: unit sum and closed-form neighbour ratio") {
    const auto k = gaussian_kernel_iso(21, 3.0);
    CHECK(std::abs(k.sum() - 1.0) < 1e-6);
    CHECK(std::abs(k(10, 10) / k(11, 10) - std::exp(1.0 / 18.0)) < 1e-6);
    CHECK(max_abs_diff(k, oracle::gaussian(21, 3.0, 3.0, 0.0)) < 1e-12);
  }

  TEST_CASE("aniso with equal sigmas equals iso for every angle") {
    for (double theta : {0.0, 0.3, 1.0, 2.5, 3.1})
      CHECK((gaussian_kernel_aniso(9, 1.2, 1.2, theta) - gaussian_kernel_iso(9, 1.2))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
  }

  TEST_CASE("aniso at zero rotation is the normalized outer product") {
    const int eta = 11;
    Eigen::VectorXd gx(eta), gy(eta);
    for (int i = 0; i < eta; ++i) {
      const double d = i - eta / 2;
      gx(i) = std::exp(-d * d / (2 * 2.0 * 2.0));
      gy(i) = std::exp(-d * d / (2 * 0.5 * 0.5));
    }
    KernelMatrix outer = gy * gx.transpose();
    outer /= outer.sum();
    CHECK((gaussian_kernel_aniso(eta, 2.0, 0.5, 0.0) - outer).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("quarter turn transposes the kernel") {
    const auto a = gaussian_kernel_aniso(13, 2.0, 0.5, std::numbers::pi / 2);
    const auto b = gaussian_kernel_aniso(13, 2.0, 0.5, 0.0);
    CHECK((a - b.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(max_abs_diff(a, oracle::gaussian(13, 2.0, 0.5, std::numbers::pi / 2)) < 1e-9);
  }

  TEST_CASE("aniso matches the closed-form oracle at arbitrary angles") {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
      const int eta = 3 + 2 * static_cast<int>(uniform01(rng) * 9);
      const double sx = uniform(rng, 0.2, 3.0), sy = uniform(rng, 0.2, 3.0);
      const double th = uniform(rng, 0.0, std::numbers::pi);
      CHECK(max_abs_diff(gaussian_kernel_aniso(eta, sx, sy, th), oracle::gaussian(eta, sx, sy, th)) <
            1e-12);
    }
  }

  TEST_CASE("invalid kernel arguments") {
    CHECK_THROWS_AS(gaussian_kernel_iso(4, 1.0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_kernel_iso(1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_kernel_iso(-3, 1.0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_kernel_iso(7, 0.0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_kernel_aniso(7, 1.0, -1.0, 0.0), InvalidArgument);
  }

  TEST_CASE("kernels are nonnegative") {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
      const auto k = gaussian_kernel_aniso(21, uniform(rng, 0.2, 3.0), uniform(rng, 0.2, 3.0),
                                           uniform(rng, 0.0, std::numbers::pi));
      CHECK(k.minCoeff() >= 0.0);
    }
  }
}

TEST_SUITE("convolve") {
  TEST_CASE("constant field is preserved") {
    const ImageBuffer img(20, 17, 3, 0.5f);
    const auto out = convolve(img, gaussian_kernel_aniso(9, 2.0, 0.7, 0.4));
    for (Index c = 0; c < 3; ++c) CHECK((out.plane(c) - 0.5f).abs().maxCoeff() < 1e-6);
  }

  TEST_CASE("impulse response reproduces the kernel") {
    ImageBuffer img(64, 64, 1, 0.0f);
    img(32, 32, 0) = 1.0f;
    const auto k = gaussian_kernel_aniso(7, 2.0, 0.6, 0.9);
    const auto out = convolve(img, k);
    double err = 0.0;
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) err = std::max(err, std::abs(out(29 + i, 29 + j, 0) - k(i, j)));
    CHECK(err < 1e-6);
  }

  TEST_CASE("checkerboard against brute force") {
    // Pixel checkerboard under an almost-flat 3x3 kernel: the oracle gives
    // 4/9 + e and 5/9 - e, not 0.5.
    ImageBuffer img(16, 16, 1);
    for (Index y = 0; y < 16; ++y)
      for (Index x = 0; x < 16; ++x) img(y, x, 0) = static_cast<float>((y + x) % 2);
    const auto k = gaussian_kernel_iso(3, 10.0);
    const auto out = convolve(img.cast<double>(), k);
    CHECK(out(5, 5, 0) == doctest::Approx(0.44518332819232215).epsilon(1e-12));
    CHECK(out(6, 7, 0) == doctest::Approx(0.55481667180767791).epsilon(1e-12));
    const auto ref = oracle::convolve(to_grid(img), oracle::gaussian(3, 10.0, 10.0, 0.0));
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) CHECK(std::abs(out(y, x, 0) - ref.at(y, x)) < 1e-12);
  }

  TEST_CASE("random images and kernels agree with brute force, borders included") {
    Rng rng(5);
    for (int t = 0; t < 12; ++t) {
      const int h = 5 + static_cast<int>(uniform01(rng) * 20), w = 5 + static_cast<int>(uniform01(rng) * 20);
      const int eta = 3 + 2 * static_cast<int>(uniform01(rng) * 5);
      const auto img = testing::white_noise(h, w, 100 + t);
      const double sx = uniform(rng, 0.2, 3.0), sy = uniform(rng, 0.2, 3.0),
                   th = uniform(rng, 0.0, 3.14);
      const auto out = convolve(img.cast<double>(), gaussian_kernel_aniso(eta, sx, sy, th));
      const auto ref = oracle::convolve(to_grid(img), oracle::gaussian(eta, sx, sy, th));
      double err = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) err = std::max(err, std::abs(out(y, x, 0) - ref.at(y, x)));
      CHECK(err < 1e-12);
    }
  }

  TEST_CASE("image smaller than the kernel still reflects correctly") {
    const auto img = testing::white_noise(3, 4, 9);
    const auto out = convolve(img.cast<double>(), gaussian_kernel_iso(9, 2.0));
    const auto ref = oracle::convolve(to_grid(img), oracle::gaussian(9, 2.0, 2.0, 0.0));
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x) CHECK(std::abs(out(y, x, 0) - ref.at(y, x)) < 1e-12);
  }

  TEST_CASE("mean is preserved on an interior-dominated image") {
    const auto img = testing::natural_test_image(128, 128, 3);
    const auto out = convolve(img, gaussian_kernel_iso(7, 1.5));
    for (Index c = 0; c < 3; ++c)
      CHECK(std::abs(out.plane(c).cast<double>().mean() - img.plane(c).cast<double>().mean()) < 1e-3);
  }

  TEST_CASE("reflect101 does not repeat the edge sample") {
    CHECK(reflect101(-1, 5) == 1);
    CHECK(reflect101(-2, 5) == 2);
    CHECK(reflect101(5, 5) == 3);
    CHECK(reflect101(6, 5) == 2);
    CHECK(reflect101(-9, 5) == 1);
    for (int i = -30; i < 30; ++i) CHECK(reflect101(i, 7) == oracle::mirror(i, 7));
  }
}

TEST_SUITE("resize") {
  TEST_CASE("constants survive every method and size") {
    const ImageBuffer img(13, 9, 3, 0.25f);
    for (auto m : {ResizeMethod::area, ResizeMethod::bilinear, ResizeMethod::bicubic})
      for (auto [h, w] : {std::pair{1, 1}, {5, 7}, {26, 18}, {40, 3}}) {
        const auto out = resize(img, h, w, m);
        REQUIRE(out.height() == h);
        REQUIRE(out.width() == w);
        for (Index c = 0; c < 3; ++c) CHECK((out.plane(c) - 0.25f).abs().maxCoeff() < 1e-6);
      }
  }

  TEST_CASE("area 8x8 -> 4x4 is the 2x2 block mean") {
    ImageBuffer img(8, 8, 1);
    for (Index y = 0; y < 8; ++y)
      for (Index x = 0; x < 8; ++x) img(y, x, 0) = static_cast<float>(y);
    const auto out = resize(img, 4, 4, ResizeMethod::area);
    for (Index y = 0; y < 4; ++y)
      for (Index x = 0; x < 4; ++x) CHECK(std::abs(out(y, x, 0) - (2 * y + 0.5)) < 1e-6);
  }

  TEST_CASE("area integer downscale equals block mean on random data") {
    for (int k : {2, 3, 4, 5}) {
      const auto img = testing::white_noise(6 * k, 4 * k, static_cast<std::uint64_t>(k), 3);
      const auto out = resize(img.cast<double>(), 6, 4, ResizeMethod::area);
      for (Index c = 0; c < 3; ++c)
        for (Index y = 0; y < 6; ++y)
          for (Index x = 0; x < 4; ++x) {
            const double mean =
                img.plane(c).block(y * k, x * k, k, k).cast<double>().mean();
            CHECK(std::abs(out(y, x, c) - mean) < 1e-6);
          }
    }
  }

  TEST_CASE("ramp: bilinear up then area down matches the reference resampler") {
    ImageBuffer ramp(4, 4, 1);
    for (Index y = 0; y < 4; ++y)
      for (Index x = 0; x < 4; ++x) ramp(y, x, 0) = static_cast<float>((y * 4 + x) / 15.0);
    const auto back = resize(resize(ramp.cast<double>(), 8, 8, ResizeMethod::bilinear), 4, 4,
                             ResizeMethod::area);
    const auto ref = oracle::resize(
        oracle::resize(to_grid(ramp), 8, 8, oracle::Method::bilinear), 4, 4, oracle::Method::area);
    double dev = 0.0, oracle_dev = 0.0;
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) {
        CHECK(std::abs(back(y, x, 0) - ref.at(y, x)) < 1e-12);
        dev = std::max(dev, std::abs(back(y, x, 0) - ramp(y, x, 0)));
        oracle_dev = std::max(oracle_dev, std::abs(ref.at(y, x) - static_cast<double>(ramp(y, x, 0))));
      }
    // frozen from the reference resampler: border clamping pulls the corners by 1/24
    CHECK(oracle_dev == doctest::Approx(0.041666666666666664).epsilon(1e-6));
    CHECK(dev == doctest::Approx(oracle_dev).epsilon(1e-6));
  }

  TEST_CASE("all methods agree with the reference resampler on random sizes") {
    Rng rng(8);
    for (int t = 0; t < 24; ++t) {
      const int ih = 3 + static_cast<int>(uniform01(rng) * 20), iw = 3 + static_cast<int>(uniform01(rng) * 20);
      const int oh = 1 + static_cast<int>(uniform01(rng) * 30), ow = 1 + static_cast<int>(uniform01(rng) * 30);
      const auto m = static_cast<ResizeMethod>(t % 3);
      const auto img = testing::white_noise(ih, iw, 50 + t);
      const auto out = resize(img.cast<double>(), oh, ow, m);
      const auto ref = oracle::resize(to_grid(img), oh, ow, to_oracle(m));
      double err = 0.0;
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) err = std::max(err, std::abs(out(y, x, 0) - ref.at(y, x)));
      INFO("method ", to_string(m), " ", ih, "x", iw, " -> ", oh, "x", ow);
      CHECK(err < 1e-12);
    }
  }

  TEST_CASE("resample matrix rows sum to one") {
    for (auto m : {ResizeMethod::area, ResizeMethod::bilinear, ResizeMethod::bicubic})
      for (auto [n, o] : {std::pair{10, 3}, {3, 10}, {7, 7}, {256, 64}}) {
        const auto r = resample_matrix(n, o, m);
        CHECK((r.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
      }
  }

  TEST_CASE("zero output size is rejected") {
    const ImageBuffer img(8, 8, 1);
    CHECK_THROWS_AS(resize(img, 0, 4, ResizeMethod::bilinear), InvalidArgument);
    CHECK_THROWS_AS(resize(img, 4, 0, ResizeMethod::area), InvalidArgument);
  }

  TEST_CASE("method names round-trip") {
    for (auto m : {ResizeMethod::area, ResizeMethod::bilinear, ResizeMethod::bicubic})
      CHECK(resize_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(resize_method_from_string("lanczos"), InvalidArgument);
  }
}

TEST_SUITE("noise") {
  TEST_CASE("vanishing gaussian level leaves the image alone") {
    const auto img = testing::natural_test_image(32, 32, 2);
    Rng rng(1);
    const auto out = add_gaussian_noise(img, 1e-6, false, rng);
    for (Index c = 0; c < 3; ++c) CHECK((out.plane(c) - img.plane(c)).abs().maxCoeff() < 1e-4);
  }

  TEST_CASE("gaussian std at level 15 on a flat field") {
    const ImageBuffer img(512, 512, 3, 0.5f);
    Rng rng(2);
    const auto out = add_gaussian_noise(img, 15.0, false, rng);
    const Eigen::ArrayXXd d = (out.plane(1) - img.plane(1)).cast<double>();
    const double sd = std::sqrt((d - d.mean()).square().mean());
    CHECK(std::abs(sd - 15.0 / 255.0) < 0.05 * 15.0 / 255.0);
  }

  TEST_CASE("gray gaussian residuals are identical across channels") {
    const auto img = testing::natural_test_image(64, 64, 4);
    Rng rng(3);
    const auto out = add_gaussian_noise(img, 30.0, true, rng);
    // each channel rounds in + n to float separately, so residuals agree to one float ulp
    Index compared = 0;
    for (Index y = 0; y < 64; ++y)
      for (Index x = 0; x < 64; ++x) {
        bool clamped = false;
        for (Index c = 0; c < 3; ++c) clamped |= out(y, x, c) == 0.0f || out(y, x, c) == 1.0f;
        if (clamped) continue;
        ++compared;
        const float r0 = out(y, x, 0) - img(y, x, 0);
        for (Index c = 1; c < 3; ++c)
          CHECK(std::abs((out(y, x, c) - img(y, x, c)) - r0) <= std::numeric_limits<float>::epsilon());
      }
    CHECK(compared > 3000);
  }

  TEST_CASE("gray noise on a flat gray field is bit-identical across channels") {
    const ImageBuffer img(64, 64, 3, 0.5f);
    Rng a(4), b(4);
    for (const auto& out :
         {add_gaussian_noise(img, 20.0, true, a), add_poisson_noise(img, 2.0, true, b)}) {
      CHECK((out.plane(0) == out.plane(1)).all());
      CHECK((out.plane(1) == out.plane(2)).all());
    }
  }

  TEST_CASE("gray noise on channel-equal content is bit-identical") {
    const auto color = testing::natural_test_image(64, 64, 9);
    ImageBuffer img(64, 64, 3);
    for (Index c = 0; c < 3; ++c) img.plane(c) = color.plane(1);
    Rng a(10), b(10);
    for (const auto& out :
         {add_gaussian_noise(img, 25.0, true, a), add_poisson_noise(img, 2.5, true, b)}) {
      CHECK((out.plane(0) == out.plane(1)).all());
      CHECK((out.plane(1) == out.plane(2)).all());
    }
  }

  TEST_CASE("poisson on black stays black") {
    const ImageBuffer img(32, 32, 3, 0.0f);
    for (double level : {0.05, 1.0, 3.0}) {
      Rng rng(5);
      const auto out = add_poisson_noise(img, level, false, rng);
      for (Index c = 0; c < 3; ++c) CHECK((out.plane(c) == 0.0f).all());
    }
  }

  TEST_CASE("poisson variance at mid-gray") {
    const ImageBuffer img(512, 512, 1, 0.5f);
    Rng rng(6);
    const auto out = add_poisson_noise(img, 3.0, false, rng);
    const Eigen::ArrayXXd d = out.plane(0).cast<double>();
    const double var = (d - d.mean()).square().mean();
    const double expected = 0.5 * 3.0 / 255.0;
    CHECK(std::abs(var - expected) < 0.10 * expected);
  }

  TEST_CASE("poisson variance grows with the level") {
    const ImageBuffer img(128, 128, 1, 0.4f);
    Rng a(7), b(7);
    const Eigen::ArrayXXd lo = add_poisson_noise(img, 0.05, false, a).plane(0).cast<double>();
    const Eigen::ArrayXXd hi = add_poisson_noise(img, 3.0, false, b).plane(0).cast<double>();
    CHECK((hi - hi.mean()).square().mean() > (lo - lo.mean()).square().mean());
  }

  TEST_CASE("noise output is clamped") {
    const auto img = testing::natural_test_image(64, 64, 5);
    Rng rng(8);
    for (const auto& out :
         {add_gaussian_noise(img, 30.0, false, rng), add_poisson_noise(img, 3.0, false, rng)})
      for (Index c = 0; c < 3; ++c) {
        CHECK(out.plane(c).minCoeff() >= 0.0f);
        CHECK(out.plane(c).maxCoeff() <= 1.0f);
      }
  }

  TEST_CASE("same rng state, same output") {
    const auto img = testing::natural_test_image(48, 48, 6);
    Rng a(9), b(9);
    CHECK(add_gaussian_noise(img, 12.0, false, a) == add_gaussian_noise(img, 12.0, false, b));
    CHECK(add_poisson_noise(img, 1.5, true, a) == add_poisson_noise(img, 1.5, true, b));
  }
}

TEST_SUITE("codec") {
  TEST_CASE("psnr decreases and blockiness increases with lower quality") {
    const auto img = testing::natural_test_image(256, 256, 7);
    const auto q95 = jpeg_roundtrip(img, 95), q60 = jpeg_roundtrip(img, 60), q30 = jpeg_roundtrip(img, 30);
    CHECK(psnr(q95, img) > psnr(q60, img));
    CHECK(psnr(q60, img) > psnr(q30, img));
    CHECK(estimate_blockiness(q30) > estimate_blockiness(q95));
  }

  TEST_CASE("flat field survives q30") {
    const ImageBuffer img(64, 64, 3, 0.5f);
    const auto out = jpeg_roundtrip(img, 30);
    for (Index c = 0; c < 3; ++c) CHECK((out.plane(c) - 0.5f).abs().maxCoeff() <= 2.0f / 255.0f);
  }

  TEST_CASE("jpeg is deterministic and keeps dimensions") {
    const auto img = testing::natural_test_image(40, 56, 8);
    const auto a = jpeg_roundtrip(img, 47.4), b = jpeg_roundtrip(img, 47.0);
    CHECK(a == b);  // rounds to the same integer quality
    CHECK(a.height() == 40);
    CHECK(a.width() == 56);
    CHECK(encode_jpeg(to_8bit(img), 80) == encode_jpeg(to_8bit(img), 80));
  }

  TEST_CASE("jpeg quality bounds") {
    const ImageBuffer img(16, 16, 3, 0.3f);
    CHECK_THROWS_AS(jpeg_roundtrip(img, 0.4), InvalidArgument);
    CHECK_THROWS_AS(jpeg_roundtrip(img, 100.6), InvalidArgument);
    CHECK_NOTHROW(jpeg_roundtrip(img, 0.5));
    CHECK_NOTHROW(jpeg_roundtrip(img, 100.0));
    CHECK_THROWS_AS(jpeg_roundtrip(ImageBuffer(7, 16, 3), 50), InvalidArgument);
  }

  TEST_CASE("grayscale jpeg round-trip") {
    const auto img = testing::dead_leaves(32, 32, 3, 1);
    const auto out = jpeg_roundtrip(img, 90);
    CHECK(out.channels() == 1);
    CHECK(psnr(out, clamp01(img)) > 30.0);
  }

  TEST_CASE("png is lossless for 8-bit data and byte-stable") {
    const auto img = testing::natural_test_image(33, 21, 9);
    const auto bytes = encode_png(to_8bit(img));
    CHECK(from_8bit(decode_png(bytes)) == img);
    CHECK(encode_png(to_8bit(img)) == bytes);
  }

  TEST_CASE("8-bit conversion rounds to nearest and clamps") {
    ImageBuffer img(1, 4, 1);
    img(0, 0, 0) = 0.45f / 255.0f;
    img(0, 1, 0) = 1.55f / 255.0f;
    img(0, 2, 0) = -0.2f;
    img(0, 3, 0) = 1.7f;
    const auto q = to_8bit(img);
    CHECK(q.data[0] == 0);
    CHECK(q.data[1] == 2);
    CHECK(q.data[2] == 0);
    CHECK(q.data[3] == 255);
  }

  TEST_CASE("sha256 of a known vector") {
    const std::string abc = "abc";
    CHECK(sha256_hex(Bytes(abc.begin(), abc.end())) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("corrupt bytes raise IoError") {
    CHECK_THROWS_AS(decode_png(Bytes{1, 2, 3}), IoError);
    CHECK_THROWS_AS(decode_jpeg(Bytes{0xFF, 0xD8, 0}), IoError);
  }
}

TEST_SUITE("image") {
  TEST_CASE("construction validates shape") {
    CHECK_THROWS_AS(ImageBuffer(0, 4, 1), InvalidArgument);
    CHECK_THROWS_AS(ImageBuffer(4, 4, 2), InvalidArgument);
    CHECK_NOTHROW(ImageBuffer(4, 4, 3));
  }

  TEST_CASE("luma uses Rec. 601 weights") {
    ImageBuffer img(1, 1, 3);
    img(0, 0, 0) = 1.0f;
    CHECK(luma(img)(0, 0) == doctest::Approx(0.299));
    img(0, 0, 0) = 0.0f;
    img(0, 0, 1) = 1.0f;
    CHECK(luma(img)(0, 0) == doctest::Approx(0.587));
  }

  TEST_CASE("psnr of identical images is infinite") {
    const ImageBuffer img(8, 8, 1, 0.2f);
    CHECK(std::isinf(psnr(img, img)));
  }
}
