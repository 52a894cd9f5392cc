#include <doctest.h>

#include <algorithm>

#include "srprompt/prompt.hpp"
#include "support/oracles.hpp"

using namespace srprompt;

namespace {

PromptBins random_bins(Rng& rng) {
  const auto level = [&] { return static_cast<Level>(static_cast<int>(uniform01(rng) * 4)); };
  PromptBins b;
  b.blur = level();
  b.resize1 = static_cast<Direction>(static_cast<int>(uniform01(rng) * 4));
  b.noise = level();
  b.compression = level();
  b.resize2 = uniform01(rng) < 0.5;
  if (!is_renderable(b)) b.resize2 = true;
  return b;
}

DegradationSpec spec_with(double sigma, double gamma1, double phi1, double q) {
  DegradationSpec s;
  s.sigma_x = s.sigma_y = sigma;
  s.gamma1 = gamma1;
  s.noise_kind = NoiseKind::gaussian;
  s.noise_level = phi1;
  s.jpeg_q = q;
  return s;
}

std::string parse_error_field(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_SUITE("bins_from_spec") {
  const DegradationConfig config;

  TEST_CASE("midpoint and endpoint examples") {
    CHECK(bins_from_spec(spec_with(1.0, 1.0, 15.5, 60), config).noise == Level::medium);
    CHECK(bins_from_spec(spec_with(1.0, 1.0, 5, 95), config).compression == Level::light);
    CHECK(bins_from_spec(spec_with(1.0, 1.0, 5, 30), config).compression == Level::heavy);
  }

  TEST_CASE("heavy blur, upsample, medium noise example") {
    const auto b = bins_from_spec(spec_with(2.9, 1.3, 18, 60), config);
    CHECK(b == PromptBins{Level::heavy, Direction::upsample, Level::medium, Level::medium, true});
  }

  TEST_CASE("4.5 lands in the light third of [1,30]") {
    CHECK(bins_from_spec(spec_with(1.0, 1.0, 4.5, 60), config).noise == Level::light);
  }

  TEST_CASE("thirds agree with the oracle across each range") {
    for (int i = 0; i <= 1000; ++i) {
      const double t = i / 1000.0;
      const double sigma = 0.2 + t * 2.8, phi1 = 1 + t * 29, phi2 = 0.05 + t * 2.95, q = 30 + t * 65;
      const auto b = bins_from_spec(spec_with(sigma, 1.0, phi1, q), config);
      CHECK(static_cast<int>(b.blur) == oracle::third(sigma, 0.2, 3.0));
      CHECK(static_cast<int>(b.noise) == oracle::third(phi1, 1, 30));
      CHECK(static_cast<int>(b.compression) == 2 - oracle::third(q, 30, 95));
      auto p = spec_with(sigma, 1.0, phi2, q);
      p.noise_kind = NoiseKind::poisson;
      CHECK(static_cast<int>(bins_from_spec(p, config).noise) == oracle::third(phi2, 0.05, 3.0));
    }
  }

  TEST_CASE("boundary values fall into the lower bin") {
    // [1, 30] splits at 1 + 29/3 and 1 + 58/3
    CHECK(level_for(1 + 29.0 / 3.0, {1, 30}) == Level::medium);
    CHECK(level_for(std::nextafter(1 + 29.0 / 3.0, 0.0), {1, 30}) == Level::light);
    CHECK(level_for(30, {1, 30}) == Level::heavy);
    CHECK(level_for(1, {1, 30}) == Level::light);
  }

  TEST_CASE("compression label is monotone nonincreasing in q") {
    int prev = 3;
    for (int q = 30; q <= 95; ++q) {
      const int lvl = static_cast<int>(bins_from_spec(spec_with(1, 1, 5, q), config).compression);
      CHECK(lvl <= prev);
      prev = lvl;
    }
  }

  TEST_CASE("blur uses the sigma mean") {
    auto s = spec_with(0.3, 1.0, 5, 60);
    s.blur_kind = BlurKind::aniso;
    s.sigma_y = 2.9;  // mean 1.6: middle third of [0.2, 3]
    CHECK(bins_from_spec(s, config).blur == Level::medium);
  }

  TEST_CASE("resize1 dead band") {
    CHECK(direction_for(0.949) == Direction::downsample);
    CHECK(direction_for(0.95) == Direction::unchange);
    CHECK(direction_for(1.0) == Direction::unchange);
    CHECK(direction_for(1.05) == Direction::unchange);
    CHECK(direction_for(1.051) == Direction::upsample);
  }

  TEST_CASE("out-of-range specs are rejected") {
    CHECK_THROWS_AS(bins_from_spec(spec_with(3.5, 1, 5, 60), config), InvalidArgument);
    CHECK_THROWS_AS(bins_from_spec(spec_with(1, 1, 31, 60), config), InvalidArgument);
    CHECK_THROWS_AS(bins_from_spec(spec_with(1, 1, 5, 99), config), InvalidArgument);
  }

  TEST_CASE("resize2 is always present for pipeline specs") {
    CHECK(bins_from_spec(spec_with(1, 1, 5, 60), config).resize2);
  }
}

TEST_SUITE("render") {
  TEST_CASE("canonical five-descriptor prompt") {
    Rng rng(1);
    const PromptBins b{Level::heavy, Direction::upsample, Level::medium, Level::medium, true};
    CHECK(render(b, {}, rng) == "heavy blur, upsample, medium noise, medium compression, downsample");
  }

  TEST_CASE("full dropout gives the empty prompt") {
    Rng rng(2);
    PromptFormat f;
    f.dropout = 1.0;
    const PromptBins b{Level::heavy, Direction::upsample, Level::medium, Level::medium, true};
    CHECK(render(b, f, rng).empty());
    CHECK(parse("") == PromptBins{});
  }

  TEST_CASE("unspecified slots are never rendered") {
    Rng rng(3);
    CHECK(render(PromptBins{}, {}, rng).empty());
    CHECK(render(PromptBins{Level::unspecified, Direction::unspecified, Level::medium,
                            Level::unspecified, false},
                 {}, rng) == "medium noise");
  }

  TEST_CASE("shuffled renderings keep the descriptor multiset") {
    const PromptBins b{Level::light, Direction::unchange, Level::heavy, Level::medium, true};
    PromptFormat f;
    f.order = PromptOrder::shuffled;
    Rng r1(4), r2(5);
    const auto a = render(b, f, r1), c = render(b, f, r2);
    CHECK(parse(a) == b);
    CHECK(parse(c) == b);
  }

  TEST_CASE("the one direction state without a prompt is rejected") {
    Rng rng(11);
    const PromptBins lone{Level::light, Direction::downsample, Level::light, Level::light, false};
    CHECK_FALSE(is_renderable(lone));
    CHECK_THROWS_AS(render(lone, {}, rng), InvalidArgument);
    auto both = lone;
    both.resize2 = true;
    CHECK(parse(render(both, {}, rng)) == both);
  }

  TEST_CASE("rng consumption does not depend on the bins") {
    PromptFormat f;
    f.dropout = 0.3;
    f.order = PromptOrder::shuffled;
    Rng a(6), b(6);
    render(PromptBins{}, f, a);
    render(PromptBins{Level::heavy, Direction::upsample, Level::medium, Level::medium, true}, f, b);
    CHECK(a() == b());
  }

  TEST_CASE("verbose wording parses back to the same bins") {
    const DegradationConfig config;
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
      DegradationSpec s = sample_spec(config, rng);
      const auto text = render_verbose(s, {}, rng);
      CHECK(parse(text, config) == bins_from_spec(s, config));
    }
  }

  TEST_CASE("verbose examples") {
    CHECK(parse("Gaussian noise with noise level 4.5").noise == Level::light);
    CHECK(parse("gaussian noise with noise level 20").noise == Level::medium);
    CHECK(parse("gaussian noise with noise level 21").noise == Level::heavy);
    CHECK(parse("poisson noise with noise level 1.5").noise == Level::medium);
    CHECK(parse("jpeg compression with quality 35").compression == Level::heavy);
    CHECK(parse("gaussian blur with sigma 0.5").blur == Level::light);
  }

  TEST_CASE("dropout validation") {
    PromptFormat f;
    f.dropout = 1.5;
    CHECK_THROWS_AS(f.validate(), InvalidArgument);
  }
}

TEST_SUITE("parse") {
  TEST_CASE("simplified prompt") {
    CHECK(parse("medium noise") ==
          PromptBins{Level::unspecified, Direction::unspecified, Level::medium, Level::unspecified, false});
  }

  TEST_CASE("out-of-order prompt binds directions by multiset") {
    Rng rng(8);
    const PromptBins expected{Level::heavy, Direction::upsample, Level::light, Level::medium, true};
    CHECK(parse("downsample, medium compression, light noise, upsample, heavy blur") == expected);
    CHECK(render(expected, {}, rng) == "heavy blur, upsample, light noise, medium compression, downsample");
  }

  TEST_CASE("direction binding cases") {
    CHECK(parse("downsample").resize2);
    CHECK(parse("downsample").resize1 == Direction::unspecified);
    CHECK(parse("downsample, downsample").resize1 == Direction::downsample);
    CHECK(parse("downsample, downsample").resize2);
    CHECK(parse("unchange").resize1 == Direction::unchange);
    CHECK_FALSE(parse("unchange").resize2);
    CHECK(parse("upsample, downsample").resize1 == Direction::upsample);
    CHECK_THROWS_AS(parse("upsample, unchange"), ParseError);
    CHECK_THROWS_AS(parse("downsample, downsample, downsample"), ParseError);
  }

  TEST_CASE("case and whitespace are ignored") {
    CHECK(parse("  HEAVY Blur ,Medium   NOISE,downsample ") ==
          PromptBins{Level::heavy, Direction::unspecified, Level::medium, Level::unspecified, true});
  }

  TEST_CASE("unknown words are reported") {
    CHECK(parse_error_field("foo bar") == "foo");
    CHECK(parse_error_field("medium noise, extreme blur") == "extreme");
    CHECK(parse_error_field("heavy sharpness") == "sharpness");
  }

  TEST_CASE("conflicting levels are rejected") {
    CHECK_THROWS_AS(parse("light noise, heavy noise"), ParseError);
    CHECK_NOTHROW(parse("light noise, light noise"));
  }

  TEST_CASE("1000 random bin sets round-trip in both orders") {
    Rng rng(9);
    PromptFormat shuffled;
    shuffled.order = PromptOrder::shuffled;
    for (int i = 0; i < 1000; ++i) {
      const auto b = random_bins(rng);
      CHECK(parse(render(b, {}, rng)) == b);
      CHECK(parse(render(b, shuffled, rng)) == b);
    }
  }

  TEST_CASE("dropout renderings are weakenings") {
    Rng rng(10);
    PromptFormat f;
    f.dropout = 0.5;
    f.order = PromptOrder::shuffled;
    for (int i = 0; i < 1000; ++i) {
      const auto b = random_bins(rng);
      const auto parsed = parse(render(b, f, rng));
      CHECK(is_weakening(parsed, b));
      CHECK(descriptor_count(parsed) <= descriptor_count(b));
    }
  }

  TEST_CASE("is_weakening") {
    const PromptBins strong{Level::heavy, Direction::upsample, Level::medium, Level::light, true};
    CHECK(is_weakening(strong, strong));
    CHECK(is_weakening(PromptBins{}, strong));
    auto w = strong;
    w.noise = Level::heavy;
    CHECK_FALSE(is_weakening(w, strong));
    w = strong;
    w.resize2 = false;
    CHECK(is_weakening(w, strong));
  }

  TEST_CASE("string conversions") {
    for (auto l : {Level::light, Level::medium, Level::heavy, Level::unspecified})
      CHECK(level_from_string(to_string(l)) == l);
    for (auto d : {Direction::upsample, Direction::downsample, Direction::unchange, Direction::unspecified})
      CHECK(direction_from_string(to_string(d)) == d);
    for (auto c : kComponents) CHECK(component_from_string(to_string(c)) == c);
  }
}
