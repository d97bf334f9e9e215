#include "core/config.hpp"

#include <string>

#include "core/common.hpp"
#include "doctest.h"

using namespace setarw;

namespace {

const char* kFlipModel = R"cfg(
# two-regime flip model
[model]
regime1.intercept = 0
regime1.coeffs = 0.6
regime1.noise = uniform 1.0
regime2.coeffs = -0.6
regime2.noise = uniform 1.0
thresholds = 0.0
delay = 2
delay_bound = 4
)cfg";

}  // namespace

TEST_CASE("parse_config reads sections, comments, and values") {
  ConfigDoc doc = parse_config("[a]\nx = 1.5  # trailing comment\ny= two words \n[b]\nz=3\n");
  CHECK(doc.get_real("a", "x") == 1.5);
  CHECK(doc.get("a", "y") == "two words");
  CHECK(doc.get_int("b", "z") == 3);
  CHECK(doc.has("b", "z"));
  CHECK_FALSE(doc.has("b", "w"));
  CHECK(doc.get_int_or("b", "w", 9) == 9);
  CHECK(doc.get_real_or("a", "missing", -1.0) == -1.0);
  CHECK_THROWS_AS(doc.get("a", "missing"), error);
}

TEST_CASE("parse_config errors carry line numbers") {
  auto message_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message_of("[a]\nnot a pair\n").find("line 2") != std::string::npos);
  CHECK(message_of("key = 1\n").find("line 1") != std::string::npos);  // outside section
  CHECK(message_of("[]\n").find("line 1") != std::string::npos);
  CHECK(message_of("[a\nx=1\n").find("line 1") != std::string::npos);
  CHECK(message_of("[a]\n = 1\n").find("line 2") != std::string::npos);
}

TEST_CASE("flag and list getters") {
  ConfigDoc doc = parse_config("[s]\nf1 = on\nf2 = false\nlist = 1 2.5, -3\nempty =\n");
  CHECK(doc.get_flag_or("s", "f1", false));
  CHECK_FALSE(doc.get_flag_or("s", "f2", true));
  CHECK(doc.get_flag_or("s", "absent", true));
  CHECK(doc.get_reals("s", "list") == std::vector<double>{1.0, 2.5, -3.0});
  CHECK(doc.get_reals("s", "empty").empty());
  ConfigDoc bad = parse_config("[s]\nf = maybe\n");
  CHECK_THROWS_AS(bad.get_flag_or("s", "f", true), error);
}

TEST_CASE("model_from_config builds the finalized model") {
  SetarModel m = model_from_config(parse_config(kFlipModel));
  REQUIRE(m.regimes.size() == 2);
  CHECK(m.regimes[0].coeffs == std::vector<double>{0.6});
  CHECK(m.regimes[1].coeffs == std::vector<double>{-0.6});
  CHECK(m.thresholds == std::vector<double>{0.0});
  CHECK(m.delay == 2);
  CHECK(m.delay_bound == 4);
  CHECK(m.regimes[0].noise.kind == NoiseKind::uniform);
  CHECK(m.regimes[0].noise.bound == 1.0);
}

TEST_CASE("model_from_config error paths") {
  CHECK_THROWS_AS(model_from_config(parse_config("[estimator]\nj_star = 2\n")), error);
  CHECK_THROWS_AS(model_from_config(parse_config("[model]\ndelay = 2\n")), error);
  CHECK_THROWS_AS(
      model_from_config(parse_config("[model]\nregime1.noise = bogus 1\nthresholds =\n")), error);
  CHECK_THROWS_AS(
      model_from_config(parse_config("[model]\nregime1.noise = uniform\nthresholds =\n")), error);
  // finalize_model failures propagate: 2 regimes need 1 threshold
  CHECK_THROWS_AS(model_from_config(parse_config(
                      "[model]\nregime1.coeffs = 0.5\nregime2.coeffs = 0.1\nthresholds =\n")),
                  error);
}

TEST_CASE("model round-trips through its config text") {
  SetarModel m = model_from_config(parse_config(kFlipModel));
  m.regimes[0].intercept = 1.0 / 3.0;
  m.regimes[1].noise = NoiseSpec{NoiseKind::truncated_gaussian, 0.7, 1.3};
  std::string text = model_to_config(m);
  SetarModel back = model_from_config(parse_config(text));
  CHECK(back.regimes[0].intercept == m.regimes[0].intercept);
  CHECK(back.regimes[0].coeffs == m.regimes[0].coeffs);
  CHECK(back.regimes[1].noise.kind == NoiseKind::truncated_gaussian);
  CHECK(back.regimes[1].noise.scale == 0.7);
  CHECK(back.regimes[1].noise.bound == 1.3);
  CHECK(back.thresholds == m.thresholds);
  CHECK(back.delay == m.delay);
  CHECK(back.delay_bound == m.delay_bound);
}

TEST_CASE("wavelet_from_config falls back and parses geometry") {
  ConfigDoc empty = parse_config("[model]\nregime1.coeffs = 0.5\nthresholds =\n");
  WaveletSpec fb = default_wavelet();
  WaveletSpec got = wavelet_from_config(empty, fb);
  CHECK(got.A == 3.0);

  ConfigDoc custom = parse_config(
      "[wavelet]\nA = 12\nright = 1.35 0.6 1.0\nleft1 = -1.35 0.6\nleft2 = -11.6 0.6\n");
  WaveletSpec w = wavelet_from_config(custom, fb);
  CHECK(w.A == 12.0);
  CHECK(w.right.half_width == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(psi_moments(w).ok);

  ConfigDoc bad = parse_config("[wavelet]\nA = 3\nright = 2.0 0.5\nleft1 = -1.75 0.5\nleft2 = -2.5 0.5\n");
  CHECK_THROWS_AS(wavelet_from_config(bad, fb), error);
}
