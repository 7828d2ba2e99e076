#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <limits>

#include "cmfmts/catalog.hpp"
#include "cmfmts/dataset.hpp"
#include "cmfmts/errors.hpp"
#include "cmfmts/extract.hpp"
#include "cmfmts/matrix.hpp"
#include "cmfmts/rng.hpp"

using namespace cmfmts;

namespace {

bool bits_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

MTSDataset make_dataset(std::size_t instances, std::size_t dims, std::size_t len,
                        std::uint64_t seed) {
  Rng rng(seed);
  MTSDataset ds;
  ds.name = "synth";
  ds.dims = dims;
  ds.class_alphabet = {"a", "b"};
  for (std::size_t i = 0; i < instances; ++i) {
    MTSInstance inst;
    inst.id = "inst" + std::to_string(i);
    inst.label = i % 2 ? "a" : "b";
    for (std::size_t d = 0; d < dims; ++d) {
      Channel ch;
      for (std::size_t t = 0; t < len; ++t) ch.values.push_back(rng.gaussian());
      inst.channels.push_back(std::move(ch));
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

} // namespace

TEST_CASE("extract_dataset produces the channel-major wide matrix") {
  MTSDataset ds = make_dataset(2, 3, 30, 7);
  FeatureMatrix m = extract_dataset(ds, default_catalog());
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 3 * 41);
  REQUIRE(m.column_names()[0] == "var1_" + default_catalog().at(0).name);
  REQUIRE(m.labels()[0] == "b");
  REQUIRE(m.ids()[1] == "inst1");

  // channel-major layout: index of var{d}_{f} is (d-1)*j + f
  const std::size_t j = default_catalog().size();
  for (std::size_t d = 1; d <= 3; ++d)
    for (std::size_t f : {std::size_t{0}, std::size_t{17}, j - 1}) {
      const std::string name = "var" + std::to_string(d) + "_" + default_catalog().at(f).name;
      REQUIRE(m.column_index(name) == (d - 1) * j + f);
    }

  REQUIRE(m.at(0, m.column_index("var1_length")) == 30.0);
}

TEST_CASE("instance permutation permutes rows and nothing else") {
  MTSDataset ds = make_dataset(5, 2, 25, 11);
  FeatureMatrix before = extract_dataset(ds, default_catalog());

  MTSDataset permuted = ds;
  std::swap(permuted.instances[0], permuted.instances[3]);
  std::swap(permuted.instances[1], permuted.instances[4]);
  FeatureMatrix after = extract_dataset(permuted, default_catalog());

  const std::size_t perm[] = {3, 4, 2, 0, 1}; // after-row r came from before-row perm[r]
  for (std::size_t r = 0; r < 5; ++r) {
    REQUIRE(after.ids()[r] == before.ids()[perm[r]]);
    for (std::size_t c = 0; c < before.cols(); ++c)
      REQUIRE(bits_equal(after.at(r, c), before.at(perm[r], c)));
  }
}

TEST_CASE("parallel extraction matches single-threaded bit for bit") {
  MTSDataset ds = make_dataset(12, 2, 40, 13);
  FeatureMatrix one = extract_dataset(ds, default_catalog(), 1);
  FeatureMatrix eight = extract_dataset(ds, default_catalog(), 8);
  REQUIRE(one.column_names() == eight.column_names());
  for (std::size_t r = 0; r < one.rows(); ++r)
    for (std::size_t c = 0; c < one.cols(); ++c)
      REQUIRE(bits_equal(one.at(r, c), eight.at(r, c)));
}

TEST_CASE("feature CSV round trip is lossless") {
  FeatureMatrix m({"var1_a", "var1_b", "var2_a"}, 3);
  m.id(0) = "r0";
  m.id(1) = "r1";
  m.id(2) = "r2";
  m.label(0) = "x";
  m.label(1) = "y";
  m.label(2) = "x";
  m.at(0, 0) = 0.1 + 0.2;
  m.at(0, 1) = std::nan("");
  m.at(0, 2) = -1e-300;
  m.at(1, 0) = 1.0 / 3.0;
  m.at(1, 1) = 7;
  m.at(1, 2) = std::numeric_limits<double>::infinity();
  m.at(2, 0) = -0.0;
  m.at(2, 1) = 3.141592653589793;
  m.at(2, 2) = 1e308;

  const std::string text = write_feature_csv(m);
  REQUIRE(text.find(",NA,") != std::string::npos);
  FeatureMatrix back = read_feature_csv(text);
  REQUIRE(back.rows() == 3);
  REQUIRE(back.column_names() == m.column_names());
  REQUIRE(back.ids() == m.ids());
  REQUIRE(back.labels() == m.labels());
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      INFO("cell " << r << "," << c);
      if (std::isnan(m.at(r, c)))
        REQUIRE(std::isnan(back.at(r, c)));
      else
        REQUIRE(bits_equal(back.at(r, c), m.at(r, c)));
    }
}

TEST_CASE("feature CSV header errors are reported") {
  REQUIRE_THROWS_AS(read_feature_csv("bogus,header\n1,2\n"), parse_error);
  REQUIRE_THROWS_AS(read_feature_csv("id,label,c1\nr0,x\n"), parse_error); // short row
  REQUIRE_THROWS_AS(read_feature_csv(""), parse_error);
}

TEST_CASE("select_columns keeps order and rejects unknown names") {
  FeatureMatrix m({"a", "b", "c"}, 1);
  m.id(0) = "r";
  m.label(0) = "l";
  m.at(0, 0) = 1;
  m.at(0, 1) = 2;
  m.at(0, 2) = 3;
  FeatureMatrix sel = m.select_columns({"c", "a"});
  REQUIRE(sel.cols() == 2);
  REQUIRE(sel.at(0, 0) == 3.0);
  REQUIRE(sel.at(0, 1) == 1.0);
  REQUIRE_THROWS_AS(m.select_columns({"zz"}), compute_error);
}
