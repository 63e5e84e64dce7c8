#include <catch_amalgamated.hpp>

#include "helpers.hpp"

#include <random>

using namespace nnefx;

TEST_CASE("keras 'same' pads only on the high side") {
  PoolEncoding e = keras_max_pool(2, 2, 2, 2, "same");
  CHECK(e.size == IntList{1, 1, 2, 2});
  CHECK(e.stride == IntList{1, 1, 2, 2});
  CHECK(e.dilation == IntList{1, 1, 1, 1});
  CHECK(e.padding == TupleList{{0, 0}, {0, 0}, {0, 1}, {0, 1}});
  CHECK(e.border == "ignore");

  PoolEncoding e3 = keras_max_pool(3, 3, 2, 2, "same");
  CHECK(e3.padding == TupleList{{0, 0}, {0, 0}, {0, 2}, {0, 2}});
}

TEST_CASE("keras 'valid' adds no padding") {
  PoolEncoding e = keras_max_pool(2, 2, 2, 2, "valid");
  CHECK(e.padding == TupleList{{0, 0}, {0, 0}, {0, 0}, {0, 0}});
  CHECK_THROWS_AS(keras_max_pool(2, 2, 2, 2, "full"), Error);
}

TEST_CASE("pytorch pads symmetrically") {
  PoolEncoding e = pytorch_max_pool(2, 2, 2, 2, 1);
  CHECK(e.padding == TupleList{{0, 0}, {0, 0}, {1, 1}, {1, 1}});
  CHECK(pytorch_max_pool(3, 3, 1, 1, 0).padding == TupleList{{0, 0}, {0, 0}, {0, 0}, {0, 0}});
  CHECK_THROWS_AS(pytorch_max_pool(2, 2, 2, 2, -1), Error);
}

TEST_CASE("the rendered fragments pin the difference down to the padding") {
  std::string keras = pool_nnef_fragment(keras_max_pool(2, 2, 2, 2, "same"));
  std::string pytorch = pool_nnef_fragment(pytorch_max_pool(2, 2, 2, 2, 1));
  CHECK(keras.find("padding = [(0, 0), (0, 0), (0, 1), (0, 1)]") != std::string::npos);
  CHECK(pytorch.find("padding = [(0, 0), (0, 0), (1, 1), (1, 1)]") != std::string::npos);
  CHECK(keras.find("max_pool(") != std::string::npos);
  // Identical apart from the padding argument.
  CHECK(keras.substr(0, keras.find("padding")) == pytorch.substr(0, pytorch.find("padding")));

  // The fragment is real syntax: it parses back inside a graph.
  std::string source =
      "graph probe(input) -> (pool) {\n"
      "    input = external(shape = [1, 28, 28]);\n"
      "    " + keras + "\n"
      "}\n";
  NnefProgram p = parse_program(source);
  CHECK(p.instructions.back().op == Op::MaxPool);
}

TEST_CASE("28x28 with 2x2 kernels: same-vs-pad-1 shapes differ") {
  ConventionReport r = compare_conventions(keras_max_pool(2, 2, 2, 2, "same"),
                                           pytorch_max_pool(2, 2, 2, 2, 1),
                                           std::make_pair<int64_t, int64_t>(28, 28));
  CHECK_FALSE(r.arguments_equal);
  REQUIRE(r.shape_a.has_value());
  REQUIRE(r.shape_b.has_value());
  CHECK(*r.shape_a == Shape{1, 14, 14});
  CHECK(*r.shape_b == Shape{1, 15, 15});
  CHECK(r.diverges);
}

TEST_CASE("identical encodings do not diverge") {
  ConventionReport r = compare_conventions(keras_max_pool(2, 2, 2, 2, "valid"),
                                           pytorch_max_pool(2, 2, 2, 2, 0),
                                           std::make_pair<int64_t, int64_t>(28, 28));
  CHECK(r.arguments_equal);
  CHECK(*r.shape_a == *r.shape_b);
  CHECK_FALSE(r.diverges);
}

TEST_CASE("argument equality can mask nothing: divergence needs no input") {
  ConventionReport r = compare_conventions(keras_max_pool(2, 2, 2, 2, "same"),
                                           pytorch_max_pool(2, 2, 2, 2, 1), std::nullopt);
  CHECK_FALSE(r.arguments_equal);
  CHECK(r.diverges);
  CHECK_FALSE(r.shape_a.has_value());
}

TEST_CASE("keras 'same' always yields ceil(n/s) outputs") {
  std::mt19937 rng(10301);
  std::uniform_int_distribution<int64_t> n_dist(1, 40);
  std::uniform_int_distribution<int64_t> k_dist(1, 4);
  std::uniform_int_distribution<int64_t> s_dist(1, 4);
  for (int round = 0; round < 200; ++round) {
    int64_t k_h = k_dist(rng), k_w = k_dist(rng);
    int64_t s_h = s_dist(rng), s_w = s_dist(rng);
    int64_t n_h = std::max(n_dist(rng), k_h), n_w = std::max(n_dist(rng), k_w);
    PoolEncoding e = keras_max_pool(k_h, k_w, s_h, s_w, "same");
    Shape got = pool_output_shape(e, n_h, n_w);
    INFO("k=(" << k_h << "," << k_w << ") s=(" << s_h << "," << s_w << ") n=(" << n_h << "," << n_w << ")");
    CHECK(got == Shape{1, (n_h + s_h - 1) / s_h, (n_w + s_w - 1) / s_w});
  }
}

TEST_CASE("pool output shape matches the closed form for explicit padding") {
  std::mt19937 rng(10302);
  std::uniform_int_distribution<int64_t> n_dist(4, 40);
  std::uniform_int_distribution<int64_t> k_dist(1, 4);
  std::uniform_int_distribution<int64_t> s_dist(1, 4);
  std::uniform_int_distribution<int64_t> p_dist(0, 2);
  for (int round = 0; round < 200; ++round) {
    int64_t k = k_dist(rng), s = s_dist(rng), pad = std::min(p_dist(rng), k - 1);
    int64_t n = std::max(n_dist(rng), k);
    PoolEncoding e = pytorch_max_pool(k, k, s, s, pad);
    Shape got = pool_output_shape(e, n, n);
    int64_t expect = (n + 2 * pad - k) / s + 1;
    CHECK(got == Shape{1, expect, expect});
  }
}
