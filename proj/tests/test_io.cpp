#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "gdag/dag.hpp"
#include "gdag/errors.hpp"
#include "gdag/io.hpp"
#include "gdag/prior.hpp"
#include "gdag/rng.hpp"

using namespace gdag;

namespace {

constexpr std::uint64_t kTestStream = 0x696f5f74657374ull;

// Scratch directory cleaned up per test case.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("gdag_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

}  // namespace

TEST_CASE("identifier validation") {
  CHECK(is_identifier("x"));
  CHECK(is_identifier("_tmp1"));
  CHECK(is_identifier("A_b_9"));
  CHECK_FALSE(is_identifier(""));
  CHECK_FALSE(is_identifier("9x"));
  CHECK_FALSE(is_identifier("a-b"));
  CHECK_FALSE(is_identifier("a b"));
  CHECK_FALSE(is_identifier("café"));
}

TEST_CASE("dataset parsing") {
  SUBCASE("single column") {
    Dataset d = parse_dataset("x\n1.0\n2.0\n");
    CHECK(d.variable_names == std::vector<std::string>{"x"});
    REQUIRE(d.sample_count() == 2);
    CHECK(d.values(0, 0) == 1.0);
    CHECK(d.values(1, 0) == 2.0);
  }

  SUBCASE("header only means zero rows") {
    Dataset d = parse_dataset("x,y\n");
    CHECK(d.sample_count() == 0);
    CHECK(d.variable_count() == 2);
    CHECK(d.variable_names == std::vector<std::string>{"x", "y"});
  }

  SUBCASE("comments, blank lines, whitespace, scientific notation") {
    Dataset d = parse_dataset(
        "# generated\n"
        " x , y \n"
        "\n"
        "1.5e-3, -2E+2\n"
        "# trailing comment line\n"
        "  7 ,\t8\n");
    CHECK(d.variable_names == std::vector<std::string>{"x", "y"});
    REQUIRE(d.sample_count() == 2);
    CHECK(d.values(0, 0) == 1.5e-3);
    CHECK(d.values(0, 1) == -200.0);
    CHECK(d.values(1, 0) == 7.0);
    CHECK(d.values(1, 1) == 8.0);
  }

  SUBCASE("carriage returns are stripped") {
    Dataset d = parse_dataset("x,y\r\n1,2\r\n");
    CHECK(d.values(0, 1) == 2.0);
  }

  SUBCASE("missing trailing value reports row and column") {
    try {
      parse_dataset("x,y\n1.0,\n");
      FAIL("expected MissingValue");
    } catch (const MissingValue& e) {
      CHECK(e.line == 2);
      CHECK(e.column == 2);
    }
  }

  SUBCASE("short row reports the absent column") {
    try {
      parse_dataset("x,y,z\n1.0,2.0\n");
      FAIL("expected MissingValue");
    } catch (const MissingValue& e) {
      CHECK(e.line == 2);
      CHECK(e.column == 3);
    }
  }

  SUBCASE("malformed and non-finite numbers") {
    CHECK_THROWS_AS(parse_dataset("x\nfoo\n"), ParseError);
    CHECK_THROWS_AS(parse_dataset("x\n1.2.3\n"), ParseError);
    CHECK_THROWS_AS(parse_dataset("x\nnan\n"), NonFinite);
    CHECK_THROWS_AS(parse_dataset("x\ninf\n"), NonFinite);
    CHECK_THROWS_AS(parse_dataset("x\n-1e999\n"), NonFinite);
    try {
      parse_dataset("x,y\n1.0,nan\n");
      FAIL("expected NonFinite");
    } catch (const NonFinite& e) {
      CHECK(e.line == 2);
      CHECK(e.column == 2);
    }
  }

  SUBCASE("header problems") {
    CHECK_THROWS_AS(parse_dataset(""), ParseError);
    CHECK_THROWS_AS(parse_dataset("# only comments\n"), ParseError);
    CHECK_THROWS_AS(parse_dataset("x,2y\n"), ParseError);
    CHECK_THROWS_AS(parse_dataset("x,x\n1,2\n"), ParseError);
  }

  SUBCASE("overlong row") {
    try {
      parse_dataset("x\n1.0,2.0\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
}

TEST_CASE("dataset serialization round-trips bit-exactly") {
  CounterRng rng(RandomSeed{81}, kTestStream);
  Dataset d;
  d.variable_names = {"a", "b", "c"};
  d.values.resize(25, 3);
  for (int r = 0; r < 25; ++r) {
    for (int c = 0; c < 3; ++c) {
      // Scatter magnitudes across many binades.
      const int scale = static_cast<int>(rng.next_u64() % 61) - 30;
      d.values(r, c) = rng.normal() * std::pow(10.0, scale);
    }
  }
  d.values(0, 0) = 0.0;
  d.values(1, 1) = 0.1;
  d.values(2, 2) = 1.0 / 3.0;

  Dataset back = parse_dataset(write_dataset(d));
  CHECK(back.variable_names == d.variable_names);
  REQUIRE(back.values.rows() == d.values.rows());
  for (int r = 0; r < 25; ++r) {
    for (int c = 0; c < 3; ++c) {
      CHECK(back.values(r, c) == d.values(r, c));
    }
  }

  SUBCASE("files round-trip the same way") {
    TempDir tmp;
    write_text_file(tmp.file("d.csv"), write_dataset(d));
    Dataset from_file = ingest_dataset(tmp.file("d.csv"));
    CHECK(from_file.values(7, 1) == d.values(7, 1));
    CHECK(write_dataset(from_file) == write_dataset(d));
  }
}

TEST_CASE("dag text format") {
  SUBCASE("canonical writing") {
    DagStructure g =
        DagStructure::from_arcs({"alpha", "beta", "gamma"}, {{2, 0}, {0, 1}});
    CHECK(write_dag(g) ==
          "node alpha\nnode beta\nnode gamma\n"
          "alpha -> beta\ngamma -> alpha\n");
  }

  SUBCASE("round trip preserves structure and node order") {
    DagStructure g = DagStructure::from_arcs({"n1", "n2", "n3", "n4"},
                                             {{0, 3}, {1, 3}, {3, 2}});
    DagStructure back = parse_dag(write_dag(g));
    CHECK(back == g);
  }

  SUBCASE("nodes appear in first-mention order") {
    DagStructure g = parse_dag("b -> a\nnode c\n");
    CHECK(g.variable_names() == std::vector<std::string>{"b", "a", "c"});
    CHECK(g.has_arc(0, 1));
    CHECK(g.node_count() == 3);
  }

  SUBCASE("comments anywhere in a line") {
    DagStructure g = parse_dag(
        "# whole-line comment\n"
        "node a # trailing\n"
        "a -> b # arc comment\n");
    CHECK(g.node_count() == 2);
    CHECK(g.has_arc(0, 1));
  }

  SUBCASE("isolated nodes survive a round trip") {
    DagStructure g = parse_dag("node only\n");
    CHECK(g.node_count() == 1);
    CHECK(g.arcs().empty());
    CHECK(parse_dag(write_dag(g)) == g);
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(parse_dag("a -> b\na -> b\n"), ParseError);
    CHECK_THROWS_AS(parse_dag("what is this\n"), ParseError);
    CHECK_THROWS_AS(parse_dag("node 9bad\n"), ParseError);
    CHECK_THROWS_AS(parse_dag("a -> \n"), ParseError);
    CHECK_THROWS_AS(parse_dag("a -> b\nb -> a\n"), CycleDetected);
    CHECK_THROWS_AS(parse_dag("a -> a\n"), CycleDetected);
    try {
      parse_dag("node ok\nnot a line\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }

  SUBCASE("file round trip") {
    TempDir tmp;
    DagStructure g = DagStructure::from_arcs({"x", "y"}, {{0, 1}});
    write_text_file(tmp.file("g.dag"), write_dag(g));
    CHECK(read_dag_file(tmp.file("g.dag")) == g);
    CHECK_THROWS_AS(read_dag_file(tmp.file("absent.dag")), ParseError);
  }
}

TEST_CASE("matrix csv") {
  SUBCASE("symmetric parse") {
    SymMatrix m = parse_matrix_csv("2.0,0.5\n0.5,1.0\n");
    CHECK(m.order() == 2);
    CHECK(m(0, 1) == 0.5);
  }

  SUBCASE("tiny asymmetry is averaged away") {
    SymMatrix m = parse_matrix_csv("2.0,0.5000000000001\n0.5,1.0\n");
    CHECK(m(0, 1) == m(1, 0));
    CHECK(m(0, 1) == doctest::Approx(0.50000000000005).epsilon(1e-12));
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(parse_matrix_csv("2.0,0.51\n0.5,1.0\n"), Error);
    CHECK_THROWS_AS(parse_matrix_csv("1.0,2.0\n"), DimensionMismatch);
    CHECK_THROWS_AS(parse_matrix_csv(""), ParseError);
    CHECK_THROWS_AS(parse_matrix_csv("1.0,\n2.0,1.0\n"), MissingValue);
  }
}

TEST_CASE("prior configuration") {
  SUBCASE("defaults") {
    NormalWishartPrior p = default_prior(3);
    CHECK(p.alpha_mu == 1.0);
    CHECK(p.alpha == 5.0);
    CHECK(p.nu.isZero(0.0));
    CHECK(p.t == SymMatrix::identity(3));
    CHECK_THROWS_AS(default_prior(0), DimensionMismatch);

    NormalWishartPrior q = parse_prior_config("", 3);
    CHECK(q.alpha == p.alpha);
    CHECK(q.t == p.t);
  }

  SUBCASE("explicit keys") {
    NormalWishartPrior p = parse_prior_config(
        "# tuned\n"
        "alpha_mu = 2.5\n"
        "alpha = 7 # comment\n"
        "nu = 0.5, -1, 2\n"
        "T = scaled:2\n",
        3);
    CHECK(p.alpha_mu == 2.5);
    CHECK(p.alpha == 7.0);
    CHECK(p.nu(1) == -1.0);
    CHECK(p.t(0, 0) == 2.0);
    CHECK(p.t(0, 1) == 0.0);
  }

  SUBCASE("nu zeros and identity T spellings") {
    NormalWishartPrior p =
        parse_prior_config("nu = zeros\nT = identity\n", 2);
    CHECK(p.nu.isZero(0.0));
    CHECK(p.t == SymMatrix::identity(2));
  }

  SUBCASE("T from a relative file path") {
    TempDir tmp;
    write_text_file(tmp.file("t.csv"), "2.0,0.5\n0.5,1.0\n");
    NormalWishartPrior p =
        parse_prior_config("T = file:t.csv\n", 2, tmp.path.string());
    CHECK(p.t(0, 1) == 0.5);
  }

  SUBCASE("read_prior_file resolves siblings of the config") {
    TempDir tmp;
    write_text_file(tmp.file("t.csv"), "3.0,0.0\n0.0,3.0\n");
    write_text_file(tmp.file("prior.cfg"), "alpha = 6\nT = file:t.csv\n");
    NormalWishartPrior p = read_prior_file(tmp.file("prior.cfg"), 2);
    CHECK(p.alpha == 6.0);
    CHECK(p.t(1, 1) == 3.0);
  }

  SUBCASE("absolute file paths pass through") {
    TempDir tmp;
    write_text_file(tmp.file("t.csv"), "4.0\n");
    NormalWishartPrior p = parse_prior_config(
        "T = file:" + tmp.file("t.csv") + "\n", 1, "/nonexistent_base");
    CHECK(p.t(0, 0) == 4.0);
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(parse_prior_config("alpha\n", 2), ParseError);
    CHECK_THROWS_AS(parse_prior_config("width = 3\n", 2), ParseError);
    CHECK_THROWS_AS(parse_prior_config("alpha = 5\nalpha = 6\n", 2),
                    ParseError);
    CHECK_THROWS_AS(parse_prior_config("nu = 1,2,3\n", 2), DimensionMismatch);
    CHECK_THROWS_AS(parse_prior_config("T = scaled:-1\n", 2), ParseError);
    CHECK_THROWS_AS(parse_prior_config("T = banana\n", 2), ParseError);
    // alpha must exceed n - 1.
    CHECK_THROWS_AS(parse_prior_config("alpha = 1\n", 3),
                    InvalidDegreesOfFreedom);
    CHECK_THROWS_AS(parse_prior_config("alpha_mu = 0\n", 2), Error);

    TempDir tmp;
    write_text_file(tmp.file("t3.csv"), "1,0,0\n0,1,0\n0,0,1\n");
    CHECK_THROWS_AS(
        parse_prior_config("T = file:t3.csv\n", 2, tmp.path.string()),
        DimensionMismatch);
    CHECK_THROWS_AS(
        parse_prior_config("T = file:absent.csv\n", 2, tmp.path.string()),
        ParseError);
  }
}

TEST_CASE("text file helpers") {
  TempDir tmp;
  write_text_file(tmp.file("a.txt"), "payload\n");
  CHECK(read_text_file(tmp.file("a.txt")) == "payload\n");
  CHECK_THROWS_AS(read_text_file(tmp.file("missing.txt")), ParseError);
}
