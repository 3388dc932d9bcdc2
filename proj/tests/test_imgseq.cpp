#include <doctest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "pelflow/image_io.hpp"
#include "support.hpp"

using namespace pelflow;
using testing::Gen;
using testing::TempDir;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  f << bytes;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string parse_error_of(const std::filesystem::path& p) {
  try {
    (void)load_pgm(p);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("imgseq") {

TEST_CASE("frame and sequence invariants") {
  CHECK_THROWS_AS(Frame(2, 2, std::vector<std::uint8_t>{1, 2, 3}), ParameterError);
  CHECK_THROWS_AS(Frame(0, 3), ParameterError);
  CHECK_THROWS_AS(Sequence({Frame(2, 2)}), ParameterError);
  CHECK_THROWS_AS(Sequence({Frame(2, 2), Frame(3, 2)}), ParameterError);
  const Sequence s({Frame(4, 3, 7), Frame(4, 3, 9)});
  CHECK(s.size() == 2);
  CHECK(s.width() == 4);
  CHECK(s.height() == 3);
  CHECK(s[1].at(3, 2) == 9);
}

TEST_CASE("2x2 P5 file loads byte for byte") {
  TempDir dir("pgm");
  write_bytes(dir / "a.pgm", std::string("P5\n2 2\n255\n") + std::string("\x00\x0a\x14\x1e", 4));
  const auto f = load_pgm(dir / "a.pgm");
  CHECK(f == Frame(2, 2, std::vector<std::uint8_t>{0, 10, 20, 30}));
  CHECK(f.at(1, 0) == 10);
  CHECK(f.at(0, 1) == 20);
}

TEST_CASE("QCIF-sized P5 with comment after the magic") {
  TempDir dir("pgm");
  std::string payload(176 * 144, '\x42');
  write_bytes(dir / "q.pgm", "P5\n# exported\n176 144\n255\n" + payload);
  const auto f = load_pgm(dir / "q.pgm");
  CHECK(f.width() == 176);
  CHECK(f.height() == 144);
  CHECK(f.at(175, 143) == 0x42);
}

TEST_CASE("PGM header errors name the offending field") {
  TempDir dir("pgm");
  write_bytes(dir / "p2.pgm", "P2\n2 2\n255\n0 1 2 3\n");
  CHECK(parse_error_of(dir / "p2.pgm").find("unsupported format 'P2'") != std::string::npos);
  write_bytes(dir / "mv.pgm", std::string("P5\n2 2\n65535\n") + std::string(8, '\0'));
  CHECK(parse_error_of(dir / "mv.pgm").find("maxval") != std::string::npos);
  write_bytes(dir / "w.pgm", "P5\nx 2\n255\n");
  CHECK(parse_error_of(dir / "w.pgm").find("width") != std::string::npos);
  write_bytes(dir / "h.pgm", "P5\n2\n");
  CHECK(parse_error_of(dir / "h.pgm").find("height") != std::string::npos);
  write_bytes(dir / "t.pgm", std::string("P5\n4 4\n255\n") + std::string(10, '\0'));
  CHECK(parse_error_of(dir / "t.pgm").find("truncated payload") != std::string::npos);
  write_bytes(dir / "z.pgm", "P5\n0 4\n255\n");
  CHECK(parse_error_of(dir / "z.pgm").find("width") != std::string::npos);
  write_bytes(dir / "junk.pgm", "hello");
  CHECK_THROWS_AS(load_pgm(dir / "junk.pgm"), ParseError);
  CHECK_THROWS_AS(load_pgm(dir / "missing.pgm"), IoError);
}

TEST_CASE("1x1 frame of 255 writes one payload byte") {
  TempDir dir("pgm");
  save_pgm(Frame(1, 1, 255), dir / "one.pgm");
  const auto bytes = read_bytes(dir / "one.pgm");
  CHECK(bytes == std::string("P5\n1 1\n255\n\xff", 12));
}

TEST_CASE("unwritable destination surfaces the path") {
  TempDir dir("pgm");
  const auto bad = dir / "no_such_dir" / "x.pgm";
  try {
    save_pgm(Frame(1, 1), bad);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("no_such_dir") != std::string::npos);
  }
  CHECK_THROWS_AS(save_flo(FlowField(1, 1), bad), IoError);
}

TEST_CASE("PGM round trip is bit exact over random frames") {
  TempDir dir("pgm");
  Gen gen(11);
  for (int i = 0; i < 120; ++i) {
    const auto f = gen.frame(gen.integer(1, 40), gen.integer(1, 40));
    const auto p = dir / "r.pgm";
    save_pgm(f, p);
    REQUIRE(load_pgm(p) == f);
  }
}

TEST_CASE(".flo layout of a 1x1 field") {
  TempDir dir("flo");
  save_flo(FlowField(1, 1, {2.0, 0.0}), dir / "a.flo");
  const auto bytes = read_bytes(dir / "a.flo");
  REQUIRE(bytes.size() == 20);
  CHECK(bytes.substr(0, 4) == "PIEH");
  auto u32 = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(bytes[off + b]);
    return v;
  };
  CHECK(u32(4) == 1);
  CHECK(u32(8) == 1);
  CHECK(std::bit_cast<float>(u32(12)) == 2.0f);
  CHECK(std::bit_cast<float>(u32(16)) == 0.0f);
}

TEST_CASE(".flo errors") {
  TempDir dir("flo");
  write_bytes(dir / "x.flo", std::string("XXXX") + std::string(16, '\0'));
  CHECK_THROWS_WITH_AS(load_flo(dir / "x.flo"), doctest::Contains("magic"), ParseError);
  save_flo(FlowField(3, 2), dir / "s.flo");
  auto bytes = read_bytes(dir / "s.flo");
  write_bytes(dir / "short.flo", bytes.substr(0, bytes.size() - 4));
  CHECK_THROWS_WITH_AS(load_flo(dir / "short.flo"), doctest::Contains("size mismatch"), ParseError);
  FlowField bad(1, 1, {std::nan(""), 0.0});
  CHECK_THROWS_AS(save_flo(bad, dir / "nan.flo"), ParameterError);
}

TEST_CASE(".flo round trip is float32 exact over random fields") {
  TempDir dir("flo");
  Gen gen(12);
  for (int i = 0; i < 120; ++i) {
    FlowField f(gen.integer(1, 30), gen.integer(1, 30));
    for (auto& v : f.dx()) v = static_cast<float>(gen.uniform(-20, 20));
    for (auto& v : f.dy()) v = gen.uniform(-20, 20);  // not representable: rounds once
    const auto p = dir / "r.flo";
    save_flo(f, p);
    const auto g = load_flo(p);
    REQUIRE(g.width() == f.width());
    REQUIRE(g.height() == f.height());
    for (std::size_t k = 0; k < f.size(); ++k) {
      REQUIRE(g.dx()[k] == f.dx()[k]);
      REQUIRE(g.dy()[k] == static_cast<double>(static_cast<float>(f.dy()[k])));
    }
  }
}

TEST_CASE("flow CSV dump") {
  TempDir dir("csv");
  FlowField f(2, 2);
  f.set(1, 0, {0.5, -1.25});
  save_flow_csv(f, dir / "f.csv");
  CHECK(read_bytes(dir / "f.csv") ==
        "x,y,dx,dy\n0,0,0.000000,0.000000\n1,0,0.500000,-1.250000\n0,1,0.000000,0.000000\n1,1,0.000000,0.000000\n");
}

TEST_CASE("load_sequence checks sizes") {
  TempDir dir("seq");
  save_pgm(Frame(3, 3), dir / "a.pgm");
  save_pgm(Frame(3, 3, 1), dir / "b.pgm");
  save_pgm(Frame(4, 3), dir / "c.pgm");
  CHECK(load_sequence({dir / "a.pgm", dir / "b.pgm"}).size() == 2);
  CHECK_THROWS_AS(load_sequence({dir / "a.pgm", dir / "c.pgm"}), ParameterError);
}

}  // TEST_SUITE
