#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "fqs/io.hpp"
#include "helpers.hpp"

using namespace fqs;

TEST_CASE("snapshot roundtrip preserves every coefficient and the header") {
  std::mt19937_64 rng(83);
  for (const GridPtr& g : {make_grid(1, 32, kPi), make_grid(3, 16, 8.0)}) {
    const SpectralField f = fqs_test::random_band_limited(g, 5, rng);
    const std::string path = "snapshot_test.bin";
    save_snapshot(path, f, 1.75);
    const Snapshot snap = load_snapshot(path);
    CHECK(snap.alpha == 1.75);
    CHECK(snap.field.grid->dim == g->dim);
    CHECK(snap.field.grid->n == g->n);
    CHECK(snap.field.grid->half_width == g->half_width);
    CHECK(snap.field.coeffs == f.coeffs);
    std::remove(path.c_str());
  }
}

TEST_CASE("snapshot header layout is as documented") {
  const GridPtr g = make_grid(1, 16, 2.0);
  SpectralField f(g);
  f.coeffs[0] = {1.5, -2.5};
  save_snapshot("snapshot_layout.bin", f, 1.25);
  std::ifstream is("snapshot_layout.bin", std::ios::binary);
  std::uint32_t magic;
  std::int32_t dim, n;
  double half_width, alpha;
  is.read(reinterpret_cast<char*>(&magic), 4);
  is.read(reinterpret_cast<char*>(&dim), 4);
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&half_width), 8);
  is.read(reinterpret_cast<char*>(&alpha), 8);
  CHECK(magic == 0x46515331u);
  CHECK(dim == 1);
  CHECK(n == 16);
  CHECK(half_width == 2.0);
  CHECK(alpha == 1.25);
  // Ascending wavenumber order: the DC coefficient sits at sorted index n/2.
  std::vector<double> data(32);
  is.read(reinterpret_cast<char*>(data.data()), 32 * 8);
  CHECK(data[2 * 8] == 1.5);
  CHECK(data[2 * 8 + 1] == -2.5);
  std::remove("snapshot_layout.bin");
}

TEST_CASE("snapshot I/O errors carry the io kind") {
  CHECK_THROWS_AS(load_snapshot("definitely_missing_file.bin"), Error);
  try {
    load_snapshot("definitely_missing_file.bin");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("csv writer emits deterministic full-precision rows") {
  CsvWriter csv({"t", "value"});
  csv.row({1.0, 1.0 / 3.0});
  csv.row({2.0, 1e-17});
  const std::string expect =
      "t,value\n1,0.33333333333333331\n2,9.9999999999999998e-18\n";
  CHECK(csv.text() == expect);
  CHECK_THROWS_AS(csv.row({1.0}), Error);
}
