#include "fqs/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace fqs {

namespace {

constexpr std::uint32_t kMagic = 0x46515331u;  // 'FQS1'

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

// FFT index <-> ascending-wavenumber index.
int to_sorted(int m, int n) { return m < n / 2 ? m + n / 2 : m - n / 2; }

std::size_t sorted_flat(const Grid& g, std::size_t fft_flat) {
  const int n = g.n;
  if (g.dim == 1) return static_cast<std::size_t>(to_sorted(static_cast<int>(fft_flat), n));
  const std::size_t nn = static_cast<std::size_t>(n);
  const int i0 = static_cast<int>(fft_flat / (nn * nn));
  const int i1 = static_cast<int>((fft_flat / nn) % nn);
  const int i2 = static_cast<int>(fft_flat % nn);
  return (static_cast<std::size_t>(to_sorted(i0, n)) * nn + to_sorted(i1, n)) * nn + to_sorted(i2, n);
}

}  // namespace

void save_snapshot(const std::string& path, const SpectralField& field, double alpha) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail_io("cannot open '" + path + "' for writing");
  const Grid& g = *field.grid;
  put<std::uint32_t>(os, kMagic);
  put<std::int32_t>(os, g.dim);
  put<std::int32_t>(os, g.n);
  put<double>(os, g.half_width);
  put<double>(os, alpha);
  std::vector<double> data(2 * field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const std::size_t s = sorted_flat(g, i);
    data[2 * s] = field.coeffs[i].real();
    data[2 * s + 1] = field.coeffs[i].imag();
  }
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!os) fail_io("short write to '" + path + "'");
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail_io("cannot open '" + path + "'");
  if (get<std::uint32_t>(is) != kMagic) fail_io("'" + path + "' is not a field snapshot");
  const int dim = get<std::int32_t>(is);
  const int n = get<std::int32_t>(is);
  const double half_width = get<double>(is);
  Snapshot snap;
  snap.alpha = get<double>(is);
  snap.field = SpectralField(make_grid(dim, n, half_width));
  const Grid& g = *snap.field.grid;
  std::vector<double> data(2 * snap.field.size());
  is.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!is) fail_io("truncated snapshot '" + path + "'");
  for (std::size_t i = 0; i < snap.field.size(); ++i) {
    const std::size_t s = sorted_flat(g, i);
    snap.field.coeffs[i] = cplx{data[2 * s], data[2 * s + 1]};
  }
  return snap;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail_io("cannot open '" + path + "' for writing");
  os << content;
  if (!os) fail_io("short write to '" + path + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : cols_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != cols_) fail_validation("csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
}

std::string symbol_cache_key(const BilinearSymbol& sym) {
  // FNV-1a over the grid/shell/tolerance identity.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  const Grid& g = *sym.grid;
  mix(&g.dim, sizeof g.dim);
  mix(&g.n, sizeof g.n);
  mix(&g.half_width, sizeof g.half_width);
  mix(&sym.shells.k_min, sizeof sym.shells.k_min);
  mix(&sym.shells.k_max, sizeof sym.shells.k_max);
  mix(&sym.tolerance, sizeof sym.tolerance);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-%016llx", sym.name.c_str(),
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {
constexpr std::uint32_t kSymMagic = 0x46515342u;  // 'FQSB'
}

void save_symbol_expansions(const BilinearSymbol& sym, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + symbol_cache_key(sym) + ".bin";
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail_io("cannot open '" + path + "' for writing");
  put<std::uint32_t>(os, kSymMagic);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(sym.expansions.size()));
  for (const auto& exp : sym.expansions) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(exp.terms.size()));
    put<double>(os, exp.tail);
    put<double>(os, exp.block_sup);
    for (const auto& t : exp.terms) {
      put<std::int32_t>(os, t.mod[0]);
      put<std::int32_t>(os, t.mod[1]);
      put<std::int32_t>(os, t.mod[2]);
      put<double>(os, t.magnitude);
      os.write(reinterpret_cast<const char*>(t.out_mult.data()),
               static_cast<std::streamsize>(t.out_mult.size() * sizeof(cplx)));
    }
  }
  put<std::uint32_t>(os, static_cast<std::uint32_t>(sym.blocks.size()));
  for (const auto& b : sym.blocks) {
    put<std::int32_t>(os, b.piece);
    put<std::int32_t>(os, b.j);
    put<std::int32_t>(os, b.k);
    put<std::int32_t>(os, b.terms);
    put<double>(os, b.tail);
  }
  put<double>(os, sym.truncation_bound);
  put<std::int32_t>(os, sym.total_terms);
  if (!os) fail_io("short write to '" + path + "'");
}

BilinearSymbol expand_symbol_cached(const std::string& name, std::vector<SymbolPiece> pieces,
                                    const DyadicShellSet& shells, double tolerance, int max_terms,
                                    const std::string& cache_dir) {
  BilinearSymbol probe;
  probe.name = name;
  probe.grid = shells.grid;
  probe.shells = shells;
  probe.tolerance = tolerance;
  probe.max_terms = max_terms;
  probe.pieces = pieces;
  if (load_symbol_expansions(probe, cache_dir)) return probe;
  BilinearSymbol sym = expand_symbol(name, std::move(pieces), shells, tolerance, max_terms);
  save_symbol_expansions(sym, cache_dir);
  return sym;
}

bool load_symbol_expansions(BilinearSymbol& sym, const std::string& dir) {
  const std::string path = dir + "/" + symbol_cache_key(sym) + ".bin";
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  if (get<std::uint32_t>(is) != kSymMagic) return false;
  const std::uint32_t np = get<std::uint32_t>(is);
  if (np != sym.pieces.size()) return false;
  const std::size_t gsize = sym.grid->size();
  sym.expansions.assign(np, PieceExpansion{});
  for (auto& exp : sym.expansions) {
    const std::uint32_t nt = get<std::uint32_t>(is);
    exp.tail = get<double>(is);
    exp.block_sup = get<double>(is);
    exp.terms.resize(nt);
    for (auto& t : exp.terms) {
      t.mod[0] = get<std::int32_t>(is);
      t.mod[1] = get<std::int32_t>(is);
      t.mod[2] = get<std::int32_t>(is);
      t.magnitude = get<double>(is);
      t.out_mult.resize(gsize);
      is.read(reinterpret_cast<char*>(t.out_mult.data()),
              static_cast<std::streamsize>(gsize * sizeof(cplx)));
    }
  }
  const std::uint32_t nb = get<std::uint32_t>(is);
  sym.blocks.assign(nb, BlockReport{});
  for (auto& b : sym.blocks) {
    b.piece = get<std::int32_t>(is);
    b.j = get<std::int32_t>(is);
    b.k = get<std::int32_t>(is);
    b.terms = get<std::int32_t>(is);
    b.tail = get<double>(is);
  }
  sym.truncation_bound = get<double>(is);
  sym.total_terms = get<std::int32_t>(is);
  return static_cast<bool>(is);
}

}  // namespace fqs
