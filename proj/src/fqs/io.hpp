#ifndef FQS_IO_HPP
#define FQS_IO_HPP

#include <string>

#include "fqs/paraproduct.hpp"

namespace fqs {

// Field snapshot, little-endian:
//   u32 magic 'FQS1' (0x46515331), i32 dim, i32 n, f64 half_width, f64 alpha,
// then n^dim coefficient pairs (re, im) as f64, in row-major ascending
// wavenumber order (per-axis index s+N/2 for signed s, first axis slowest).
void save_snapshot(const std::string& path, const SpectralField& field, double alpha);

struct Snapshot {
  SpectralField field;
  double alpha = 0.0;
};
Snapshot load_snapshot(const std::string& path);

// Deterministic text writers (%.17g doubles, '\n' rows).
void write_text_file(const std::string& path, const std::string& content);
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  const std::string& text() const { return text_; }
  void save(const std::string& path) const { write_text_file(path, text_); }

 private:
  std::size_t cols_;
  std::string text_;
};

// Expanded-symbol disk cache keyed by (name, grid/shell hash, tolerance);
// stores the series terms in the snapshot byte conventions.
std::string symbol_cache_key(const BilinearSymbol& sym);
bool load_symbol_expansions(BilinearSymbol& sym, const std::string& dir);
void save_symbol_expansions(const BilinearSymbol& sym, const std::string& dir);

// expand_symbol with the disk cache in front.
BilinearSymbol expand_symbol_cached(const std::string& name, std::vector<SymbolPiece> pieces,
                                    const DyadicShellSet& shells, double tolerance, int max_terms,
                                    const std::string& cache_dir);

}  // namespace fqs

#endif
