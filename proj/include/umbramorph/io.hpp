#pragma once

// Netpbm graymaps (P2/P5, maxval <= 255), a small text format for
// structuring elements with gaps, requantisation and histograms.
//
// Structuring-element text format:
//
//   origin: <row> <col>        anchor position inside the grid, 0-based
//   1 2 X 0                    one grid row per line; X marks a gap
//
// '#' starts a comment that runs to the end of the line. Blank lines are
// ignored. A 1-D element is a single row.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "umbramorph/umbra.hpp"

namespace umbramorph {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class PgmEncoding { Ascii, Binary };

GridFunction parse_pgm(std::string_view bytes);
std::string format_pgm(const GridFunction& g, PgmEncoding enc = PgmEncoding::Binary);
GridFunction read_pgm(const std::filesystem::path& path);
void write_pgm(const GridFunction& g, const std::filesystem::path& path, PgmEncoding enc = PgmEncoding::Binary);

GridFunction parse_se(std::string_view text);
std::string format_se(const GridFunction& b);
GridFunction read_se(const std::filesystem::path& path);
void write_se(const GridFunction& b, const std::filesystem::path& path);

/// floor(v * (2^bits - 1) / l); the result's declared maximum is 2^bits - 1.
GridFunction requantize(const GridFunction& g, int bits);

/// Pixel counts per grey value 0..max(declared maximum, realised maximum).
std::vector<std::int64_t> histogram(const GridFunction& g);
std::string format_histogram_csv(const std::vector<std::int64_t>& counts);

/// Copy with values clamped to [0, l] and declared maximum l.
GridFunction clamp_to(const GridFunction& g, std::int64_t l);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace umbramorph
