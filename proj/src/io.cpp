#include "umbramorph/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace umbramorph {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::string_view s) : s_(s) {}

  std::size_t pos() const { return pos_; }
  // Start of the most recent number token.
  std::size_t last() const { return last_; }

  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::int64_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = last_ = pos_;
    if (pos_ >= s_.size()) throw ParseError(std::string("pgm: truncated before ") + what, start);
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc() || v < 0) throw ParseError(std::string("pgm: bad ") + what, start);
    pos_ = static_cast<std::size_t>(end - s_.data());
    if (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '#')
      throw ParseError(std::string("pgm: bad ") + what, start);
    return v;
  }

  std::string_view rest() const { return s_.substr(pos_); }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t last_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits on whitespace, returning each token with its offset relative to `line`.
std::vector<std::pair<std::string_view, std::size_t>> tokens(std::string_view line) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start), start);
  }
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view tok) {
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size()) return std::nullopt;
  return v;
}

}  // namespace

GridFunction parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ParseError("pgm: expected magic P2 or P5", 0);
  const bool binary = bytes[1] == '5';
  PgmReader r(bytes);
  r.advance(2);
  if (r.rest().empty() || !(std::isspace(static_cast<unsigned char>(r.rest()[0])) || r.rest()[0] == '#'))
    throw ParseError("pgm: expected whitespace after magic", 2);
  const std::int64_t width = r.number("width");
  if (width <= 0) throw ParseError("pgm: empty image", r.last());
  const std::int64_t height = r.number("height");
  if (height <= 0) throw ParseError("pgm: empty image", r.last());
  const std::int64_t maxval = r.number("maxval");
  if (maxval <= 0 || maxval > 255) throw ParseError("pgm: maxval must be in 1..255", r.last());

  IntArray values({height, width}, {0, 0});
  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    if (r.rest().empty()) throw ParseError("pgm: truncated header", r.pos());
    r.advance(1);
    const std::size_t start = r.pos();
    const std::string_view raster = r.rest();
    if (static_cast<std::int64_t>(raster.size()) < values.size())
      throw ParseError("pgm: truncated raster, expected " + std::to_string(values.size()) + " bytes", bytes.size());
    for (std::int64_t i = 0; i < values.size(); ++i) {
      const auto v = static_cast<unsigned char>(raster[static_cast<std::size_t>(i)]);
      if (v > maxval) throw ParseError("pgm: sample exceeds maxval", start + static_cast<std::size_t>(i));
      values[i] = v;
    }
  } else {
    for (std::int64_t i = 0; i < values.size(); ++i) {
      r.skip_space_and_comments();
      const std::size_t at = r.pos();
      if (r.rest().empty()) throw ParseError("pgm: truncated raster", at);
      const std::int64_t v = r.number("sample");
      if (v > maxval) throw ParseError("pgm: sample exceeds maxval", at);
      values[i] = v;
    }
  }
  return GridFunction(std::move(values), maxval);
}

std::string format_pgm(const GridFunction& g, PgmEncoding enc) {
  if (g.rank() != 2) throw std::invalid_argument("pgm: image must be 2-D");
  if (!g.gap_free()) throw std::invalid_argument("pgm: image has gaps");
  if (g.declared_max() > 255) throw std::invalid_argument("pgm: maxval above 255");
  g.check_tonal_range();
  const auto& shape = g.values().shape();
  std::ostringstream os;
  os << (enc == PgmEncoding::Binary ? "P5" : "P2") << '\n' << shape[1] << ' ' << shape[0] << '\n' << g.declared_max() << '\n';
  const auto data = g.values().data();
  if (enc == PgmEncoding::Binary) {
    for (auto v : data) os.put(static_cast<char>(static_cast<unsigned char>(v)));
  } else {
    for (std::int64_t r = 0; r < shape[0]; ++r) {
      for (std::int64_t c = 0; c < shape[1]; ++c) os << (c ? " " : "") << data[static_cast<std::size_t>(r * shape[1] + c)];
      os << '\n';
    }
  }
  return os.str();
}

GridFunction read_pgm(const std::filesystem::path& path) { return parse_pgm(read_file(path)); }

void write_pgm(const GridFunction& g, const std::filesystem::path& path, PgmEncoding enc) {
  write_file(path, format_pgm(g, enc));
}

GridFunction parse_se(std::string_view text) {
  std::optional<std::pair<std::int64_t, std::int64_t>> origin;
  std::vector<std::vector<std::optional<std::int64_t>>> rows;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    if (!trim(line).empty()) {
      if (!origin) {
        const auto toks = tokens(line);
        if (toks.size() != 3 || toks[0].first != "origin:")
          throw ParseError("se: expected 'origin: <row> <col>'", line_start);
        const auto r = parse_int(toks[1].first);
        const auto c = parse_int(toks[2].first);
        if (!r || !c) throw ParseError("se: origin coordinates must be integers", line_start + toks[1].second);
        origin = {*r, *c};
      } else {
        std::vector<std::optional<std::int64_t>> row;
        for (const auto& [tok, off] : tokens(line)) {
          if (tok == "X") {
            row.emplace_back(std::nullopt);
            continue;
          }
          const auto v = parse_int(tok);
          if (!v || *v < 0) throw ParseError("se: token must be a non-negative integer or X", line_start + off);
          row.emplace_back(*v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
          throw ParseError("se: rows have different lengths", line_start);
        rows.push_back(std::move(row));
      }
    }
    line_start = line_end + 1;
  }
  if (!origin) throw ParseError("se: missing origin line", 0);
  if (rows.empty()) throw ParseError("se: no grid rows", text.size());

  const auto h = static_cast<std::int64_t>(rows.size());
  const auto w = static_cast<std::int64_t>(rows.front().size());
  const auto [orow, ocol] = *origin;
  if (orow < 0 || orow >= h || ocol < 0 || ocol >= w) throw ParseError("se: origin outside the grid", 0);

  IntArray values({h, w}, {-orow, -ocol});
  MaskArray defined({h, w}, {-orow, -ocol});
  std::int64_t vmax = 0;
  bool any = false;
  for (std::int64_t r = 0; r < h; ++r)
    for (std::int64_t c = 0; c < w; ++c) {
      const auto& cell = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (!cell) continue;
      values[r * w + c] = *cell;
      defined[r * w + c] = 1;
      vmax = std::max(vmax, *cell);
      any = true;
    }
  if (!any) throw ParseError("se: every entry is a gap", text.size());
  return GridFunction(std::move(values), std::move(defined), std::max<std::int64_t>(vmax, 1));
}

std::string format_se(const GridFunction& b) {
  if (b.rank() != 2) throw std::invalid_argument("se: structuring element must be 2-D");
  const Box box = b.box();
  if (!box[0].contains(0) || !box[1].contains(0)) throw std::invalid_argument("se: origin lies outside the grid");
  std::ostringstream os;
  os << "origin: " << -box[0].lo << ' ' << -box[1].lo << '\n';
  for (std::int64_t r = box[0].lo; r <= box[0].hi; ++r) {
    for (std::int64_t c = box[1].lo; c <= box[1].hi; ++c) {
      if (c != box[1].lo) os << ' ';
      const Index x{r, c};
      if (b.is_defined(x))
        os << b.at(x);
      else
        os << 'X';
    }
    os << '\n';
  }
  return os.str();
}

GridFunction read_se(const std::filesystem::path& path) { return parse_se(read_file(path)); }

void write_se(const GridFunction& b, const std::filesystem::path& path) { write_file(path, format_se(b)); }

GridFunction requantize(const GridFunction& g, int bits) {
  if (bits < 1 || bits > 8) throw std::invalid_argument("requantize: bits must be in 1..8");
  if (!g.gap_free()) throw std::invalid_argument("requantize: image has gaps");
  g.check_tonal_range();
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  const std::int64_t l = g.declared_max();
  IntArray v = g.values();
  for (auto& e : v.data()) e = e * top / l;
  return GridFunction(std::move(v), top);
}

std::vector<std::int64_t> histogram(const GridFunction& g) {
  if (!g.gap_free()) throw std::invalid_argument("histogram: image has gaps");
  if (g.min_value() < 0) throw std::invalid_argument("histogram: negative grey value");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(std::max(g.declared_max(), g.max_value()) + 1), 0);
  for (auto v : g.values().data()) ++counts[static_cast<std::size_t>(v)];
  return counts;
}

std::string format_histogram_csv(const std::vector<std::int64_t>& counts) {
  std::ostringstream os;
  os << "value,count\n";
  for (std::size_t v = 0; v < counts.size(); ++v) os << v << ',' << counts[v] << '\n';
  return os.str();
}

GridFunction clamp_to(const GridFunction& g, std::int64_t l) {
  IntArray v = g.values();
  for (auto& e : v.data()) e = std::clamp<std::int64_t>(e, 0, l);
  return GridFunction(std::move(v), g.defined(), l);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace umbramorph
