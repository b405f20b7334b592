#include "coalsim/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace coalsim {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

CooMatrix parse_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty input", 1);
  ++lineno;

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix")
    throw ParseError("malformed MatrixMarket banner", lineno);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format != "coordinate")
    throw ParseError("unsupported format '" + format + "' (coordinate only)", lineno);
  bool pattern = field == "pattern";
  if (field != "real" && field != "integer" && !pattern)
    throw ParseError("unsupported field '" + field + "'", lineno);
  bool symmetric = symmetry == "symmetric";
  if (symmetry != "general" && !symmetric)
    throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);

  // Skip comments and blank lines up to the size line.
  std::uint64_t rows = 0, cols = 0, nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) throw ParseError("missing size line", lineno + 1);
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> nnz))
      throw ParseError("malformed size line", lineno);
    break;
  }

  CooMatrix m;
  m.rows = static_cast<index_t>(rows);
  m.cols = static_cast<index_t>(cols);
  m.entries.reserve(symmetric ? 2 * nnz : nnz);

  std::uint64_t seen = 0;
  while (seen < nnz) {
    if (!std::getline(in, line))
      throw ParseError("unexpected end of file: expected " + std::to_string(nnz) +
                           " entries, got " + std::to_string(seen),
                       lineno + 1);
    ++lineno;
    if (line.empty() || line[0] == '%') continue;

    std::istringstream es(line);
    std::int64_t r = 0, c = 0;
    double v = 1.0;
    if (!(es >> r >> c)) throw ParseError("malformed entry", lineno);
    if (!pattern && !(es >> v)) throw ParseError("entry missing value", lineno);
    if (r < 1 || static_cast<std::uint64_t>(r) > rows ||
        c < 1 || static_cast<std::uint64_t>(c) > cols)
      throw ParseError("index out of declared bounds", lineno);

    index_t ri = static_cast<index_t>(r - 1);
    index_t ci = static_cast<index_t>(c - 1);
    m.entries.push_back({ri, ci, v});
    if (symmetric && ri != ci) m.entries.push_back({ci, ri, v});
    ++seen;
  }

  coo_canonicalize(m);
  return m;
}

CooMatrix load_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return parse_matrix_market(f);
}

void write_matrix_market(std::ostream& out, const CooMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows << " " << m.cols << " " << m.entries.size() << "\n";
  out.precision(17);
  for (const CooEntry& e : m.entries)
    out << e.row + 1 << " " << e.col + 1 << " " << e.value << "\n";
}

void save_matrix_market(const std::string& path, const CooMatrix& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_matrix_market(f, m);
}

}  // namespace coalsim
