#ifndef COALSIM_MATRIX_MARKET_HPP
#define COALSIM_MATRIX_MARKET_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "coalsim/sparse.hpp"

namespace coalsim {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Matrix Market coordinate reader: real/integer/pattern, general/symmetric.
// Indices converted to 0-based, symmetric entries expanded, pattern values
// set to 1.0, duplicates summed.
CooMatrix parse_matrix_market(std::istream& in);
CooMatrix load_matrix_market(const std::string& path);

void write_matrix_market(std::ostream& out, const CooMatrix& m);
void save_matrix_market(const std::string& path, const CooMatrix& m);

}  // namespace coalsim

#endif  // COALSIM_MATRIX_MARKET_HPP
