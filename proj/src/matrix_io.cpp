#include "growthbound/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace growthbound {

ScalarMode mode_of(const AnyMatrix& m) {
  return std::visit(
      [](const auto& mat) { return ScalarTraits<typename std::decay_t<decltype(mat)>::value_type>::kMode; },
      m);
}

namespace {

double parse_double(std::string_view token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw std::invalid_argument("malformed binary64 entry: " + std::string(token));
  return v;
}

std::pair<std::string_view, std::string_view> split_complex(std::string_view token) {
  const auto comma = token.find(',');
  if (comma == std::string_view::npos)
    throw std::invalid_argument("complex entry must be written re,im: " + std::string(token));
  return {token.substr(0, comma), token.substr(comma + 1)};
}

template <class T>
Matrix<T> read_entries(std::istream& in, std::size_t rows, std::size_t cols) {
  std::vector<T> data;
  data.reserve(rows * cols);
  std::string token;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    if (!(in >> token)) throw std::invalid_argument("matrix file ended early");
    if constexpr (std::is_same_v<T, Rational>) {
      data.push_back(parse_rational(token));
    } else if constexpr (std::is_same_v<T, RationalComplex>) {
      auto [re, im] = split_complex(token);
      data.emplace_back(parse_rational(re), parse_rational(im));
    } else if constexpr (std::is_same_v<T, double>) {
      data.push_back(parse_double(token));
    } else {
      auto [re, im] = split_complex(token);
      data.emplace_back(parse_double(re), parse_double(im));
    }
  }
  if (in >> token) throw std::invalid_argument("trailing data after matrix entries");
  return Matrix<T>(rows, cols, std::move(data));
}

}  // namespace

AnyMatrix read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("missing matrix header");
  std::istringstream hs(header);
  long rows = 0;
  long cols = 0;
  std::string mode;
  if (!(hs >> rows >> cols >> mode) || rows <= 0 || cols <= 0)
    throw std::invalid_argument("matrix header must be 'rows cols mode' with positive sizes");
  const auto r = static_cast<std::size_t>(rows);
  const auto c = static_cast<std::size_t>(cols);
  switch (parse_scalar_mode(mode)) {
    case ScalarMode::RationalReal: return read_entries<Rational>(in, r, c);
    case ScalarMode::RationalComplex: return read_entries<RationalComplex>(in, r, c);
    case ScalarMode::Binary64Real: return read_entries<double>(in, r, c);
    case ScalarMode::Binary64Complex: return read_entries<std::complex<double>>(in, r, c);
  }
  throw std::logic_error("unreachable");
}

AnyMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const AnyMatrix& any) {
  std::visit(
      [&out](const auto& m) {
        using T = typename std::decay_t<decltype(m)>::value_type;
        out << m.rows() << ' ' << m.cols() << ' ' << to_string(ScalarTraits<T>::kMode) << '\n';
        const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
        for (std::size_t i = 0; i < m.rows(); ++i) {
          for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            if constexpr (std::is_same_v<T, std::complex<double>>) {
              out << m(i, j).real() << ',' << m(i, j).imag();
            } else {
              out << m(i, j);
            }
          }
          out << '\n';
        }
        out.precision(old_precision);
      },
      any);
}

}  // namespace growthbound
