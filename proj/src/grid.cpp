#include "vortexlab/grid.hpp"

#include "vortexlab/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

namespace vortexlab {

GridGeometry GridGeometry::over(const Domain& rectangle, int nx, int ny) {
  if (rectangle.kind() != Domain::Kind::Rectangle) {
    throw Error(ErrorCode::UnsupportedDomain, "grids cover rectangles only");
  }
  if (nx < 3 || ny < 3) throw Error(ErrorCode::BadParams, "grid needs at least 3x3 nodes");
  GridGeometry g;
  g.nx = nx;
  g.ny = ny;
  g.x0 = rectangle.xmin();
  g.y0 = rectangle.ymin();
  g.hx = (rectangle.xmax() - rectangle.xmin()) / (nx - 1);
  g.hy = (rectangle.ymax() - rectangle.ymin()) / (ny - 1);
  return g;
}

Eigen::ArrayXXd GridGeometry::weights() const {
  Eigen::ArrayXd cx = Eigen::ArrayXd::Constant(nx, hx), cy = Eigen::ArrayXd::Constant(ny, hy);
  cx(0) = cx(nx - 1) = 0.5 * hx;
  cy(0) = cy(ny - 1) = 0.5 * hy;
  return cx.matrix() * cy.matrix().transpose();
}

void require_same_geometry(const GridGeometry& a, const GridGeometry& b) {
  if (!(a == b)) throw Error(ErrorCode::GeometryMismatch, "grid geometries differ");
}

double integrate(const ScalarField& f) { return (f.geometry.weights() * f.values).sum(); }

double interpolate(const ScalarField& f, const Point& p) {
  const auto& g = f.geometry;
  const double s = std::clamp((p.x() - g.x0) / g.hx, 0.0, double(g.nx - 1));
  const double t = std::clamp((p.y() - g.y0) / g.hy, 0.0, double(g.ny - 1));
  const int i = std::min(static_cast<int>(s), g.nx - 2);
  const int j = std::min(static_cast<int>(t), g.ny - 2);
  const double a = s - i, b = t - j;
  return (1 - a) * (1 - b) * f.values(i, j) + a * (1 - b) * f.values(i + 1, j) +
         (1 - a) * b * f.values(i, j + 1) + a * b * f.values(i + 1, j + 1);
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw Error(ErrorCode::ParseError, "truncated grid file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void write_header(std::ostream& out, const char* magic, const GridGeometry& g) {
  out.write(magic, 7);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.nx));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.ny));
  put<double>(out, g.hx);
  put<double>(out, g.hy);
  put<double>(out, g.x0);
  put<double>(out, g.y0);
}

GridGeometry read_header(std::istream& in, const char* magic) {
  char buf[7];
  if (!in.read(buf, 7) || std::memcmp(buf, magic, 7) != 0) {
    throw Error(ErrorCode::ParseError, std::string("missing ") + magic + " magic");
  }
  GridGeometry g;
  g.nx = static_cast<int>(get<std::uint32_t>(in));
  g.ny = static_cast<int>(get<std::uint32_t>(in));
  g.hx = get<double>(in);
  g.hy = get<double>(in);
  g.x0 = get<double>(in);
  g.y0 = get<double>(in);
  if (g.nx < 1 || g.ny < 1 || !(g.hx > 0.0) || !(g.hy > 0.0)) {
    throw Error(ErrorCode::ParseError, "invalid grid header");
  }
  return g;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  fn(out);
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

template <typename Fn>
auto with_input(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path);
  return fn(in);
}

}  // namespace

void write_scalar_grid(std::ostream& out, const ScalarField& f) {
  write_header(out, "VLGRID1", f.geometry);
  for (Eigen::Index k = 0; k < f.values.size(); ++k) put<double>(out, f.values.data()[k]);
}

ScalarField read_scalar_grid(std::istream& in) {
  ScalarField f(read_header(in, "VLGRID1"));
  for (Eigen::Index k = 0; k < f.values.size(); ++k) f.values.data()[k] = get<double>(in);
  return f;
}

void write_complex_field(std::ostream& out, const ComplexField& f) {
  write_header(out, "VLCPLX1", f.geometry);
  for (Eigen::Index k = 0; k < f.values.size(); ++k) {
    put<double>(out, f.values.data()[k].real());
    put<double>(out, f.values.data()[k].imag());
  }
}

ComplexField read_complex_field(std::istream& in) {
  ComplexField f(read_header(in, "VLCPLX1"));
  for (Eigen::Index k = 0; k < f.values.size(); ++k) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    f.values.data()[k] = {re, im};
  }
  return f;
}

void write_scalar_grid(const std::string& path, const ScalarField& f) {
  with_output(path, [&](std::ostream& out) { write_scalar_grid(out, f); });
}
ScalarField read_scalar_grid(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_scalar_grid(in); });
}
void write_complex_field(const std::string& path, const ComplexField& f) {
  with_output(path, [&](std::ostream& out) { write_complex_field(out, f); });
}
ComplexField read_complex_field(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_complex_field(in); });
}

void write_scalar_csv(std::ostream& out, const ScalarField& f) {
  out << "x,y,value\n" << std::setprecision(17);
  const auto& g = f.geometry;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out << g.x(i) << ',' << g.y(j) << ',' << f.values(i, j) << '\n';
}

void write_complex_csv(std::ostream& out, const ComplexField& f) {
  out << "x,y,modulus,phase\n" << std::setprecision(17);
  const auto& g = f.geometry;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out << g.x(i) << ',' << g.y(j) << ',' << std::abs(f.values(i, j)) << ',' << std::arg(f.values(i, j)) << '\n';
}

}  // namespace vortexlab
