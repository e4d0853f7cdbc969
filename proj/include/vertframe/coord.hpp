#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace vertframe {

// Coordinate families across the three charts the engine works in:
//   base manifold      x^i, y^A
//   frame bundle       pi^i_j, pi^A_B, pi^A_i   (coframe components)
//   multimomentum      p^i_A, p
// Params are free named constants treated as independent symbols.
enum class CoordKind : std::uint8_t {
  BaseX,      // x^i
  FiberY,     // y^A
  FrameNN,    // pi^i_j   = e^i(d/dx^j)
  FrameKK,    // pi^A_B   = eps^A(d/dy^B)
  FrameKN,    // pi^A_i   = eps^A(d/dx^i)
  MomP,       // p^i_A
  MomScalar,  // p
  Param,
};

struct CoordName {
  CoordKind kind = CoordKind::Param;
  int i = 0;          // 1-based first index
  int j = 0;          // 1-based second index where applicable
  std::string param;  // Param spelling only

  static CoordName base_x(int i);
  static CoordName fiber_y(int a);
  static CoordName frame_nn(int i, int j);
  static CoordName frame_kk(int a, int b);
  static CoordName frame_kn(int a, int i);
  static CoordName mom_p(int i, int a);
  static CoordName mom_scalar();
  static CoordName parameter(std::string name);

  // Grammar spelling: x1, y2, pi_1_2, piA_1_2, piA_1_x2, p_1_A2, p, <param>.
  std::string str() const;

  // Kind-major total order; fixes canonical monomial ordering everywhere.
  friend std::strong_ordering operator<=>(const CoordName&, const CoordName&) = default;
  friend bool operator==(const CoordName&, const CoordName&) = default;
};

struct CoordSystem {
  std::vector<CoordName> coords;

  int dim() const { return static_cast<int>(coords.size()); }
  int index_of(const CoordName& c) const;  // -1 when absent
  int require(const CoordName& c) const;   // throws std::out_of_range when absent
  const CoordName& at(int idx) const { return coords.at(static_cast<size_t>(idx)); }
};

// Fixed coordinate layouts for dimensions (n, k):
//   base: x^1..x^n, y^1..y^k
//   z:    x, y, p^i_A (i-major), p
//   lvy:  x, y, pi^i_j (row-major), pi^A_B (row-major), pi^A_i (row-major)
struct Chart {
  int n = 1;
  int k = 1;
  CoordSystem base;
  CoordSystem z;
  CoordSystem lvy;
};

Chart make_chart(int n, int k);

}  // namespace vertframe
