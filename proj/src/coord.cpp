#include "vertframe/coord.hpp"

#include <stdexcept>

namespace vertframe {

namespace {

void check_index(int v, const char* what) {
  if (v < 1) throw std::invalid_argument(std::string(what) + " index must be >= 1");
}

}  // namespace

CoordName CoordName::base_x(int i) {
  check_index(i, "base");
  return {CoordKind::BaseX, i, 0, {}};
}

CoordName CoordName::fiber_y(int a) {
  check_index(a, "fiber");
  return {CoordKind::FiberY, a, 0, {}};
}

CoordName CoordName::frame_nn(int i, int j) {
  check_index(i, "frame");
  check_index(j, "frame");
  return {CoordKind::FrameNN, i, j, {}};
}

CoordName CoordName::frame_kk(int a, int b) {
  check_index(a, "frame");
  check_index(b, "frame");
  return {CoordKind::FrameKK, a, b, {}};
}

CoordName CoordName::frame_kn(int a, int i) {
  check_index(a, "frame");
  check_index(i, "frame");
  return {CoordKind::FrameKN, a, i, {}};
}

CoordName CoordName::mom_p(int i, int a) {
  check_index(i, "momentum");
  check_index(a, "momentum");
  return {CoordKind::MomP, i, a, {}};
}

CoordName CoordName::mom_scalar() {
  return {CoordKind::MomScalar, 0, 0, {}};
}

CoordName CoordName::parameter(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty parameter name");
  return {CoordKind::Param, 0, 0, std::move(name)};
}

std::string CoordName::str() const {
  switch (kind) {
    case CoordKind::BaseX:
      return "x" + std::to_string(i);
    case CoordKind::FiberY:
      return "y" + std::to_string(i);
    case CoordKind::FrameNN:
      return "pi_" + std::to_string(i) + "_" + std::to_string(j);
    case CoordKind::FrameKK:
      return "piA_" + std::to_string(i) + "_" + std::to_string(j);
    case CoordKind::FrameKN:
      return "piA_" + std::to_string(i) + "_x" + std::to_string(j);
    case CoordKind::MomP:
      return "p_" + std::to_string(i) + "_A" + std::to_string(j);
    case CoordKind::MomScalar:
      return "p";
    case CoordKind::Param:
      return param;
  }
  return "?";
}

int CoordSystem::index_of(const CoordName& c) const {
  for (size_t idx = 0; idx < coords.size(); ++idx)
    if (coords[idx] == c) return static_cast<int>(idx);
  return -1;
}

int CoordSystem::require(const CoordName& c) const {
  int idx = index_of(c);
  if (idx < 0) throw std::out_of_range("coordinate " + c.str() + " not in chart");
  return idx;
}

Chart make_chart(int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("chart dimensions must be >= 1");
  Chart chart;
  chart.n = n;
  chart.k = k;

  for (int i = 1; i <= n; ++i) chart.base.coords.push_back(CoordName::base_x(i));
  for (int a = 1; a <= k; ++a) chart.base.coords.push_back(CoordName::fiber_y(a));

  chart.z.coords = chart.base.coords;
  for (int i = 1; i <= n; ++i)
    for (int a = 1; a <= k; ++a) chart.z.coords.push_back(CoordName::mom_p(i, a));
  chart.z.coords.push_back(CoordName::mom_scalar());

  chart.lvy.coords = chart.base.coords;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) chart.lvy.coords.push_back(CoordName::frame_nn(i, j));
  for (int a = 1; a <= k; ++a)
    for (int b = 1; b <= k; ++b) chart.lvy.coords.push_back(CoordName::frame_kk(a, b));
  for (int a = 1; a <= k; ++a)
    for (int i = 1; i <= n; ++i) chart.lvy.coords.push_back(CoordName::frame_kn(a, i));

  return chart;
}

}  // namespace vertframe
