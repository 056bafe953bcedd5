#include "eeggcn/electrodes.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "eeggcn/error.hpp"

namespace eeggcn {
namespace {

Position3 spherical(double polar_deg, double azimuth_deg) {
  const double t = polar_deg * std::numbers::pi / 180.0;
  const double a = azimuth_deg * std::numbers::pi / 180.0;
  // azimuth counts from the nose towards the left ear
  return {-std::sin(t) * std::sin(a), std::sin(t) * std::cos(a), std::cos(t)};
}

Position3 midpoint(const Position3& a, const Position3& b) {
  Position3 m{a.x + b.x, a.y + b.y, a.z + b.z};
  const double n = std::sqrt(m.x * m.x + m.y * m.y + m.z * m.z);
  return {m.x / n, m.y / n, m.z / n};
}

ElectrodeLayout build_standard_layout() {
  std::map<std::string, Position3> p;
  p["Fz"] = spherical(36, 0);
  p["Cz"] = spherical(0, 0);
  p["Pz"] = spherical(36, 180);
  p["Oz"] = spherical(72, 180);
  p["Fp1"] = spherical(72, 18);
  p["F7"] = spherical(72, 54);
  p["T7"] = spherical(72, 90);
  p["P7"] = spherical(72, 126);
  p["O1"] = spherical(72, 162);
  p["Fp2"] = spherical(72, -18);
  p["F8"] = spherical(72, -54);
  p["T8"] = spherical(72, -90);
  p["P8"] = spherical(72, -126);
  p["O2"] = spherical(72, -162);
  p["C3"] = spherical(36, 90);
  p["C4"] = spherical(36, -90);
  p["F3"] = midpoint(p["Fz"], p["F7"]);
  p["F4"] = midpoint(p["Fz"], p["F8"]);
  p["P3"] = midpoint(p["Pz"], p["P7"]);
  p["P4"] = midpoint(p["Pz"], p["P8"]);
  p["AF3"] = midpoint(p["Fp1"], p["F3"]);
  p["AF4"] = midpoint(p["Fp2"], p["F4"]);
  p["PO3"] = midpoint(p["P3"], p["O1"]);
  p["PO4"] = midpoint(p["P4"], p["O2"]);

  const auto fcz = midpoint(p["Fz"], p["Cz"]);
  const auto cpz = midpoint(p["Cz"], p["Pz"]);
  const auto fc3 = midpoint(p["F3"], p["C3"]);
  const auto fc4 = midpoint(p["F4"], p["C4"]);
  const auto cp3 = midpoint(p["P3"], p["C3"]);
  const auto cp4 = midpoint(p["P4"], p["C4"]);
  const auto ft7 = midpoint(p["F7"], p["T7"]);
  const auto ft8 = midpoint(p["F8"], p["T8"]);
  const auto tp7 = midpoint(p["P7"], p["T7"]);
  const auto tp8 = midpoint(p["P8"], p["T8"]);
  p["FC1"] = midpoint(fcz, fc3);
  p["FC2"] = midpoint(fcz, fc4);
  p["FC5"] = midpoint(fc3, ft7);
  p["FC6"] = midpoint(fc4, ft8);
  p["CP1"] = midpoint(cpz, cp3);
  p["CP2"] = midpoint(cpz, cp4);
  p["CP5"] = midpoint(cp3, tp7);
  p["CP6"] = midpoint(cp4, tp8);

  ElectrodeLayout layout;
  layout.names = {"Fp1", "AF3", "F3", "F7", "FC5", "FC1", "C3", "T7", "CP5", "CP1", "P3",
                  "P7",  "PO3", "O1", "Oz", "Pz",  "Fp2", "AF4", "Fz", "F4",  "F8",  "FC6",
                  "FC2", "Cz",  "C4", "T8", "CP6", "CP2", "P4",  "P8", "PO4", "O2"};
  for (const auto& name : layout.names) layout.positions.push_back(p.at(name));
  return layout;
}

}  // namespace

double distance(const Position3& a, const Position3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::optional<std::size_t> ElectrodeLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

const ElectrodeLayout& standard_layout() {
  static const ElectrodeLayout layout = build_standard_layout();
  return layout;
}

double mean_pairwise_distance(const ElectrodeLayout& layout) {
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    for (std::size_t j = i + 1; j < layout.size(); ++j) {
      sum += distance(layout.positions[i], layout.positions[j]);
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

void validate_layout(const ElectrodeLayout& layout, std::size_t expected_size) {
  if (layout.names.size() != layout.positions.size())
    throw ValidationError("electrode layout has mismatched name and position counts");
  if (expected_size != 0 && layout.names.size() != expected_size)
    throw ValidationError("electrode layout must have exactly " + std::to_string(expected_size) +
                          " entries");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& q = layout.positions[i];
    const double norm = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    if (std::abs(norm - 1.0) > 1e-6)
      throw ValidationError("electrode " + layout.names[i] + " is not on the unit sphere");
    for (std::size_t j = i + 1; j < layout.size(); ++j) {
      if (distance(q, layout.positions[j]) == 0.0)
        throw ValidationError("electrodes " + layout.names[i] + " and " + layout.names[j] +
                              " share a position");
    }
  }
}

}  // namespace eeggcn
