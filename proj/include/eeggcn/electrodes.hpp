#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eeggcn {

struct Position3 {
  double x = 0.0;  // right
  double y = 0.0;  // nose
  double z = 0.0;  // vertex
};

double distance(const Position3& a, const Position3& b);

struct ElectrodeLayout {
  std::vector<std::string> names;
  std::vector<Position3> positions;

  std::size_t size() const { return names.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
};

// The 32 EEG channels in recording order, on the unit sphere. Positions are
// an idealised 10-10 placement: ring electrodes at 18/36 degree steps around
// the 72 degree polar circle, inner electrodes as normalised midpoints of
// their 10-20 neighbours.
const ElectrodeLayout& standard_layout();

// Mean of all pairwise Euclidean distances.
double mean_pairwise_distance(const ElectrodeLayout& layout);

// Throws ValidationError unless positions are unit-norm and distinct.
// expected_size == 0 skips the count check.
void validate_layout(const ElectrodeLayout& layout, std::size_t expected_size = 32);

}  // namespace eeggcn
