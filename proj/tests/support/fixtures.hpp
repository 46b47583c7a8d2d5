#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tta/association.hpp"
#include "tta/config.hpp"
#include "tta/scenario.hpp"

namespace tta::testing {

/// Distances of camera tracks T21..T24 to (T11, T12) in the worked example.
inline constexpr std::array<std::array<double, 2>, 4> kWorkedExamplePairs{{
    {4.31, 20.61},
    {17.22, 2.92},
    {8.97, 23.60},
    {11.38, 25.18},
}};

/// Six single-entry histories (V2V ids 1, 2 then camera ids 1..4) with
/// P = I/2, so each pairwise Mahalanobis distance is the Euclidean distance
/// between the states. V2V tracks sit 18 m apart and each camera track is
/// placed by trilateration to hit the kWorkedExamplePairs distances.
std::vector<TrackHistory> worked_example_histories();

/// Two V2V vehicles driving side by side 2 m apart, ahead of the host. In a
/// few 0.5 s bursts the camera reports each of them on the other's side of
/// their midpoint. Occlusion is disabled so only the geometry matters.
scenario::Simulation crossing_simulation(std::uint64_t seed);

/// Pipeline settings for the crossing fixture with buffer length n.
RunConfig crossing_config(std::size_t n);

}  // namespace tta::testing
