#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "steerbench/sim.hpp"

namespace steerbench {

// Multiplicative penalty applied once per recorded infraction event.
struct PenaltyTable {
  double collision_pedestrian = 0.50;
  double collision_vehicle = 0.60;
  double collision_static = 0.65;
  double red_light = 0.70;
  double stop_sign = 0.80;
  double route_deviation = 0.70;

  double factor(InfractionKind kind) const;
};

// 100 * completion * product of per-event penalty factors.
double driving_score(double completion,
                     const std::vector<InfractionEvent>& infractions,
                     const PenaltyTable& penalties = {});
double driving_score(const EpisodeResult& episode,
                     const PenaltyTable& penalties = {});

struct RouteScore {
  std::string route;
  int weight = 0;          // episode count backing the mean
  double mean_score = 0.0; // driving score averaged over the route's episodes
  double mean_completion = 0.0;
  double success_rate = 0.0;
  std::map<std::string, int> infraction_counts;  // by kind name
};

// Weighted mean of per-route scores, weights being the episode counts.
// Throws InvalidArgumentError when the list is empty or weights sum to zero.
double route_weighted_mean(const std::vector<RouteScore>& routes);
double route_weighted_mean(const std::vector<double>& scores,
                           const std::vector<int>& weights);

// Groups episodes by scenario name, preserving first-seen route order.
std::vector<RouteScore> aggregate_by_route(
    const std::vector<EpisodeResult>& episodes,
    const PenaltyTable& penalties = {});

// Plain-text table plus the weighted overall line.
std::string format_report(const std::vector<RouteScore>& routes);
// CSV: route,weight,mean_score,mean_completion,success_rate,<kind columns>.
void write_report_csv(std::ostream& out, const std::vector<RouteScore>& routes);

}  // namespace steerbench
