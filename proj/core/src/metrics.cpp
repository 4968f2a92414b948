#include "steerbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "steerbench/errors.hpp"

namespace steerbench {

double PenaltyTable::factor(InfractionKind kind) const {
  switch (kind) {
    case InfractionKind::collision_pedestrian: return collision_pedestrian;
    case InfractionKind::collision_vehicle: return collision_vehicle;
    case InfractionKind::collision_static: return collision_static;
    case InfractionKind::red_light: return red_light;
    case InfractionKind::stop_sign: return stop_sign;
    case InfractionKind::route_deviation: return route_deviation;
  }
  throw InvalidArgumentError("unknown infraction kind");
}

double driving_score(double completion,
                     const std::vector<InfractionEvent>& infractions,
                     const PenaltyTable& penalties) {
  if (completion < 0.0 || completion > 1.0) {
    throw InvalidArgumentError("completion must be within [0, 1]");
  }
  double score = 100.0 * completion;
  for (const InfractionEvent& e : infractions) score *= penalties.factor(e.kind);
  return score;
}

double driving_score(const EpisodeResult& episode, const PenaltyTable& penalties) {
  return driving_score(episode.completion, episode.infractions, penalties);
}

double route_weighted_mean(const std::vector<double>& scores,
                           const std::vector<int>& weights) {
  if (scores.size() != weights.size()) {
    throw InvalidArgumentError("scores and weights differ in length");
  }
  double num = 0.0;
  long total = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (weights[i] < 0) throw InvalidArgumentError("weights must be non-negative");
    num += scores[i] * weights[i];
    total += weights[i];
  }
  if (total == 0) throw InvalidArgumentError("no weighted routes to average");
  return num / static_cast<double>(total);
}

double route_weighted_mean(const std::vector<RouteScore>& routes) {
  std::vector<double> scores;
  std::vector<int> weights;
  for (const RouteScore& r : routes) {
    scores.push_back(r.mean_score);
    weights.push_back(r.weight);
  }
  return route_weighted_mean(scores, weights);
}

std::vector<RouteScore> aggregate_by_route(
    const std::vector<EpisodeResult>& episodes, const PenaltyTable& penalties) {
  std::vector<RouteScore> routes;
  std::map<std::string, std::size_t> index;
  for (const EpisodeResult& ep : episodes) {
    auto it = index.find(ep.scenario);
    if (it == index.end()) {
      it = index.emplace(ep.scenario, routes.size()).first;
      RouteScore r;
      r.route = ep.scenario;
      routes.push_back(r);
    }
    RouteScore& r = routes[it->second];
    r.weight += 1;
    r.mean_score += driving_score(ep, penalties);
    r.mean_completion += ep.completion;
    r.success_rate += ep.success ? 1.0 : 0.0;
    for (const InfractionEvent& e : ep.infractions) {
      r.infraction_counts[to_string(e.kind)] += 1;
    }
  }
  for (RouteScore& r : routes) {
    r.mean_score /= r.weight;
    r.mean_completion /= r.weight;
    r.success_rate /= r.weight;
  }
  return routes;
}

std::string format_report(const std::vector<RouteScore>& routes) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-32s %5s %8s %11s %9s\n", "route", "runs",
                "score", "completion", "success");
  out << buf;
  for (const RouteScore& r : routes) {
    std::snprintf(buf, sizeof(buf), "%-32s %5d %8.2f %11.3f %9.2f\n",
                  r.route.c_str(), r.weight, r.mean_score, r.mean_completion,
                  r.success_rate);
    out << buf;
  }
  if (!routes.empty()) {
    std::snprintf(buf, sizeof(buf), "%-32s %5s %8.2f\n", "overall (weighted)", "",
                  route_weighted_mean(routes));
    out << buf;
  }
  return out.str();
}

void write_report_csv(std::ostream& out, const std::vector<RouteScore>& routes) {
  std::vector<std::string> kinds;
  for (InfractionKind k : {InfractionKind::collision_pedestrian,
                           InfractionKind::collision_vehicle,
                           InfractionKind::collision_static,
                           InfractionKind::red_light, InfractionKind::stop_sign,
                           InfractionKind::route_deviation}) {
    kinds.push_back(to_string(k));
  }
  out << "route,runs,mean_score,mean_completion,success_rate";
  for (const std::string& k : kinds) out << "," << k;
  out << "\n";
  char buf[64];
  for (const RouteScore& r : routes) {
    out << r.route << "," << r.weight;
    std::snprintf(buf, sizeof(buf), ",%.4f,%.4f,%.4f", r.mean_score,
                  r.mean_completion, r.success_rate);
    out << buf;
    for (const std::string& k : kinds) {
      auto it = r.infraction_counts.find(k);
      out << "," << (it == r.infraction_counts.end() ? 0 : it->second);
    }
    out << "\n";
  }
}

}  // namespace steerbench
