#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "steerbench/errors.hpp"
#include "steerbench/metrics.hpp"

namespace steerbench {
namespace {

InfractionEvent event(InfractionKind kind, double t = 0.0) {
  InfractionEvent e;
  e.kind = kind;
  e.t = t;
  return e;
}

EpisodeResult episode(const std::string& scenario, double completion,
                      bool success, std::vector<InfractionEvent> infractions) {
  EpisodeResult ep;
  ep.scenario = scenario;
  ep.completion = completion;
  ep.success = success;
  ep.infractions = std::move(infractions);
  return ep;
}

TEST(Penalties, FactorsMatchTheTable) {
  PenaltyTable table;
  EXPECT_DOUBLE_EQ(table.factor(InfractionKind::collision_pedestrian), 0.50);
  EXPECT_DOUBLE_EQ(table.factor(InfractionKind::collision_vehicle), 0.60);
  EXPECT_DOUBLE_EQ(table.factor(InfractionKind::collision_static), 0.65);
  EXPECT_DOUBLE_EQ(table.factor(InfractionKind::red_light), 0.70);
  EXPECT_DOUBLE_EQ(table.factor(InfractionKind::stop_sign), 0.80);
  EXPECT_DOUBLE_EQ(table.factor(InfractionKind::route_deviation), 0.70);
}

TEST(Score, AppliesOnePenaltyPerEvent) {
  std::vector<InfractionEvent> events{event(InfractionKind::red_light),
                                      event(InfractionKind::red_light),
                                      event(InfractionKind::collision_vehicle)};
  EXPECT_NEAR(driving_score(1.0, events), 100.0 * 0.7 * 0.7 * 0.6, 1e-12);
  EXPECT_NEAR(driving_score(0.5, {}), 50.0, 1e-12);
}

TEST(Score, ValidatesCompletionRange) {
  EXPECT_THROW(driving_score(-0.01, {}), InvalidArgumentError);
  EXPECT_THROW(driving_score(1.01, {}), InvalidArgumentError);
  EXPECT_NO_THROW(driving_score(0.0, {}));
  EXPECT_NO_THROW(driving_score(1.0, {}));
}

TEST(Score, EpisodeOverloadUsesItsFields) {
  EpisodeResult ep = episode("r", 0.8, false,
                             {event(InfractionKind::stop_sign)});
  EXPECT_NEAR(driving_score(ep), 100.0 * 0.8 * 0.8, 1e-12);
}

// Published per-route results for the two reference policies; the overall
// figures must reproduce from the per-route scores and episode counts alone.
TEST(WeightedMean, ReproducesThePublishedBenchmarkTable) {
  std::vector<int> weights{10, 5, 10, 10, 10, 10, 5, 5, 5, 5, 5};
  std::vector<double> hierarchical{100.00, 92.00, 88.00, 96.50, 86.33, 95.00,
                                   72.06,  100.00, 98.86, 100.00, 76.00};
  std::vector<double> end_to_end{96.00, 92.00, 88.00, 62.66, 68.91, 100.00,
                                 71.94, 100.00, 100.00, 76.86, 70.00};
  EXPECT_NEAR(route_weighted_mean(hierarchical, weights), 91.91, 0.01);
  EXPECT_NEAR(route_weighted_mean(end_to_end, weights), 83.87, 0.01);
}

TEST(WeightedMean, Validation) {
  EXPECT_THROW(route_weighted_mean({}, {}), InvalidArgumentError);
  EXPECT_THROW(route_weighted_mean({1.0}, {1, 2}), InvalidArgumentError);
  EXPECT_THROW(route_weighted_mean({1.0}, {-1}), InvalidArgumentError);
  EXPECT_THROW(route_weighted_mean({1.0, 2.0}, {0, 0}), InvalidArgumentError);
  EXPECT_DOUBLE_EQ(route_weighted_mean({50.0, 100.0}, {0, 2}), 100.0);
  EXPECT_THROW(route_weighted_mean(std::vector<RouteScore>{}),
               InvalidArgumentError);
}

TEST(Monotonicity, AddingAnInfractionNeverRaisesTheScore) {
  std::mt19937 rng(20240819);
  std::uniform_real_distribution<double> completion(0.0, 1.0);
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_int_distribution<int> kind(0, 5);
  PenaltyTable table;

  for (int it = 0; it < 1000; ++it) {
    double c = completion(rng);
    std::vector<InfractionEvent> events;
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
      events.push_back(event(static_cast<InfractionKind>(kind(rng))));
    }
    double base = driving_score(c, events, table);

    // Exact recomputability from the inputs, in the same fold order.
    double expected = 100.0 * c;
    for (const InfractionEvent& e : events) expected *= table.factor(e.kind);
    EXPECT_EQ(base, expected);

    std::vector<InfractionEvent> more = events;
    more.push_back(event(static_cast<InfractionKind>(kind(rng))));
    EXPECT_LE(driving_score(c, more, table), base);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 100.0);
  }
}

TEST(Aggregate, GroupsByScenarioInFirstSeenOrder) {
  std::vector<EpisodeResult> episodes{
      episode("alpha", 1.0, true, {}),
      episode("beta", 0.5, false, {event(InfractionKind::red_light)}),
      episode("alpha", 0.8, false,
              {event(InfractionKind::collision_vehicle),
               event(InfractionKind::red_light)}),
  };
  std::vector<RouteScore> routes = aggregate_by_route(episodes);
  ASSERT_EQ(routes.size(), 2u);
  EXPECT_EQ(routes[0].route, "alpha");
  EXPECT_EQ(routes[1].route, "beta");
  EXPECT_EQ(routes[0].weight, 2);
  EXPECT_EQ(routes[1].weight, 1);
  EXPECT_NEAR(routes[0].mean_score, (100.0 + 100.0 * 0.8 * 0.6 * 0.7) / 2.0,
              1e-12);
  EXPECT_NEAR(routes[0].mean_completion, 0.9, 1e-12);
  EXPECT_NEAR(routes[0].success_rate, 0.5, 1e-12);
  EXPECT_EQ(routes[0].infraction_counts.at("collision_vehicle"), 1);
  EXPECT_EQ(routes[0].infraction_counts.at("red_light"), 1);
  EXPECT_NEAR(routes[1].mean_score, 35.0, 1e-12);
}

TEST(Report, CarriesPerRouteRowsAndTheWeightedOverall) {
  std::vector<EpisodeResult> episodes{
      episode("alpha", 1.0, true, {}),
      episode("beta", 0.5, false, {}),
  };
  std::vector<RouteScore> routes = aggregate_by_route(episodes);
  std::string report = format_report(routes);
  EXPECT_NE(report.find("route"), std::string::npos);
  EXPECT_NE(report.find("alpha"), std::string::npos);
  EXPECT_NE(report.find("beta"), std::string::npos);
  EXPECT_NE(report.find("overall (weighted)"), std::string::npos);
  EXPECT_NE(report.find("75.00"), std::string::npos);  // (100 + 50) / 2

  EXPECT_EQ(format_report({}).find("overall"), std::string::npos);
}

TEST(Csv, HeaderAndZeroFilledCounts) {
  std::vector<EpisodeResult> episodes{
      episode("alpha", 1.0, false, {event(InfractionKind::stop_sign)}),
  };
  std::vector<RouteScore> routes = aggregate_by_route(episodes);
  std::ostringstream out;
  write_report_csv(out, routes);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header,
            "route,runs,mean_score,mean_completion,success_rate,"
            "collision_pedestrian,collision_vehicle,collision_static,"
            "red_light,stop_sign,route_deviation");
  EXPECT_EQ(row, "alpha,1,80.0000,1.0000,0.0000,0,0,0,0,1,0");
}

}  // namespace
}  // namespace steerbench
