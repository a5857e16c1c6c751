#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mwshape/errors.hpp"
#include "mwshape/scenario.hpp"

using namespace mwshape;

TEST(Presets, AllTasksBuild) {
  for (const char* t : {"focus", "accelerate", "reflect", "stop", "split2", "split3"}) {
    for (auto r : {Resolution::search, Resolution::full}) {
      const auto s = task_preset(t, r);
      EXPECT_EQ(task_name(s.objective.task), t);
      EXPECT_EQ(s.free_parameters.size(), s.lower.size());
      EXPECT_EQ(s.free_parameters.size(), s.upper.size());
      EXPECT_NO_THROW(validate(s.potential));
      const auto guess = parameter_vector(s.potential, make_mask(s.potential, s.free_parameters));
      for (std::size_t i = 0; i < guess.size(); ++i) {
        EXPECT_GE(guess[i], s.lower[i]) << t << ' ' << s.free_parameters[i];
        EXPECT_LE(guess[i], s.upper[i]) << t << ' ' << s.free_parameters[i];
      }
    }
  }
  EXPECT_THROW(task_preset("juggle"), ContractError);
}

TEST(Presets, GridSelection) {
  const auto full = task_preset("focus");
  EXPECT_EQ(active_grid(full).n_points, 65536u);
  EXPECT_DOUBLE_EQ(active_grid(full).dt, 0.02);
  const auto search = task_preset("focus", Resolution::search);
  EXPECT_LT(active_grid(search).n_points, active_grid(full).n_points);
  EXPECT_EQ(parse_resolution("search"), Resolution::search);
  EXPECT_EQ(resolution_name(Resolution::full), "full");
  EXPECT_THROW(parse_resolution("medium"), ContractError);
}

TEST(Presets, SnapshotCadence) {
  auto s = task_preset("focus", Resolution::search);
  EXPECT_EQ(propagation_config(s).snapshot_every, 20u);
  s.snapshot_interval = 0.07;
  EXPECT_THROW(propagation_config(s), ContractError);
}

TEST(Presets, InitialStateMatchesPacket) {
  const auto s = task_preset("reflect", Resolution::search);
  const auto o = observables(initial_state(s), false);
  EXPECT_NEAR(o.norm, 1.0, 1e-12);
  EXPECT_NEAR(o.mean_p, 10.0, 1e-9);
  EXPECT_NEAR(o.width_dx, 3.0028, 1e-4);
}

TEST(Scenario, FocusSearchResolution) {
  const auto s = task_preset("focus", Resolution::search);
  const auto v = score(s, s.potential);
  EXPECT_NEAR(v.cost, 0.1079, 0.02 * 0.1079);
  // the lens is still on at the focus
  ASSERT_EQ(v.warnings.size(), 1u);
  EXPECT_NE(v.warnings[0].find("switches off"), std::string::npos);
}

TEST(Scenario, ProblemWrapsScore) {
  const auto s = task_preset("focus", Resolution::search);
  const auto p = make_problem(s, 17);
  EXPECT_EQ(p.budget, 17u);
  ASSERT_EQ(p.guess.size(), 3u);
  EXPECT_DOUBLE_EQ(p.guess[0], 97.73);
  EXPECT_EQ(p.objective(p.guess), score(s, s.potential).cost);
}

TEST(Scenario, FailuresBecomeInfinite) {
  auto s = task_preset("accelerate", Resolution::search);
  const auto p = make_problem(s, 10);
  auto x = p.guess;
  x[1] = 150.0;  // pulse centered at the window end
  EXPECT_EQ(p.objective(x), std::numeric_limits<double>::infinity());
  EXPECT_THROW(score(s, with_parameters(s.potential, x, make_mask(s.potential, s.free_parameters))),
               DomainError);
}

TEST(Scenario, MetricKinds) {
  EXPECT_FALSE(metric_is_raw(task_preset("focus")));
  EXPECT_FALSE(metric_is_raw(task_preset("reflect")));
  EXPECT_TRUE(metric_is_raw(task_preset("stop")));
  EXPECT_TRUE(metric_is_raw(task_preset("split3")));
}
