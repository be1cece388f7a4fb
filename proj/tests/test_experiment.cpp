#include "doctest.h"

#include <cmath>

#include "support.hpp"
#include "vl/experiment.hpp"
#include "vl/tuner.hpp"

using namespace vl;

namespace {

Dataset small_plant_data() {
    const Eigen::MatrixXd u = generate_inputs({test::two_level(240, 4), test::two_level(240, 2)}, 8);
    auto plant = test::exponential_plant(15, 0.3);
    auto second = test::exponential_plant(15, 1.5).branches.front();
    second.input = 1;
    second.polynomial = {0.0, 0.0, 1.0};
    plant.branches.push_back(second);
    return test::make_dataset(u, simulate_plant(plant, u, 0).output);
}

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.trials = 25;
    c.degree_max = 3;
    c.memory = 15;
    c.seed = 5;
    return c;
}

bool same_table(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].trial != b[k].trial || a[k].resamples != b[k].resamples) return false;
        if (a[k].structure.degrees != b[k].structure.degrees) return false;
        if (a[k].structure.time_scales() != b[k].structure.time_scales()) return false;
        if (!(a[k].sse == b[k].sse || (std::isnan(a[k].sse) && std::isnan(b[k].sse)))) return false;
    }
    return true;
}

TrialRecord record(ExperimentMode mode, double sse) {
    TrialRecord r;
    r.mode = mode;
    r.sse = sse;
    return r;
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("config validation and mode names") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.degree_min = 3;
    c.degree_max = 2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.scale_min = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.memory = 3;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    CHECK(parse_mode("fixed") == ExperimentMode::Fixed);
    CHECK(to_string(ExperimentMode::Variable) == "variable");
    CHECK_THROWS_AS(parse_mode("both"), ConfigError);
}

TEST_CASE("forced single trial equals a direct fit") {
    const Eigen::MatrixXd u = generate_inputs({test::two_level(200, 3)}, 1);
    const auto plant = test::exponential_plant(20, 0.25);
    const Dataset d = test::make_dataset(u, simulate_plant(plant, u, 0).output);
    ExperimentConfig c;
    c.trials = 1;
    c.memory = 20;
    c.forced = UniformParameters{1, 2, 0.25};
    const auto table = run_experiment(c, ExperimentMode::Fixed, d);
    REQUIRE(table.size() == 1);
    const auto direct = fit(d, test::siso(20, {{2, 0.25}}), 20, 180);
    CHECK(table[0].sse == direct.fit_stats.sse);
    CHECK(table[0].resamples == 0);
}

TEST_CASE("same seed gives the same table; arms are independent") {
    const auto d = small_plant_data();
    const auto c = small_config();
    const auto fixed = run_experiment(c, ExperimentMode::Fixed, d);
    const auto variable = run_experiment(c, ExperimentMode::Variable, d);
    CHECK(same_table(fixed, run_experiment(c, ExperimentMode::Fixed, d)));
    CHECK(same_table(variable, run_experiment(c, ExperimentMode::Variable, d)));

    // Re-running one arm with more trials never perturbs the other's prefix.
    auto longer = c;
    longer.trials = 40;
    const auto more_variable = run_experiment(longer, ExperimentMode::Variable, d);
    CHECK(same_table(variable, {more_variable.begin(), more_variable.begin() + c.trials}));
    CHECK(same_table(fixed, run_experiment(c, ExperimentMode::Fixed, d)));

    auto other_seed = c;
    other_seed.seed = 6;
    CHECK_FALSE(same_table(fixed, run_experiment(other_seed, ExperimentMode::Fixed, d)));
}

TEST_CASE("sampling respects the configured domains") {
    const auto d = small_plant_data();
    auto c = small_config();
    c.trials = 60;
    c.degree_min = 2;
    c.degree_max = 3;
    c.order_min = 3;
    c.order_max = 4;
    c.scale_min = 0.1;
    c.scale_max = 0.4;
    for (auto mode : {ExperimentMode::Fixed, ExperimentMode::Variable}) {
        for (const auto& r : run_experiment(c, mode, d)) {
            CHECK(r.mode == mode);
            for (int i = 0; i < r.structure.num_inputs(); ++i) {
                CHECK(r.structure.degrees[i] >= 2);
                CHECK(r.structure.degrees[i] <= 3);
                for (const auto& s : r.structure.specs[i]) {
                    CHECK(s.order_count >= 3);
                    CHECK(s.order_count <= 4);
                    CHECK(s.time_scale >= 0.1);
                    CHECK(s.time_scale <= 0.4);
                }
            }
            CHECK(coefficient_count(r.structure) <= d.length() - c.memory);
        }
    }
}

TEST_CASE("fixed draws are uniform and expressible as variable structures") {
    const auto d = small_plant_data();
    const auto c = small_config();
    for (const auto& r : run_experiment(c, ExperimentMode::Fixed, d)) {
        const auto& s = r.structure;
        const auto& first = s.specs[0][0];
        for (int i = 0; i < s.num_inputs(); ++i) {
            CHECK(s.degrees[i] == s.degrees[0]);
            for (const auto& spec : s.specs[i]) CHECK(spec == first);
        }
        // Construct the same structure term by term as a variable draw would.
        ModelStructure v;
        v.memory_length = c.memory;
        v.input_names = d.input_names;
        v.output_name = d.output_name;
        for (int i = 0; i < d.num_inputs(); ++i) {
            v.degrees.push_back(s.degrees[0]);
            std::vector<LaguerreSeriesSpec> terms;
            for (int n = 1; n <= s.degrees[0]; ++n) terms.push_back({first.order_count, first.time_scale});
            v.specs.push_back(terms);
        }
        CHECK(objective(d, v, c.memory, d.length() - c.memory) == r.sse);
    }
}

TEST_CASE("infeasible draws are resampled and counted") {
    const auto d = small_plant_data();
    auto c = small_config();
    c.rows = 30;  // most high-degree draws exceed 30 coefficients
    c.degree_min = 1;
    c.degree_max = 5;
    c.order_min = 4;
    c.order_max = 4;
    int total = 0;
    for (const auto& r : run_experiment(c, ExperimentMode::Variable, d)) {
        CHECK(coefficient_count(r.structure) <= 30);
        total += r.resamples;
    }
    CHECK(total > 0);

    c.forced = UniformParameters{5, 4, 1.0};
    CHECK_THROWS_AS(run_experiment(c, ExperimentMode::Fixed, d), ConfigError);
    c.forced.reset();
    c.rows = 5000;
    CHECK_THROWS_AS(run_experiment(c, ExperimentMode::Fixed, d), ConfigError);
}

TEST_CASE("summarize arithmetic") {
    const auto single = summarize({record(ExperimentMode::Fixed, 4.0)});
    REQUIRE(single.arms.size() == 1);
    CHECK(single.arms[0].mean == 4.0);
    CHECK(single.arms[0].median == 4.0);
    CHECK(single.arms[0].std_dev == 0.0);
    CHECK(single.arms[0].normalized_mean == 1.0);

    std::vector<TrialRecord> table;
    for (double v : {1.0, 2.0, 3.0, 10.0}) table.push_back(record(ExperimentMode::Fixed, v));
    for (double v : {2.0, 4.0, 6.0}) table.push_back(record(ExperimentMode::Variable, v));
    table.push_back(record(ExperimentMode::Variable, INFINITY));
    const auto s = summarize(table, 3);
    CHECK(s.global_min == 1.0);
    CHECK(s.global_max == 10.0);
    REQUIRE(s.arms.size() == 2);
    const auto& fixed = s.arms[0];
    const auto& variable = s.arms[1];
    CHECK(fixed.mode == ExperimentMode::Fixed);
    CHECK(fixed.mean == 4.0);
    CHECK(fixed.median == 2.5);
    CHECK(fixed.std_dev == doctest::Approx(std::sqrt(50.0 / 3.0)));
    CHECK(variable.count == 3);  // the infinite SSE is excluded
    CHECK(variable.mean == 4.0);
    CHECK(variable.median == 4.0);
    CHECK(variable.std_dev == 2.0);
    CHECK(variable.normalized_mean == 4.0);
    CHECK(fixed.histogram.edges == std::vector<double>{1.0, 4.0, 7.0, 10.0});
    CHECK(fixed.histogram.counts == std::vector<int>{3, 0, 1});
    // 4.0 sits on the edge between bins 0 and 1 and lands in bin 1.
    CHECK(variable.histogram.counts == std::vector<int>{1, 2, 0});

    CHECK_THROWS_AS(summarize({}), InvalidParameter);
    CHECK_THROWS_AS(summarize({record(ExperimentMode::Fixed, NAN)}), InvalidParameter);
}

TEST_CASE("order sweep is exhaustive and matches direct objectives") {
    const auto d = small_plant_data();
    ModelStructure base;
    base.memory_length = 15;
    base.input_names = d.input_names;
    base.degrees = {1, 2};
    base.specs = {{{2, 0.3}}, {{2, 1.5}, {2, 1.5}}};
    const auto sweep = sweep_orders(d, base, {1, 2, 3}, 15, 225);
    REQUIRE(sweep.size() == 27);
    CHECK(sweep.front().orders == std::vector<int>{1, 1, 1});
    CHECK(sweep[1].orders == std::vector<int>{1, 1, 2});
    CHECK(sweep.back().orders == std::vector<int>{3, 3, 3});
    for (const auto& entry : sweep) {
        auto s = base;
        s.specs[0][0].order_count = entry.orders[0];
        s.specs[1][0].order_count = entry.orders[1];
        s.specs[1][1].order_count = entry.orders[2];
        CHECK(entry.sse == objective(d, s, 15, 225));
    }
    CHECK(std::isinf(sweep_orders(d, base, {16}, 15, 225).front().sse));
    CHECK_THROWS_AS(sweep_orders(d, base, {1, 2, 3}, 15, 225, 0.0, 0.0, 26), InvalidParameter);
    CHECK_THROWS_AS(sweep_orders(d, base, {}, 15, 225), InvalidParameter);
}

} // TEST_SUITE
