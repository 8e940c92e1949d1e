#include "rlex/online.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace rlex;

namespace {

PolicyParams const_policy(double value) {
  VectorXd theta(1);
  theta << value;
  return make_policy(Architecture::constant(1, 1), theta);
}

Observation obs_at(int k, double state, double action) {
  Observation o;
  o.k = k;
  o.state = VectorXd::Constant(1, state);
  o.action = VectorXd::Constant(1, action);
  return o;
}

ObservationLog log_from(const std::vector<Observation>& records) {
  ObservationLog log;
  log.records = records;
  log.validate();
  return log;
}

}  // namespace

TEST_CASE("filter initialization shortlists everything") {
  const FilterState fs = init_filter(3, 0.04);
  CHECK(fs.shortlisted_count() == 3);
  CHECK(fs.discarded_indices().empty());
  CHECK(fs.psi == 0.04);

  CHECK_THROWS_AS(init_filter(0, 0.04), std::invalid_argument);
  CHECK_THROWS_AS(init_filter(3, 0.0), std::invalid_argument);

  // The two experiment thresholds load as given.
  CHECK(init_filter(5, 0.04).psi == 0.04);
  CHECK(init_filter(5, 0.55).psi == 0.55);
}

TEST_CASE("discard is strict: error exactly psi is retained") {
  const double psi = 0.04;
  std::vector<PolicyParams> candidates = {const_policy(0.0), const_policy(psi),
                                          const_policy(std::nextafter(psi, 1.0)),
                                          const_policy(2.0 * psi)};
  FilterState fs = init_filter(candidates.size(), psi);
  observe(fs, candidates, obs_at(0, 0.3, 0.0));  // victim action 0

  CHECK_FALSE(fs.discarded[0]);  // error 0
  CHECK_FALSE(fs.discarded[1]);  // error exactly psi
  CHECK(fs.discarded[2]);        // error just above psi
  CHECK(fs.discarded[3]);
  CHECK(fs.violation_at[2] == 0);
  CHECK(fs.max_error[1] == psi);
}

TEST_CASE("a candidate equal to the victim is never discarded") {
  // The victim is a small ReLU net; candidate 0 is an exact copy.
  const Architecture arch = Architecture::net(1, {2, 1});
  RngStream rng(5);
  VectorXd theta(arch.param_count());
  for (int i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-1.0, 1.0);
  const PolicyParams victim = make_policy(arch, theta);
  VectorXd other = theta;
  other[0] += 0.5;
  std::vector<PolicyParams> candidates = {victim, make_policy(arch, other)};

  FilterState fs = init_filter(candidates.size(), 1e-9);
  for (int k = 0; k < 50; ++k) {
    Observation o;
    o.k = k;
    o.state = VectorXd::Constant(1, rng.uniform(-2.0, 2.0));
    o.action = evaluate(victim, o.state);
    observe(fs, candidates, o);
  }
  CHECK_FALSE(fs.discarded[0]);
  CHECK(fs.max_error[0] == 0.0);
}

TEST_CASE("a known pointwise gap triggers discard exactly when observed") {
  // Victim: relu(s); candidate: relu(-s). Gap |s|, so only |s| > psi kills.
  const Architecture arch = Architecture::net(1, {1, 1});
  VectorXd tv(4), tc(4);
  tv << 1.0, 0.0, 1.0, 0.0;   // relu(s)
  tc << -1.0, 0.0, 1.0, 0.0;  // relu(-s)
  const PolicyParams victim = make_policy(arch, tv);
  std::vector<PolicyParams> candidates = {make_policy(arch, tc)};

  const double psi = 0.1;
  FilterState fs = init_filter(1, psi);
  auto observe_state = [&](int k, double s) {
    Observation o;
    o.k = k;
    o.state = VectorXd::Constant(1, s);
    o.action = evaluate(victim, o.state);
    observe(fs, candidates, o);
  };

  observe_state(0, 0.05);   // gap 0.05 <= psi
  observe_state(1, -0.08);  // gap 0.08 <= psi
  CHECK(fs.shortlisted_count() == 1);
  observe_state(2, 0.2);  // gap 0.2 > psi
  CHECK(fs.shortlisted_count() == 0);
  CHECK(fs.violation_at[0] == 2);
}

TEST_CASE("empty log keeps q equal to the candidate count") {
  std::vector<PolicyParams> candidates = {const_policy(0.0), const_policy(1.0)};
  FilterState fs = init_filter(2, 0.5);
  const ObservationLog log;
  CHECK(run_filter(fs, candidates, log) == 2);
}

TEST_CASE("log validation") {
  ObservationLog log;
  log.records = {obs_at(0, 0.0, 0.0), obs_at(0, 1.0, 0.0)};  // duplicate k
  CHECK_THROWS_AS(log.validate(), InvariantViolation);
}

TEST_CASE("final partition is order-insensitive") {
  RngStream rng(11);
  std::vector<PolicyParams> candidates;
  for (int i = 0; i < 30; ++i) candidates.push_back(const_policy(rng.uniform(-1.0, 1.0)));

  std::vector<Observation> records;
  for (int k = 0; k < 40; ++k) records.push_back(obs_at(k, 0.0, rng.uniform(-0.5, 0.5)));

  FilterState base = init_filter(candidates.size(), 0.3);
  run_filter(base, candidates, log_from(records));

  std::mt19937 shuffler(99);
  for (int perm = 0; perm < 100; ++perm) {
    std::vector<Observation> shuffled = records;
    std::shuffle(shuffled.begin(), shuffled.end(), shuffler);
    for (std::size_t i = 0; i < shuffled.size(); ++i) shuffled[i].k = static_cast<int>(i);
    FilterState fs = init_filter(candidates.size(), 0.3);
    run_filter(fs, candidates, log_from(shuffled));
    CHECK(fs.discarded == base.discarded);
  }
}

TEST_CASE("the shortlist shrinks monotonically over prefixes") {
  RngStream rng(13);
  std::vector<PolicyParams> candidates;
  for (int i = 0; i < 25; ++i) candidates.push_back(const_policy(rng.uniform(-1.0, 1.0)));

  FilterState fs = init_filter(candidates.size(), 0.2);
  int prev = fs.shortlisted_count();
  for (int k = 0; k < 60; ++k) {
    observe(fs, candidates, obs_at(k, 0.0, rng.uniform(-1.0, 1.0)));
    const int now = fs.shortlisted_count();
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("retention: candidates within psi globally always survive") {
  // Constant policies have a state-independent error, so the global max
  // error equals the per-sample error.
  const double psi = 0.25;
  RngStream rng(17);
  std::vector<PolicyParams> candidates;
  int safe = 0;
  for (int i = 0; i < 20; ++i) {
    const double offset = (i < 10) ? rng.uniform(0.0, psi) : rng.uniform(1.01 * psi, 3.0);
    if (i < 10) ++safe;
    candidates.push_back(const_policy(offset));
  }

  FilterState fs = init_filter(candidates.size(), psi);
  for (int k = 0; k < 100; ++k)
    observe(fs, candidates, obs_at(k, rng.uniform(-5.0, 5.0), 0.0));
  for (int i = 0; i < 20; ++i) {
    if (i < 10)
      CHECK_FALSE(fs.discarded[static_cast<std::size_t>(i)]);
    else
      CHECK(fs.discarded[static_cast<std::size_t>(i)]);
  }
  CHECK(fs.shortlisted_count() == safe);
}

TEST_CASE("adversarial identical states only eliminate mismatches at that state") {
  const Architecture arch = Architecture::net(1, {1, 1});
  VectorXd tv(4), tc(4);
  tv << 1.0, 0.0, 1.0, 0.0;   // relu(s)
  tc << -1.0, 0.0, 1.0, 0.0;  // relu(-s): agrees at s=0... and below psi for small |s|
  const PolicyParams victim = make_policy(arch, tv);
  std::vector<PolicyParams> candidates = {make_policy(arch, tc), const_policy(5.0)};

  FilterState fs = init_filter(2, 0.1);
  std::vector<Observation> records;
  for (int k = 0; k < 20; ++k) {
    Observation o;
    o.k = k;
    o.state = VectorXd::Constant(1, 0.05);  // repeated identical state
    o.action = evaluate(victim, o.state);
    records.push_back(o);
  }
  run_filter(fs, candidates, log_from(records));
  CHECK_FALSE(fs.discarded[0]);  // matches at the repeated state
  CHECK(fs.discarded[1]);        // wildly off everywhere
}

TEST_CASE("error report covers the shortlist") {
  const double psi = 0.5;
  std::vector<PolicyParams> candidates = {const_policy(0.0), const_policy(0.3),
                                          const_policy(2.0)};
  std::vector<Observation> records;
  for (int k = 0; k < 10; ++k) records.push_back(obs_at(k, 1.0, 0.0));

  FilterState fs = init_filter(3, psi);
  run_filter(fs, candidates, log_from(records));
  const ErrorReport report = report_errors(fs, candidates, log_from(records));

  REQUIRE(report.candidate_indices == std::vector<int>{0, 1});
  REQUIRE(report.errors.rows() == 10);
  REQUIRE(report.errors.cols() == 2);
  for (int t = 0; t < 10; ++t) {
    CHECK(report.errors(t, 0) == 0.0);                     // identical candidate
    CHECK(report.errors(t, 1) == doctest::Approx(0.3));    // constant offset
    CHECK(report.errors(t, 1) <= psi);                     // shortlist bound
  }
}
