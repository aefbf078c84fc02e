#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gtsi/contact_sim.hpp"
#include "gtsi/csv.hpp"

using namespace gtsi;

namespace {

SimConfig small_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = 80;
  cfg.days = 25;
  cfg.p_cross = 0.01;
  cfg.lambda0 = 2e-5;
  cfg.initial_infected = 3;
  cfg.seed = seed;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path tmp_dir() {
  const auto d = std::filesystem::temp_directory_path() / "gtsi_test_sim";
  std::filesystem::create_directories(d);
  return d;
}

// replays one individual's trajectory from its (constant) infection day
Status expected_status(int infection_day, int day, const SimConfig& cfg) {
  if (infection_day < 0 || day < infection_day) return Status::Susceptible;
  const int e = day - infection_day;
  if (e >= cfg.infection_period) return Status::Recovered;
  if (e >= cfg.k1 && e <= cfg.k2) return Status::Infectious;
  return Status::Infected;
}

}  // namespace

TEST_CASE("config validation rejects bad parameter combinations") {
  SimConfig cfg = small_config(1);
  CHECK_NOTHROW(cfg.validate());
  SimConfig c = cfg;
  c.n = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = cfg;
  c.k1 = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = cfg;
  c.k2 = c.infection_period;  // recovery must come after infectiousness
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = cfg;
  c.k2 = c.k1 - 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = cfg;
  c.p1 = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = cfg;
  c.family_min = 3;
  c.family_max = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = cfg;
  c.initial_infected = c.n + 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("transmission probability formula and range") {
  CHECK(transmission_probability(0, 1, 1, 5e-6) == 0.0);
  CHECK(transmission_probability(1000, 2, 0.7, 5e-6) ==
        doctest::Approx(1.0 - std::exp(-5e-6 * 1000 * 0.7 * 2)).epsilon(1e-12));
  // saturates at 1 for huge loads
  CHECK(transmission_probability(1e12, 8, 1, 5e-6) == doctest::Approx(1.0));
  CHECK(transmission_probability(500, 0.5, 0.6, 0.0) == 0.0);
}

TEST_CASE("families partition the population within the size bounds") {
  Rng rng(9);
  const FamilyStructure f = make_random_families(103, 2, 5, rng);
  CHECK(f.n() == 103);
  std::vector<int> seen(103, 0);
  for (int g = 0; g < f.num_families(); ++g) {
    const auto& mem = f.members[g];
    CHECK(!mem.empty());
    CHECK(mem.size() <= 5);
    for (int i : mem) {
      CHECK(f.family_of[i] == g);
      seen[i]++;
    }
  }
  for (int c : seen) CHECK(c == 1);
  // all but the clipped last family respect the minimum
  for (int g = 0; g + 1 < f.num_families(); ++g) CHECK(f.members[g].size() >= 2);
}

TEST_CASE("from_assignments rejects gaps and negatives") {
  CHECK_THROWS_AS(FamilyStructure::from_assignments({0, 2, 2}), ConfigError);
  CHECK_THROWS_AS(FamilyStructure::from_assignments({0, -1}), ConfigError);
  const auto f = FamilyStructure::from_assignments({1, 0, 1});
  CHECK(f.num_families() == 2);
  CHECK(f.members[1] == std::vector<int>{0, 2});
}

TEST_CASE("daily contacts: family cliques always present, cross pairs tagged correctly") {
  SimConfig cfg = small_config(4);
  cfg.p_cross = 0.05;
  Rng rng(11);
  const FamilyStructure fams = make_random_families(cfg.n, 2, 5, rng);
  Rng crng(12);
  const auto events = generate_contacts(fams, cfg, 3, crng);

  std::set<std::pair<int, int>> seen;
  for (const auto& ev : events) {
    CHECK(ev.day == 3);
    CHECK(ev.i < ev.j);
    CHECK(ev.d >= cfg.d_min);
    CHECK(ev.d <= cfg.d_max);
    const bool same_family = fams.family_of[ev.i] == fams.family_of[ev.j];
    if (same_family) {
      CHECK(ev.tau >= cfg.tau_family_min);
      CHECK(ev.tau <= cfg.tau_family_max);
    } else {
      CHECK(ev.tau >= cfg.tau_cross_min);
      CHECK(ev.tau <= cfg.tau_cross_max);
    }
    seen.insert({ev.i, ev.j});
  }
  // every within-family pair met exactly once
  size_t family_pairs = 0;
  for (const auto& mem : fams.members) family_pairs += mem.size() * (mem.size() - 1) / 2;
  size_t family_seen = 0;
  for (const auto& [i, j] : seen)
    if (fams.family_of[i] == fams.family_of[j]) ++family_seen;
  CHECK(family_seen == family_pairs);
  CHECK(seen.size() == events.size());  // no duplicate pairs in one day
}

TEST_CASE("one-hop rule: a same-day infection cannot transmit onward") {
  // chain a - b - c with certain transmission; b gets infected by a on day
  // k1 (a's first infectious day) but must not pass it to c the same day
  SimConfig cfg;
  cfg.n = 3;
  cfg.days = 10;
  cfg.lambda0 = 1e9;  // p = 1 for any contact with an infectious carrier
  cfg.p1 = 0.0;
  cfg.p_cross = 0.0;
  cfg.initial_infected = 1;
  cfg.seed = 5;
  cfg.validate();

  PopulationState st;
  st.day = 0;
  st.ind.resize(3);
  st.ind[0].infection_day = 0;
  st.ind[0].status = Status::Infected;
  st.ind[0].viral_load = 100.0;

  Rng rng(17);
  std::vector<PopulationState> states{st};
  for (int day = 0; day < 6; ++day) {
    const std::vector<ContactEvent> events{{day, 0, 1, 4.0, 1.0}, {day, 1, 2, 4.0, 1.0}};
    states.push_back(step_day(states.back(), events, cfg, rng));
  }
  // a infectious from day k1=3; b infected during day 3, visible at day 4
  CHECK(states[3].ind[0].status == Status::Infectious);
  CHECK(states[3].ind[1].status == Status::Susceptible);
  CHECK(states[4].ind[1].status == Status::Infected);
  CHECK(states[4].ind[1].infection_day == 3);
  // c is untouched until b turns infectious (day 3 + k1), then catches it
  CHECK(states[4].ind[2].status == Status::Susceptible);
  CHECK(states[6].ind[2].status == Status::Susceptible);
}

TEST_CASE("status trajectories follow the day arithmetic exactly") {
  const SimConfig cfg = small_config(21);
  const SimResult res = run_simulation(cfg);
  REQUIRE(static_cast<int>(res.states.size()) == cfg.days + 1);
  for (int i = 0; i < cfg.n; ++i) {
    const int t0 = res.states[cfg.days].ind[i].infection_day;
    for (int day = 0; day <= cfg.days; ++day) {
      const IndividualState& ind = res.states[day].ind[i];
      // infection day is immutable once set
      if (ind.infection_day >= 0) CHECK(ind.infection_day == t0);
      CHECK(ind.status == expected_status(ind.infection_day, day, cfg));
    }
  }
}

TEST_CASE("viral load is drawn once and constant while carrying") {
  const SimConfig cfg = small_config(22);
  const SimResult res = run_simulation(cfg);
  for (int i = 0; i < cfg.n; ++i) {
    double load = -1;
    for (int day = 0; day <= cfg.days; ++day) {
      const IndividualState& ind = res.states[day].ind[i];
      const bool carrying =
          ind.status == Status::Infected || ind.status == Status::Infectious;
      if (carrying) {
        CHECK(ind.viral_load >= 1.0);
        CHECK(ind.viral_load <= cfg.viral_load_max);
        if (load < 0)
          load = ind.viral_load;
        else
          CHECK(ind.viral_load == load);
      } else {
        CHECK(ind.viral_load == 0.0);
      }
    }
  }
}

TEST_CASE("ground truth marks exactly the carriers") {
  const SimConfig cfg = small_config(23);
  const SimResult res = run_simulation(cfg);
  const auto x = ground_truth(res.at_day(10));
  for (int i = 0; i < cfg.n; ++i) {
    const Status s = res.at_day(10).ind[i].status;
    CHECK(x[i] == ((s == Status::Infected || s == Status::Infectious) ? 1 : 0));
  }
  double frac = 0;
  for (auto v : x) frac += v;
  CHECK(res.sparsity_at(10) == doctest::Approx(frac / cfg.n).epsilon(1e-15));
}

TEST_CASE("stray infections accumulate without any contact transmission") {
  SimConfig cfg = small_config(24);
  cfg.lambda0 = 0.0;
  cfg.p_cross = 0.0;
  cfg.p1 = 0.05;
  cfg.initial_infected = 0;
  cfg.days = 20;
  const SimResult res = run_simulation(cfg);
  int ever = 0;
  for (int i = 0; i < cfg.n; ++i)
    if (res.states[cfg.days].ind[i].infection_day >= 0) ++ever;
  // E[ever] = n(1 - (1-p1)^days) ~ 51; 3 sigma ~ 13
  CHECK(ever > 20);
  CHECK(ever < 78);
}

TEST_CASE("same seed reproduces the run byte for byte") {
  const SimConfig cfg = small_config(31);
  const SimResult a = run_simulation(cfg);
  const SimResult b = run_simulation(cfg);
  const auto dir = tmp_dir();
  write_contacts_csv(dir / "a_contacts.csv", a.contacts);
  write_contacts_csv(dir / "b_contacts.csv", b.contacts);
  write_status_csv(dir / "a_status.csv", a.states);
  write_status_csv(dir / "b_status.csv", b.states);
  CHECK(slurp(dir / "a_contacts.csv") == slurp(dir / "b_contacts.csv"));
  CHECK(slurp(dir / "a_status.csv") == slurp(dir / "b_status.csv"));

  SimConfig other = cfg;
  other.seed = cfg.seed + 1;
  const SimResult c = run_simulation(other);
  write_status_csv(dir / "c_status.csv", c.states);
  CHECK(slurp(dir / "a_status.csv") != slurp(dir / "c_status.csv"));
}

TEST_CASE("csv round-trips") {
  const SimConfig cfg = small_config(32);
  const SimResult res = run_simulation(cfg);
  const auto dir = tmp_dir();

  write_contacts_csv(dir / "contacts.csv", res.contacts);
  const ContactLog log = read_contacts_csv(dir / "contacts.csv");
  REQUIRE(log.size() == res.contacts.size());
  for (int day = 0; day < log.size(); ++day) {
    const auto& got = log.on(day);
    const auto& want = res.contacts.on(day);
    REQUIRE(got.size() == want.size());
    for (size_t e = 0; e < got.size(); ++e) {
      CHECK(got[e].i == want[e].i);
      CHECK(got[e].j == want[e].j);
      CHECK(got[e].tau == want[e].tau);  // exact: fmt_double round-trips
      CHECK(got[e].d == want[e].d);
    }
  }

  write_status_csv(dir / "status.csv", res.states);
  const auto states = read_status_csv(dir / "status.csv");
  REQUIRE(states.size() == res.states.size());
  for (size_t t = 0; t < states.size(); ++t) {
    CHECK(states[t].day == res.states[t].day);
    for (int i = 0; i < cfg.n; ++i) {
      CHECK(states[t].ind[i].status == res.states[t].ind[i].status);
      CHECK(states[t].ind[i].viral_load == res.states[t].ind[i].viral_load);
    }
  }

  write_families_csv(dir / "families.csv", res.families);
  const FamilyStructure fams = read_families_csv(dir / "families.csv");
  CHECK(fams.family_of == res.families.family_of);
}

TEST_CASE("contact log lookup errors on uncovered days") {
  ContactLog log;
  log.first_day = 2;
  log.by_day.resize(3);
  CHECK(log.covers(2));
  CHECK(log.covers(4));
  CHECK(!log.covers(5));
  CHECK_THROWS_AS(log.on(1), ConfigError);
}
