#include "gtsi/contact_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gtsi/csv.hpp"

namespace gtsi {

const char* status_name(Status s) {
  switch (s) {
    case Status::Susceptible: return "susceptible";
    case Status::Infected: return "infected";
    case Status::Infectious: return "infectious";
    case Status::Recovered: return "recovered";
  }
  return "?";
}

Status status_from_name(const std::string& name) {
  if (name == "susceptible") return Status::Susceptible;
  if (name == "infected") return Status::Infected;
  if (name == "infectious") return Status::Infectious;
  if (name == "recovered") return Status::Recovered;
  throw ConfigError("unknown status '" + name + "'");
}

const std::vector<ContactEvent>& ContactLog::on(int day) const {
  if (!covers(day))
    throw ConfigError("contact log does not cover day " + std::to_string(day));
  return by_day[day - first_day];
}

FamilyStructure FamilyStructure::from_assignments(std::vector<int> family_of) {
  FamilyStructure f;
  f.family_of = std::move(family_of);
  int max_id = -1;
  for (int id : f.family_of) {
    if (id < 0) throw ConfigError("negative family id");
    max_id = std::max(max_id, id);
  }
  f.members.resize(max_id + 1);
  for (int i = 0; i < f.n(); ++i) f.members[f.family_of[i]].push_back(i);
  for (int g = 0; g <= max_id; ++g)
    if (f.members[g].empty())
      throw ConfigError("family ids not contiguous: id " + std::to_string(g) + " empty");
  return f;
}

FamilyStructure make_random_families(int n, int size_min, int size_max, Rng& rng) {
  if (n <= 0 || size_min < 1 || size_max < size_min)
    throw ConfigError("bad family size parameters");
  std::vector<int> family_of(n);
  int next = 0, fam = 0;
  while (next < n) {
    int size = static_cast<int>(rng.uniform_int(size_min, size_max));
    size = std::min(size, n - next);  // last family may be clipped
    for (int k = 0; k < size; ++k) family_of[next++] = fam;
    ++fam;
  }
  return FamilyStructure::from_assignments(std::move(family_of));
}

void SimConfig::validate() const {
  if (n <= 0) throw ConfigError("sim: n must be positive");
  if (days <= 0) throw ConfigError("sim: days must be positive");
  if (!(0 < k1 && k1 <= k2 && k2 < infection_period))
    throw ConfigError("sim: need 0 < k1 <= k2 < infection_period");
  if (lambda0 < 0) throw ConfigError("sim: lambda0 must be >= 0");
  if (p1 < 0 || p1 >= 1) throw ConfigError("sim: p1 must be in [0,1)");
  if (p_cross < 0 || p_cross > 1) throw ConfigError("sim: p_cross must be in [0,1]");
  if (viral_load_max < 1) throw ConfigError("sim: viral_load_max must be >= 1");
  if (family_min < 1 || family_max < family_min)
    throw ConfigError("sim: need 1 <= family_min <= family_max");
  if (!(tau_family_min > 0 && tau_family_max >= tau_family_min))
    throw ConfigError("sim: bad family tau range");
  if (!(tau_cross_min > 0 && tau_cross_max >= tau_cross_min))
    throw ConfigError("sim: bad cross tau range");
  if (!(d_min > 0 && d_max >= d_min)) throw ConfigError("sim: bad d range");
  if (initial_infected < 0 || initial_infected > n)
    throw ConfigError("sim: initial_infected out of range");
}

double transmission_probability(double viral_load, double tau, double d, double lambda0) {
  return -std::expm1(-lambda0 * viral_load * d * tau);
}

std::vector<ContactEvent> generate_contacts(const FamilyStructure& fams, const SimConfig& cfg,
                                            int day, Rng& rng) {
  std::vector<ContactEvent> events;
  for (const auto& mem : fams.members) {
    for (size_t a = 0; a < mem.size(); ++a)
      for (size_t b = a + 1; b < mem.size(); ++b) {
        const double tau = rng.uniform(cfg.tau_family_min, cfg.tau_family_max);
        const double d = rng.uniform(cfg.d_min, cfg.d_max);
        events.push_back({day, mem[a], mem[b], tau, d});
      }
  }
  if (cfg.p_cross > 0) {
    const int n = fams.n();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (fams.family_of[i] == fams.family_of[j]) continue;
        if (!rng.bernoulli(cfg.p_cross)) continue;
        const double tau = rng.uniform(cfg.tau_cross_min, cfg.tau_cross_max);
        const double d = rng.uniform(cfg.d_min, cfg.d_max);
        events.push_back({day, i, j, tau, d});
      }
  }
  return events;
}

static Status status_for(int infection_day, int day, const SimConfig& cfg) {
  if (infection_day < 0) return Status::Susceptible;
  const int e = day - infection_day;
  if (e >= cfg.infection_period) return Status::Recovered;
  if (e >= cfg.k1 && e <= cfg.k2) return Status::Infectious;
  return Status::Infected;
}

PopulationState step_day(const PopulationState& state, const std::vector<ContactEvent>& contacts,
                         const SimConfig& cfg, Rng& rng) {
  const int n = state.n();
  // escape probability per susceptible, accumulated from the pre-step snapshot
  std::vector<double> escape(n, 1.0);
  for (const ContactEvent& ev : contacts) {
    if (ev.i >= n || ev.j >= n) throw DimensionError("contact event index out of range");
    const IndividualState& a = state.ind[ev.i];
    const IndividualState& b = state.ind[ev.j];
    if (a.status == Status::Infectious && b.status == Status::Susceptible)
      escape[ev.j] *= 1.0 - transmission_probability(a.viral_load, ev.tau, ev.d, cfg.lambda0);
    if (b.status == Status::Infectious && a.status == Status::Susceptible)
      escape[ev.i] *= 1.0 - transmission_probability(b.viral_load, ev.tau, ev.d, cfg.lambda0);
  }

  PopulationState next = state;
  next.day = state.day + 1;
  for (int i = 0; i < n; ++i) {
    IndividualState& ind = next.ind[i];
    if (state.ind[i].status == Status::Susceptible) {
      const double p_inf = 1.0 - escape[i] * (1.0 - cfg.p1);
      if (p_inf > 0 && rng.bernoulli(p_inf)) {
        ind.infection_day = state.day;
        ind.viral_load = rng.uniform(1.0, cfg.viral_load_max);
      }
    }
    ind.status = status_for(ind.infection_day, next.day, cfg);
    if (ind.status == Status::Recovered || ind.status == Status::Susceptible)
      ind.viral_load = 0.0;
  }
  return next;
}

std::vector<std::uint8_t> ground_truth(const PopulationState& state) {
  std::vector<std::uint8_t> x(state.n());
  for (int i = 0; i < state.n(); ++i) {
    const Status s = state.ind[i].status;
    x[i] = (s == Status::Infected || s == Status::Infectious) ? 1 : 0;
  }
  return x;
}

const PopulationState& SimResult::at_day(int day) const {
  if (day < 0 || day >= static_cast<int>(states.size()))
    throw DimensionError("no snapshot for day " + std::to_string(day));
  return states[day];
}

double SimResult::sparsity_at(int day) const {
  const auto x = ground_truth(at_day(day));
  double s = 0;
  for (auto v : x) s += v;
  return s / static_cast<double>(x.size());
}

SimResult run_simulation(const SimConfig& cfg) {
  cfg.validate();
  SimResult res;
  res.cfg = cfg;
  Rng root(cfg.seed);
  Rng fam_rng = root.child("families");
  Rng contact_rng = root.child("contacts");
  Rng epi_rng = root.child("epidemic");

  res.families = make_random_families(cfg.n, cfg.family_min, cfg.family_max, fam_rng);

  PopulationState state;
  state.day = 0;
  state.ind.resize(cfg.n);
  for (int k = 0; k < cfg.initial_infected; ++k) {
    IndividualState& ind = state.ind[k];
    ind.infection_day = 0;
    ind.status = status_for(0, 0, cfg);
    ind.viral_load = epi_rng.uniform(1.0, cfg.viral_load_max);
  }

  res.contacts.first_day = 0;
  res.states.reserve(cfg.days + 1);
  res.states.push_back(state);
  for (int day = 0; day < cfg.days; ++day) {
    auto events = generate_contacts(res.families, cfg, day, contact_rng);
    state = step_day(state, events, cfg, epi_rng);
    res.contacts.by_day.push_back(std::move(events));
    res.states.push_back(state);
  }
  return res;
}

void write_contacts_csv(const std::filesystem::path& path, const ContactLog& log) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& day_events : log.by_day)
    for (const auto& ev : day_events)
      rows.push_back({std::to_string(ev.day), std::to_string(ev.i), std::to_string(ev.j),
                      fmt_double(ev.tau), fmt_double(ev.d)});
  write_csv(path, {"day", "i", "j", "tau", "d"}, rows);
}

ContactLog read_contacts_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int cd = t.column("day"), ci = t.column("i"), cj = t.column("j");
  const int ct = t.column("tau"), cdist = t.column("d");
  std::map<int, std::vector<ContactEvent>> by_day;
  for (const auto& row : t.rows) {
    ContactEvent ev;
    ev.day = static_cast<int>(parse_long(row[cd], "contacts day"));
    ev.i = static_cast<int>(parse_long(row[ci], "contacts i"));
    ev.j = static_cast<int>(parse_long(row[cj], "contacts j"));
    ev.tau = parse_double(row[ct], "contacts tau");
    ev.d = parse_double(row[cdist], "contacts d");
    by_day[ev.day].push_back(ev);
  }
  ContactLog log;
  if (by_day.empty()) return log;
  log.first_day = by_day.begin()->first;
  const int last = by_day.rbegin()->first;
  log.by_day.resize(last - log.first_day + 1);
  for (auto& [day, events] : by_day) log.by_day[day - log.first_day] = std::move(events);
  return log;
}

void write_status_csv(const std::filesystem::path& path,
                      const std::vector<PopulationState>& states) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& st : states)
    for (int i = 0; i < st.n(); ++i)
      rows.push_back({std::to_string(st.day), std::to_string(i),
                      status_name(st.ind[i].status), fmt_double(st.ind[i].viral_load)});
  write_csv(path, {"day", "individual", "status", "viral_load"}, rows);
}

std::vector<PopulationState> read_status_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int cd = t.column("day"), ci = t.column("individual");
  const int cs = t.column("status"), cv = t.column("viral_load");
  std::map<int, std::map<int, IndividualState>> by_day;
  for (const auto& row : t.rows) {
    const int day = static_cast<int>(parse_long(row[cd], "status day"));
    const int i = static_cast<int>(parse_long(row[ci], "status individual"));
    IndividualState ind;
    ind.status = status_from_name(row[cs]);
    ind.viral_load = parse_double(row[cv], "status viral_load");
    by_day[day][i] = ind;
  }
  std::vector<PopulationState> states;
  for (auto& [day, m] : by_day) {
    PopulationState st;
    st.day = day;
    st.ind.resize(m.size());
    for (auto& [i, ind] : m) {
      if (i < 0 || i >= static_cast<int>(m.size()))
        throw ConfigError("status csv: individual ids not contiguous on day " +
                          std::to_string(day));
      st.ind[i] = ind;
    }
    states.push_back(std::move(st));
  }
  return states;
}

void write_families_csv(const std::filesystem::path& path, const FamilyStructure& fams) {
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < fams.n(); ++i)
    rows.push_back({std::to_string(i), std::to_string(fams.family_of[i])});
  write_csv(path, {"individual", "family_id"}, rows);
}

FamilyStructure read_families_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int ci = t.column("individual"), cf = t.column("family_id");
  std::map<int, int> fam;
  for (const auto& row : t.rows)
    fam[static_cast<int>(parse_long(row[ci], "families individual"))] =
        static_cast<int>(parse_long(row[cf], "families family_id"));
  std::vector<int> family_of;
  family_of.reserve(fam.size());
  for (auto& [i, f] : fam) {
    if (i != static_cast<int>(family_of.size()))
      throw ConfigError("families csv: individual ids must be 0..n-1 without gaps");
    family_of.push_back(f);
  }
  return FamilyStructure::from_assignments(std::move(family_of));
}

}  // namespace gtsi
