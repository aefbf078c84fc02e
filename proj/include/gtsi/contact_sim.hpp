#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gtsi/errors.hpp"
#include "gtsi/rng.hpp"

namespace gtsi {

enum class Status : std::uint8_t { Susceptible = 0, Infected = 1, Infectious = 2, Recovered = 3 };

const char* status_name(Status s);
Status status_from_name(const std::string& name);

struct ContactEvent {
  int day;
  int i, j;    // i < j
  double tau;  // contact duration, hours
  double d;    // proximity weight
};

// Per-day event lists over a contiguous day range [first_day, first_day + size).
struct ContactLog {
  int first_day = 0;
  std::vector<std::vector<ContactEvent>> by_day;

  int size() const { return static_cast<int>(by_day.size()); }
  bool covers(int day) const { return day >= first_day && day < first_day + size(); }
  const std::vector<ContactEvent>& on(int day) const;
};

struct FamilyStructure {
  std::vector<int> family_of;             // individual -> family id
  std::vector<std::vector<int>> members;  // family id -> sorted member list

  int n() const { return static_cast<int>(family_of.size()); }
  int num_families() const { return static_cast<int>(members.size()); }

  // validates ids are contiguous 0..F-1 and every family nonempty
  static FamilyStructure from_assignments(std::vector<int> family_of);
};

FamilyStructure make_random_families(int n, int size_min, int size_max, Rng& rng);

struct SimConfig {
  int n = 1000;
  int days = 57;             // horizon; states recorded for day 0..days
  int k1 = 3;                // incubation: infectious from day infection_day + k1
  int k2 = 7;                // last infectious day infection_day + k2
  int infection_period = 14; // recovered (absorbing) once day - infection_day >= this
  double lambda0 = 5e-6;     // transmission rate scale
  double p1 = 2e-4;          // daily stray infection probability
  double viral_load_max = 32768.0;  // load ~ Uniform(1, max), drawn once
  int family_min = 2, family_max = 5;
  double p_cross = 2e-3;     // per cross-clique pair daily contact probability
  double tau_family_min = 0.1, tau_family_max = 8.0;
  double tau_cross_min = 0.05, tau_cross_max = 1.0;
  double d_min = 0.5, d_max = 1.0;
  int initial_infected = 4;  // index cases infected on day 0
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct IndividualState {
  Status status = Status::Susceptible;
  int infection_day = -1;   // -1: never infected
  double viral_load = 0.0;  // positive iff status is Infected or Infectious
};

struct PopulationState {
  int day = 0;
  std::vector<IndividualState> ind;

  int n() const { return static_cast<int>(ind.size()); }
};

// 1 - exp(-lambda0 * viral_load * d * tau): per-contact transmission probability
double transmission_probability(double viral_load, double tau, double d, double lambda0);

// Daily contact events: every within-family pair meets once per day; each
// cross-family pair meets with probability p_cross. tau and d are drawn fresh
// per event from the configured uniform ranges.
std::vector<ContactEvent> generate_contacts(const FamilyStructure& fams, const SimConfig& cfg,
                                            int day, Rng& rng);

// Advance one day. Infections are computed from the pre-step snapshot only
// (one-hop rule): individuals infected during this step cannot transmit in the
// same step. A susceptible j escapes contact infection with probability
// prod_k (1 - p_kj) over infectious contacts k, and independently faces the
// stray risk p1. New infections draw viral_load ~ Uniform(1, viral_load_max).
PopulationState step_day(const PopulationState& state, const std::vector<ContactEvent>& contacts,
                         const SimConfig& cfg, Rng& rng);

// x_i = 1 iff currently carrying (Infected or Infectious)
std::vector<std::uint8_t> ground_truth(const PopulationState& state);

struct SimResult {
  SimConfig cfg;
  FamilyStructure families;
  ContactLog contacts;                   // days 0..days-1
  std::vector<PopulationState> states;   // start-of-day snapshots, day 0..days

  const PopulationState& at_day(int day) const;
  double sparsity_at(int day) const;     // fraction infected at start of day
};

SimResult run_simulation(const SimConfig& cfg);

// csv formats: contacts "day,i,j,tau,d"; status "day,individual,status,viral_load";
// families "individual,family_id"
void write_contacts_csv(const std::filesystem::path& path, const ContactLog& log);
ContactLog read_contacts_csv(const std::filesystem::path& path);
void write_status_csv(const std::filesystem::path& path, const std::vector<PopulationState>& states);
std::vector<PopulationState> read_status_csv(const std::filesystem::path& path);
void write_families_csv(const std::filesystem::path& path, const FamilyStructure& fams);
FamilyStructure read_families_csv(const std::filesystem::path& path);

}  // namespace gtsi
