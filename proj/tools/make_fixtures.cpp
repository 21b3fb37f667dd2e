// Regenerates the files under data/: the published per-season summary and
// synthetic seasons drawn at those parameters.
//
//   make_fixtures <data-dir> [seed]

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include "elolab/curves_io.hpp"
#include "elolab/data_io.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_fixtures <data-dir> [seed]\n";
    return 2;
  }
  const std::string dir = argv[1];
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20240601;

  std::ofstream table(dir + "/table1.csv", std::ios::binary);
  table << "season,M,K,eta_hat,v_hat\n";
  for (const auto& row : elolab::kTable1) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*s,%d,%d,%.2f,%.1f\n", static_cast<int>(row.season.size()),
                  row.season.data(), row.teams, row.games, row.eta_hat, row.v_hat);
    table << buf;
  }

  std::vector<elolab::SeasonDataset> seasons;
  std::ofstream truth(dir + "/synthetic_true_skills.csv", std::ios::binary);
  truth << "season,team,theta\n";
  for (std::size_t r = 0; r < elolab::kTable1.size(); ++r) {
    const auto& row = elolab::kTable1[r];
    auto s = elolab::generate_synthetic_season(elolab::scenario_of(row), std::string(row.season),
                                               elolab::derive_seed(seed, r));
    for (std::size_t m = 0; m < s.true_skills.size(); ++m)
      truth << row.season << ',' << s.true_skills.labels[m] << ','
            << elolab::format_number(s.true_skills[m]) << '\n';
    seasons.push_back(std::move(s.dataset));
  }
  std::ofstream all(dir + "/synthetic_seasons.csv", std::ios::binary);
  elolab::write_season_csv(all, seasons);
  std::ofstream first(dir + "/synthetic_2009.csv", std::ios::binary);
  elolab::write_season_csv(first, std::span(seasons).first(1));
  return 0;
}
