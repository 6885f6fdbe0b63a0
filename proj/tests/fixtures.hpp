#pragma once

#include <string>

#include "mixext/game.hpp"

namespace fixtures {

inline mixext::FiniteGame matching_pennies() {
  return mixext::make_game({2, 2}, std::vector<std::vector<mixext::Rational>>{{1, -1, -1, 1},
                                                                             {-1, 1, 1, -1}});
}

inline mixext::FiniteGame battle_of_sexes() {
  return mixext::make_game({2, 2}, std::vector<std::vector<mixext::Rational>>{{2, 0, 0, 1},
                                                                             {1, 0, 0, 2}});
}

inline mixext::FiniteGame zero_game(std::vector<std::size_t> counts = {2, 2}) {
  std::size_t volume = 1;
  for (auto c : counts) volume *= c;
  return mixext::make_game(counts, std::vector<std::vector<double>>(
                                       counts.size(), std::vector<double>(volume, 0.0)));
}

inline mixext::FiniteGame duplicate_row() {
  return mixext::make_game({2, 2}, std::vector<std::vector<double>>{{1, 0, 1, 0}, {1, 0, 0, 1}});
}

inline std::string data_file(const std::string& name) {
  return std::string(MIXEXT_DATA_DIR) + "/games/" + name;
}

}  // namespace fixtures
