#include "banana/banana.hpp"

namespace ban {

const std::vector<std::vector<long>>& reference_gv_table(bool even) {
  // rows n = 0..5, columns g = 0..6; values n_{g,D} / 12
  static const std::vector<std::vector<long>> odd{
      {1, 0, 0, 0, 0, 0, 0},
      {8, -6, 1, 0, 0, 0, 0},
      {39, -46, 17, -2, 0, 0, 0},
      {152, -242, 139, -34, 3, 0, 0},
      {513, -1024, 800, -304, 56, -4, 0},
      {1560, -3730, 3683, -1912, 548, -82, 5},
  };
  static const std::vector<std::vector<long>> ev{
      {-2, 1, 0, 0, 0, 0, 0},
      {-12, 10, -2, 0, 0, 0, 0},
      {-56, 72, -30, 4, 0, 0, 0},
      {-208, 352, -220, 60, -6, 0, 0},
      {-684, 1434, -1194, 492, -100, 8, 0},
      {-2032, 5056, -5252, 2908, -902, 148, -10},
  };
  return even ? ev : odd;
}

}  // namespace ban
