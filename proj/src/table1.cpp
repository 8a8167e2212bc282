#include "ocw/atomic_model.hpp"

namespace ocw {

BranchingTable load_table1() {
  std::vector<SublevelId> rows;
  for (int m = -2; m <= 2; ++m) rows.push_back({"G", 2, m, false});
  for (int m = -1; m <= 1; ++m) rows.push_back({"G", 1, m, false});
  std::vector<SublevelId> cols;
  for (int m = -2; m <= 2; ++m) cols.push_back({"U", 2, m, false});
  for (int m = -1; m <= 1; ++m) cols.push_back({"U", 1, m, false});

  Eigen::MatrixXd f(8, 8);
  // clang-format off
  //        F''=2: -2        -1         0          1         2     F''=1: -1        0          1
  f << 0.68852, 0.19426,  0.05055,  0,        0,        0.2361,   0.09722,   0,          // F=2 -2
       0.19426, 0.47296,  0.190277, 0.07583,  0,        0.1667,   0.11805,   0.04861,    // F=2 -1
       0.05055, 0.190277, 0.45166,  0.190277, 0.05055,  0.104167, 0.125,     0.104167,   // F=2  0
       0,       0.07583,  0.190277, 0.47296,  0.19426,  0.04861,  0.11805,   0.1667,     // F=2 +1
       0,       0,        0.05055,  0.19426,  0.68852,  0,        0.09722,   0.2361,     // F=2 +2
       0.04722, 0.03333,  0.02083,  0.009722, 0,        0.21296,  0.1226875, 0.1088,     // F=1 -1
       0.01944, 0.023611, 0.025,    0.023611, 0.01944,  0.1226875, 0.199,    0.1226875,  // F=1  0
       0,       0.009722, 0.02083,  0.03333,  0.04722,  0.1088,   0.1226875, 0.21296;    // F=1 +1
  // clang-format on
  return BranchingTable(std::move(rows), std::move(cols), std::move(f));
}

}  // namespace ocw
