#pragma once

namespace ued {

inline constexpr int kRows = 12;
inline constexpr int kCols = 12;
inline constexpr int kFloors = 2;
inline constexpr int kCellsPerFloor = kRows * kCols;

struct MapDims {
  int rows = kRows;
  int cols = kCols;
  int floors = kFloors;
};

}  // namespace ued
