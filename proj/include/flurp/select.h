// Copyright 2026 The flurp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "flurp/sharing.h"
#include "flurp/shuffle.h"

namespace flurp {

struct SelectionTask {
  SharedMatrix rows;
  std::vector<std::size_t> targets;  // t-th largest, 1-based
  std::vector<std::size_t> source;   // original row ids
};

struct SelectionResult {
  std::map<std::size_t, ArithmeticShare> values;  // one-element shares
  std::size_t partition_calls = 0;
  std::size_t compare_calls = 0;
};

struct PartitionResult {
  std::vector<std::size_t> pivots;
  SharedMatrix rows;
  std::size_t compare_calls = 0;
};

// Lomuto partition of every row around its last element. Elements revealed to
// be strictly below the pivot end up left of it, everything else right.
PartitionResult mul_row_partition(Party& party, const SharedMatrix& rows);

SelectionResult mul_row_quick_select(Party& party, const SelectionTask& task);

// Plaintext reference for the same tie semantics (duplicates counted).
std::int64_t kth_largest_plain(std::vector<std::int64_t> row, std::size_t t);

}  // namespace flurp
